#include "phishscan/app/commands.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "phishscan/app/flagship.hpp"
#include "phishscan/app/pipeline.hpp"
#include "phishscan/app/report.hpp"
#include "phishscan/errors.hpp"
#include "phishscan/keccak.hpp"

namespace phishscan::app {

namespace fs = std::filesystem;

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const TransportError& e) {
    err << "error: source unreachable: " << e.what() << '\n';
    return kUnreachable;
  } catch (const NotFoundError& e) {
    err << "error: not found: " << e.what() << '\n';
    return kNotFound;
  } catch (const ConfigError& e) {
    err << "error: bad configuration: " << e.what() << '\n';
    return kBadInput;
  } catch (const ParseError& e) {
    err << "error: bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const ValidationError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kBadInput;
  } catch (const SequencingError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

void apply_environment(SourceOptions& src) {
  if (!src.rpc && !src.fixtures)
    if (const char* url = std::getenv("PHISHSCAN_RPC_URL"); url && *url) src.rpc = url;
  if (!src.registry_dir)
    if (const char* dir = std::getenv("PHISHSCAN_REGISTRY_DIR"); dir && *dir) src.registry_dir = fs::path(dir);
}

Environment open_environment(const SourceOptions& src) {
  if (src.rpc && src.fixtures) throw ConfigError("give either --rpc or --fixtures, not both");
  if (!src.rpc && !src.fixtures) throw ConfigError("no chain source: pass --rpc <url> or --fixtures <dir>");
  Environment env;
  fs::path registry;
  if (src.fixtures) {
    auto fixtures = FixtureSource::open(*src.fixtures);
    env.range = fixtures->block_range();
    env.chain = std::move(fixtures);
    env.fixtures = true;
    registry = src.registry_dir.value_or(*src.fixtures / "registry");
  } else {
    auto rpc = std::make_unique<JsonRpcSource>(*src.rpc, src.rpc_timeout_seconds);
    rpc->ping();
    env.range = rpc->block_range();
    env.chain = std::move(rpc);
    if (!src.registry_dir) throw ConfigError("--registry-dir (or PHISHSCAN_REGISTRY_DIR) is required with --rpc");
    registry = *src.registry_dir;
  }
  env.ref = load_reference_dir(registry);
  const fs::path abi_dir = src.abi_dir.value_or(registry / "abi");
  if (src.abi_dir || fs::is_directory(abi_dir)) env.decoder = Decoder::load(abi_dir);
  return env;
}

RuleConfig load_rule_config(const std::optional<fs::path>& path) {
  if (!path) return RuleConfig{};
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path->string());
  std::ostringstream s;
  s << in.rdbuf();
  return RuleConfig::from_json(s.str());
}

namespace {

std::unique_ptr<HistoryStore> open_history(const std::optional<fs::path>& dir, std::optional<std::uint64_t> lookback) {
  HistoryOptions h;
  h.lookback_blocks = lookback;
  if (dir) return HistoryStore::open(*dir, h);
  return std::make_unique<HistoryStore>(h);
}

/// First block replayed into history before detection starts.
std::optional<std::uint64_t> warm_start(const Environment& env, std::uint64_t from, std::optional<std::uint64_t> lookback) {
  if (lookback) {
    const std::uint64_t floor = env.fixtures && env.range ? env.range->first : 0;
    return std::max(floor, from > *lookback ? from - *lookback : 0);
  }
  if (env.fixtures && env.range) return env.range->first;
  return std::nullopt;
}

std::string join(const std::vector<Address>& list) {
  std::string s;
  for (const auto& a : list) s += (s.empty() ? "" : ", ") + a.hex();
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

int cmd_detect(const DetectOptions& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  SourceOptions src = o.source;
  apply_environment(src);
  const RuleConfig cfg = load_rule_config(o.config);
  Environment env = open_environment(src);

  std::uint64_t from = 1, to = 0;  // empty by default
  if (env.range) {
    to = o.to.value_or(env.range->second);
    from = o.from.value_or(env.fixtures ? env.range->first : to);
  } else if (o.from && o.to) {
    from = *o.from;
    to = *o.to;
  }
  auto history = open_history(o.history_dir, o.lookback);

  const RunPaths paths = run_paths(o.out);
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  std::ofstream verdict_out(paths.verdicts, std::ios::binary);
  if (!verdict_out) throw ConfigError("cannot write " + paths.verdicts.string());

  RunResult result;
  if (from <= to) {
    Pipeline pipeline(*env.chain, env.ref, env.decoder, cfg, *history, o.threads);
    result = pipeline.run(RunRange{from, to, warm_start(env, from, o.lookback)},
                          [&](std::uint64_t, const std::vector<Verdict>& vs) {
                            for (const auto& v : vs) verdict_out << encode_verdict(v) << '\n';
                          });
  }
  verdict_out.close();
  history->flush();

  {
    std::ofstream a(paths.attacks, std::ios::binary);
    for (const auto& r : result.attacks) a << encode_attack(r) << '\n';
  }
  const auto t_rem = std::chrono::steady_clock::now();
  {
    std::ofstream r(paths.remediation, std::ios::binary);
    for (const auto& rec : classify_remediations(result.verdicts, *history, *env.chain, env.ref, to))
      r << encode_remediation(rec) << '\n';
  }
  write_text(paths.nft_sales,
             encode_nft_sales(track_nft_sales(stolen_nfts(result.verdicts), history->all_transfers(), env.ref.registry)) + "\n");
  const double remediation_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_rem).count();

  RunManifest m;
  m.config_hash = keccak256(std::string_view(cfg.to_json())).hex();
  m.input_source = env.fixtures ? "fixtures" : "rpc";
  m.from = from;
  m.to = to;
  for (auto c : kAllCategories) m.verdict_count[std::string(to_string(c))] = 0;
  for (const auto& v : result.verdicts) ++m.verdict_count[std::string(to_string(v.category))];
  m.elapsed_ms = {{"warmup", result.stages.warmup_ms},   {"fetch", result.stages.fetch_ms},
                  {"prepare", result.stages.prepare_ms}, {"detect", result.stages.detect_ms},
                  {"append", result.stages.append_ms},   {"postprocess", remediation_ms},
                  {"total", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()}};
  m.diagnostics = result.diag;
  m.grants = result.grants;
  m.attack_count = result.attacks.size();
  write_text(paths.manifest, encode_manifest(m) + "\n");

  if (!o.quiet) {
    out << fmt::format("blocks {}..{}: {} verdicts, {} poisoning transfers\n", from, to, result.verdicts.size(),
                       result.attacks.size());
    out << format_category_table(summarize(result.verdicts));
  }
  return kOk;
}

int cmd_classify_tx(const ClassifyOptions& o, std::ostream& out) {
  SourceOptions src = o.source;
  apply_environment(src);
  const Hash32 hash = Hash32::from_hex(o.tx_hash);
  const RuleConfig cfg = load_rule_config(o.config);
  Environment env = open_environment(src);
  const auto block = env.chain->block_of_tx(hash);
  if (!block) throw NotFoundError("transaction " + hash.hex());

  HistoryStore history(HistoryOptions{o.lookback, 10'000});
  std::optional<std::uint64_t> warm = warm_start(env, *block, o.lookback);
  if (o.from) warm = std::min(*o.from, *block);
  Pipeline pipeline(*env.chain, env.ref, env.decoder, cfg, history, o.threads);
  const auto result = pipeline.run(RunRange{*block, *block, warm});

  std::uint32_t index = 0;
  for (const auto& t : env.chain->block(*block).transactions)
    if (t.hash == hash) index = t.tx_index;
  out << fmt::format("tx {} (block {}, index {})\n", hash.hex(), *block, index);
  bool any = false;
  for (const auto& v : result.verdicts) {
    if (v.tx_hash != hash) continue;
    any = true;
    std::string head = fmt::format("{} {}", rule_id(v.sub_category), to_string(v.sub_category));
    if (auto r = v.detail.find("reasons"); r != v.detail.end() && !r->second.empty()) head += "; " + r->second;
    out << head << '\n';
    out << "  victim: " << v.victim.hex() << '\n';
    out << "  scammer: " << join(v.scammer) << '\n';
    for (const auto& e : v.evidence) {
      if (e.supporting_tx_hashes.empty()) continue;
      std::string hashes;
      for (const auto& h : e.supporting_tx_hashes) hashes += (hashes.empty() ? "" : ", ") + h.hex();
      out << "  evidence " << e.rule_id << ": " << hashes << '\n';
    }
    auto d = [&](const char* key) -> std::string {
      auto it = v.detail.find(key);
      return it == v.detail.end() ? std::string("-") : it->second;
    };
    if (v.category == Category::AddressPoisoning) {
      out << "  planted record: " << d("plantedTx") << " amount " << d("plantedAmount") << " token " << d("plantedToken") << '\n';
      out << "  genuine similar transfer: " << d("genuineTx") << " to " << d("genuineDest") << " amount "
          << d("genuineAmount") << '\n';
    }
    if (v.category == Category::IcePhishing)
      out << "  grant: " << d("grantKind") << " in " << d("grantTx") << " to " << d("spender") << '\n';
    if (v.loss_usd)
      out << "  loss: " << v.loss_usd->str() << " USD" << (v.loss_partial ? " (partial)" : "") << '\n';
    else
      out << "  loss: unpriced\n";
  }
  if (!any) out << "no verdict\n";
  return kOk;
}

int cmd_orgs(const OrgsOptions& o, std::ostream& out) {
  const auto verdicts = read_verdicts(o.verdicts);
  std::vector<TransferRecord> stream;
  fs::path registry;
  if (o.history_dir) {
    stream = HistoryStore::open(*o.history_dir)->all_transfers();
    if (!o.registry_dir) throw ConfigError("--registry-dir is required with --history-dir");
    registry = *o.registry_dir;
  } else if (o.fixtures) {
    auto src = FixtureSource::open(*o.fixtures);
    if (auto range = src->block_range())
      for (std::uint64_t n = range->first; n <= range->second; ++n)
        for (const auto& tx : ingest_block(*src, n).transactions)
          for (const auto& e : extract_transfers(tx)) stream.push_back(TransferRecord{e, tx.from, tx.to, tx.tx_index});
    registry = o.registry_dir.value_or(*o.fixtures / "registry");
  } else {
    throw ConfigError("orgs needs the transfer stream: pass --fixtures <dir> or --history-dir <dir>");
  }
  const ReferenceData ref = load_reference_dir(registry);
  const auto edges = build_flow_edges(stream, ref);
  const auto found = discover_orgs(verdicts, edges, ref, o.flow);
  const std::string json = organizations_json(found.organizations);
  if (o.out)
    write_text(*o.out, json + "\n");
  if (o.edges_csv) write_text(*o.edges_csv, edges_csv(found.kept_edges));

  out << fmt::format("{:>4} {:<44} {:>8} {:>11} {:>10} {:>16} {:>8}\n", "Rank", "Organization", "Cashiers", "Aggregators",
                     "Depositors", "Profit (USD)", "Share%");
  for (const auto& row : nlohmann::json::parse(json))
    out << fmt::format("{:>4} {:<44} {:>8} {:>11} {:>10} {:>16} {:>8}\n", row["rank"].get<std::size_t>(),
                       row["id"].get<std::string>(), row["cashiers"].size(), row["aggregators"].size(),
                       row["depositors"].size(), row["totalProfitUsd"].get<std::string>(),
                       row["sharePercent"].get<std::string>());
  if (!o.out) out << json << '\n';
  return kOk;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
  write_report(o.verdicts, o.out_dir, o.format);
  out << "report written to " << o.out_dir.string() << '\n';
  return kOk;
}

int cmd_gen_corpus(const GenCorpusOptions& o, std::ostream& out) {
  if (o.incidents) {
    const auto f = write_flagship_fixtures(o.out);
    out << fmt::format("free order   {}\ngenuine      {}\nforged       {}\nmistaken     {}\nbenign       {}\n",
                       f.blur_free_order.hex(), f.genuine_deposit.hex(), f.forged_transfer.hex(),
                       f.mistaken_transfer.hex(), f.benign_transfer.hex());
    return kOk;
  }
  const auto s = generate_corpus(o.corpus, o.out);
  out << fmt::format("{} blocks from {}, {} transactions: {} positive, {} negative, {} support, {} attack, {} filler\n",
                     s.blocks, s.first_block, s.transactions, s.positives, s.negatives, s.support, s.attacks, s.fillers);
  return kOk;
}

BenchReport run_bench(const BenchOptions& o) {
  SourceOptions src = o.source;
  apply_environment(src);
  Environment env = open_environment(src);
  BenchReport r;
  if (!env.range) return r;
  HistoryStore history;
  const RuleConfig cfg;
  Pipeline pipeline(*env.chain, env.ref, env.decoder, cfg, history, o.threads);
  const auto result = pipeline.run(RunRange{env.range->first, env.range->second, std::nullopt});
  std::vector<double> ms;
  for (const auto& b : result.blocks) {
    ms.push_back(b.ms);
    r.transactions += b.tx_count;
  }
  r.blocks = ms.size();
  if (ms.empty()) return r;
  double sum = 0;
  for (double x : ms) sum += x;
  r.avg_ms = sum / static_cast<double>(ms.size());
  r.max_ms = *std::max_element(ms.begin(), ms.end());
  std::sort(ms.begin(), ms.end());
  const std::size_t mid = ms.size() / 2;
  r.median_ms = ms.size() % 2 ? ms[mid] : (ms[mid - 1] + ms[mid]) / 2;
  return r;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  const BenchReport r = run_bench(o);
  const bool within = r.avg_ms < o.budget_ms;
  out << fmt::format("blocks: {}  transactions: {}\n", r.blocks, r.transactions);
  out << fmt::format("per-block ms  avg {:.3f}  median {:.3f}  max {:.3f}\n", r.avg_ms, r.median_ms, r.max_ms);
  out << fmt::format("block-time budget {:.0f} ms: {}\n", o.budget_ms, within ? "ok" : "exceeded");
  if (o.json_out) {
    nlohmann::ordered_json j{{"blocks", r.blocks},       {"transactions", r.transactions}, {"avgMs", r.avg_ms},
                             {"medianMs", r.median_ms}, {"maxMs", r.max_ms},             {"budgetMs", o.budget_ms},
                             {"withinBudget", within}};
    write_text(*o.json_out, j.dump(2) + "\n");
  }
  return within ? kOk : kFailure;
}

}  // namespace phishscan::app
