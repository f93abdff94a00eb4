#include "phishscan/app/report.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "phishscan/errors.hpp"

namespace phishscan::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

RunPaths run_paths(const fs::path& verdict_file) {
  fs::path stem = verdict_file;
  if (stem.extension() == ".jsonl") stem.replace_extension();
  auto with = [&](const std::string& suffix) { return fs::path(stem.string() + suffix); };
  return {verdict_file, with(".manifest.json"), with(".attacks.jsonl"), with(".remediation.jsonl"), with(".nftsales.json")};
}

std::string encode_manifest(const RunManifest& m) {
  ordered_json j;
  j["configHash"] = m.config_hash;
  j["inputSource"] = m.input_source;
  j["blockRange"] = {{"from", m.from}, {"to", m.to}};
  j["verdictCount"] = ordered_json::object();
  for (const auto& [k, v] : m.verdict_count) j["verdictCount"][k] = v;
  j["elapsedMs"] = ordered_json::object();
  for (const auto& [k, v] : m.elapsed_ms) j["elapsedMs"][k] = std::round(v * 1000.0) / 1000.0;
  j["diagnostics"] = {{"malformedLogs", m.diagnostics.malformed_logs},
                      {"decodeErrors", m.diagnostics.decode_errors},
                      {"balanceUnavailable", m.diagnostics.balance_unavailable},
                      {"unpriceableLegs", m.diagnostics.unpriceable_legs}};
  j["grantCalls"] = {{"approve", m.grants.approve_calls}, {"permit", m.grants.permit_calls}};
  j["attackCount"] = m.attack_count;
  return j.dump(2);
}

RunManifest decode_manifest(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.config_hash = j.at("configHash").get<std::string>();
    m.input_source = j.at("inputSource").get<std::string>();
    m.from = j.at("blockRange").at("from").get<std::uint64_t>();
    m.to = j.at("blockRange").at("to").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("verdictCount").items()) m.verdict_count[k] = v.get<std::uint64_t>();
    for (const auto& [k, v] : j.at("elapsedMs").items()) m.elapsed_ms[k] = v.get<double>();
    const auto& d = j.at("diagnostics");
    m.diagnostics = {d.at("malformedLogs").get<std::uint64_t>(), d.at("decodeErrors").get<std::uint64_t>(),
                     d.at("balanceUnavailable").get<std::uint64_t>(), d.at("unpriceableLegs").get<std::uint64_t>()};
    m.grants.approve_calls = j.at("grantCalls").at("approve").get<std::uint64_t>();
    m.grants.permit_calls = j.at("grantCalls").at("permit").get<std::uint64_t>();
    m.attack_count = j.value("attackCount", std::uint64_t{0});
    if (m.verdict_count.size() != std::size(kAllCategories))
      throw ParseError("manifest verdictCount must key exactly the four categories");
    for (auto c : kAllCategories)
      if (!m.verdict_count.contains(std::string(to_string(c))))
        throw ParseError("manifest verdictCount lacks " + std::string(to_string(c)));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

namespace {

template <typename F>
void for_lines(const fs::path& path, F&& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      f(line);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void add(LossCell& c, const Verdict& v) {
  ++c.count;
  if (v.loss_usd)
    c.loss += *v.loss_usd;
  else
    ++c.unpriced;
}

}  // namespace

std::vector<Verdict> read_verdicts(const fs::path& path) {
  std::vector<Verdict> out;
  for_lines(path, [&](const std::string& line) { out.push_back(decode_verdict(line)); });
  return out;
}

void write_verdicts(const fs::path& path, const std::vector<Verdict>& verdicts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& v : verdicts) out << encode_verdict(v) << '\n';
}

std::vector<AttackRecord> read_attacks(const fs::path& path) {
  std::vector<AttackRecord> out;
  for_lines(path, [&](const std::string& line) { out.push_back(decode_attack(line)); });
  return out;
}

std::vector<RemediationRecord> read_remediations(const fs::path& path) {
  std::vector<RemediationRecord> out;
  for_lines(path, [&](const std::string& line) { out.push_back(decode_remediation(line)); });
  return out;
}

CategoryTable summarize(const std::vector<Verdict>& verdicts) {
  CategoryTable t;
  for (auto c : kAllCategories) t.by_category[c];
  for (auto s : kAllSubCategories) t.by_sub_category[s];
  for (const auto& v : verdicts) {
    add(t.by_category[v.category], v);
    add(t.by_sub_category[v.sub_category], v);
    add(t.total, v);
  }
  return t;
}

std::string format_category_table(const CategoryTable& t) {
  std::string out = fmt::format("{:<18} {:<18} {:>6} {:>10} {:>18}\n", "Category", "SubCategory", "Rule", "Count", "Loss (USD)");
  for (auto c : kAllCategories) {
    for (auto s : kAllSubCategories) {
      if (category_of(s) != c) continue;
      const auto& cell = t.by_sub_category.at(s);
      out += fmt::format("{:<18} {:<18} {:>6} {:>10} {:>18}\n", to_string(c), to_string(s), rule_id(s), cell.count,
                         cell.loss.str());
    }
    const auto& cell = t.by_category.at(c);
    out += fmt::format("{:<18} {:<18} {:>6} {:>10} {:>18}\n", to_string(c), "(all)", "", cell.count, cell.loss.str());
  }
  out += fmt::format("{:<18} {:<18} {:>6} {:>10} {:>18}\n", "Total", "", "", t.total.count, t.total.loss.str());
  return out;
}

std::map<std::string, LossCell> daily_losses(const std::vector<Verdict>& verdicts) {
  std::map<std::string, LossCell> days;
  for (const auto& v : verdicts) add(days[utc_date(v.timestamp)], v);
  return days;
}

GrantShare grant_share(const std::vector<Verdict>& verdicts, const GrantTotals& totals) {
  GrantShare g;
  g.approve_calls = totals.approve_calls;
  g.permit_calls = totals.permit_calls;
  std::set<std::string> approves, permits;
  for (const auto& v : verdicts) {
    if (v.category != Category::IcePhishing) continue;
    const auto kind = v.detail.find("grantKind");
    const auto tx = v.detail.find("grantTx");
    if (kind == v.detail.end() || tx == v.detail.end()) continue;
    if (kind->second == "approve" || kind->second == "increaseAllowance") approves.insert(tx->second);
    if (kind->second == "permit" || kind->second == "permit2") permits.insert(tx->second);
  }
  g.phishing_approves = approves.size();
  g.phishing_permits = permits.size();
  return g;
}

std::string percent_text(std::uint64_t part, std::uint64_t whole) {
  if (whole == 0) return "0.00";
  const BigInt hundredths = (BigInt(part) * 10000 + whole / 2) / whole;
  return Usd::from_cents(hundredths).str();
}

std::string encode_nft_sales(const NftSaleTable& t) {
  ordered_json j;
  j["byMarket"] = ordered_json::object();
  for (const auto& [market, roles] : t.by_market)
    for (const auto& [role, n] : roles) j["byMarket"][market][role] = n;
  j["held"] = t.held;
  return j.dump(2);
}

NftSaleTable decode_nft_sales(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    NftSaleTable t;
    for (const auto& [market, roles] : j.at("byMarket").items())
      for (const auto& [role, n] : roles.items()) t.by_market[market][role] = n.get<std::uint64_t>();
    t.held = j.at("held").get<std::uint64_t>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("nft sales: ") + e.what());
  }
}

void write_report(const fs::path& verdict_file, const fs::path& dir, const std::string& format) {
  if (format != "csv" && format != "json") throw ConfigError("report format must be csv or json");
  const auto paths = run_paths(verdict_file);
  const auto verdicts = read_verdicts(paths.verdicts);
  std::optional<RunManifest> manifest;
  if (fs::exists(paths.manifest)) manifest = decode_manifest(read_file(paths.manifest));
  std::optional<std::vector<AttackRecord>> attacks;
  if (fs::exists(paths.attacks)) attacks = read_attacks(paths.attacks);
  std::optional<std::vector<RemediationRecord>> remediation;
  if (fs::exists(paths.remediation)) remediation = read_remediations(paths.remediation);
  std::optional<NftSaleTable> sales;
  if (fs::exists(paths.nft_sales)) sales = decode_nft_sales(read_file(paths.nft_sales));

  const auto table = summarize(verdicts);
  const auto days = daily_losses(verdicts);
  const auto share = grant_share(verdicts, manifest ? manifest->grants : GrantTotals{});
  std::map<std::string, std::uint64_t> remediation_counts;
  for (auto r : {Remediation::Revoke, Remediation::AssetTransfer, Remediation::None})
    remediation_counts[std::string(to_string(r))] = 0;
  if (remediation)
    for (const auto& r : *remediation) ++remediation_counts[std::string(to_string(r.remediation))];
  const std::uint64_t remediation_total = remediation ? remediation->size() : 0;
  std::optional<GasSummary> gas;
  if (attacks) gas = poisoning_gas_total(*attacks);

  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };

  if (format == "json") {
    ordered_json j;
    j["categories"] = ordered_json::array();
    for (auto s : kAllSubCategories) {
      const auto& c = table.by_sub_category.at(s);
      j["categories"].push_back({{"category", to_string(category_of(s))}, {"subCategory", to_string(s)},
                                 {"rule", rule_id(s)}, {"count", c.count}, {"lossUsd", c.loss.str()},
                                 {"unpriced", c.unpriced}});
    }
    j["total"] = {{"count", table.total.count}, {"lossUsd", table.total.loss.str()}};
    j["dailyLoss"] = ordered_json::array();
    for (const auto& [day, c] : days) j["dailyLoss"].push_back({{"date", day}, {"count", c.count}, {"lossUsd", c.loss.str()}});
    j["grantShare"] = {{"approveCalls", share.approve_calls}, {"phishingApproves", share.phishing_approves},
                       {"approveSharePercent", percent_text(share.phishing_approves, share.approve_calls)},
                       {"permitCalls", share.permit_calls}, {"phishingPermits", share.phishing_permits},
                       {"permitSharePercent", percent_text(share.phishing_permits, share.permit_calls)}};
    j["remediation"] = ordered_json::array();
    for (const auto& [kind, n] : remediation_counts)
      j["remediation"].push_back({{"remediation", kind}, {"count", n}, {"percent", percent_text(n, remediation_total)}});
    if (sales) j["nftSales"] = ordered_json::parse(encode_nft_sales(*sales));
    if (gas) {
      j["poisoningGas"] = {{"totalWei", gas->total_wei.str()}, {"totalEth", gas->total_eth()}, {"daily", ordered_json::array()}};
      for (const auto& [day, wei] : gas->per_day_wei)
        j["poisoningGas"]["daily"].push_back({{"date", day}, {"wei", wei.str()}, {"eth", format_eth(wei)}});
    }
    open("report.json") << j.dump(2) << '\n';
    return;
  }

  {
    auto out = open("categories.csv");
    out << "category,subCategory,rule,count,lossUsd,unpriced\n";
    for (auto s : kAllSubCategories) {
      const auto& c = table.by_sub_category.at(s);
      out << to_string(category_of(s)) << ',' << to_string(s) << ',' << rule_id(s) << ',' << c.count << ','
          << c.loss.str() << ',' << c.unpriced << '\n';
    }
    out << "Total,,," << table.total.count << ',' << table.total.loss.str() << ',' << table.total.unpriced << '\n';
  }
  {
    auto out = open("daily_loss.csv");
    out << "date,count,lossUsd\n";
    for (const auto& [day, c] : days) out << day << ',' << c.count << ',' << c.loss.str() << '\n';
  }
  {
    auto out = open("grant_share.csv");
    out << "family,grantCalls,phishing,sharePercent\n";
    out << "approve," << share.approve_calls << ',' << share.phishing_approves << ','
        << percent_text(share.phishing_approves, share.approve_calls) << '\n';
    out << "permit," << share.permit_calls << ',' << share.phishing_permits << ','
        << percent_text(share.phishing_permits, share.permit_calls) << '\n';
  }
  {
    auto out = open("remediation.csv");
    out << "remediation,count,percent\n";
    for (const auto& [kind, n] : remediation_counts) out << kind << ',' << n << ',' << percent_text(n, remediation_total) << '\n';
  }
  if (sales) {
    auto out = open("nft_markets.csv");
    out << "market,role,count\n";
    for (const auto& [market, roles] : sales->by_market)
      for (const auto& [role, n] : roles) out << market << ',' << role << ',' << n << '\n';
    out << "(held),," << sales->held << '\n';
  }
  if (gas) {
    auto out = open("poisoning_gas.csv");
    out << "date,gasWei,gasEth\n";
    for (const auto& [day, wei] : gas->per_day_wei) out << day << ',' << wei.str() << ',' << format_eth(wei) << '\n';
  }
}

}  // namespace phishscan::app
