#include "phishscan/app/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <deque>
#include <future>

#include "phishscan/app/thread_pool.hpp"
#include "phishscan/errors.hpp"

namespace phishscan::app {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Keeps up to `depth` block fetches in flight ahead of the consumer.
class Prefetcher {
public:
  Prefetcher(ChainSource& chain, std::uint64_t from, std::uint64_t to, unsigned depth)
      : chain_(chain), next_(from), to_(to), depth_(std::max(1u, depth)) {
    fill();
  }
  Block next() {
    auto f = std::move(pending_.front());
    pending_.pop_front();
    fill();
    return f.get();
  }

private:
  void fill() {
    while (pending_.size() < depth_ && next_ <= to_) {
      const std::uint64_t n = next_++;
      pending_.push_back(std::async(std::launch::async, [this, n] { return ingest_block(chain_, n); }));
    }
  }
  ChainSource& chain_;
  std::uint64_t next_;
  std::uint64_t to_;
  unsigned depth_;
  std::deque<std::future<Block>> pending_;
};

std::vector<TxFacts> prepare_block(const Block& b, const ReferenceData& ref, const Decoder& decoder,
                                   ChainSource& chain, ThreadPool& pool) {
  std::vector<TxFacts> facts(b.transactions.size());
  pool.parallel_for(facts.size(), [&](std::size_t i) {
    facts[i] = prepare_tx(b.transactions[i], b.timestamp, ref, decoder, chain);
  });
  return facts;
}

}  // namespace

Pipeline::Pipeline(ChainSource& chain, const ReferenceData& ref, const Decoder& decoder, const RuleConfig& cfg,
                   HistoryStore& history, unsigned threads)
    : chain_(chain), ref_(ref), decoder_(decoder), cfg_(cfg), history_(history), threads_(resolve_threads(threads)) {}

void append_to_history(HistoryStore& history, const Block& block, const std::vector<TxFacts>& facts) {
  std::vector<TransferRecord> transfers;
  std::vector<CallRecord> calls;
  for (const auto& f : facts) {
    for (const auto& e : f.transfers) transfers.push_back(TransferRecord{e, f.tx->from, f.tx->to, f.tx->tx_index});
    if (f.grant && f.tx->succeeded()) calls.push_back(*f.grant);
  }
  history.append_block(block.number, block.timestamp, transfers, calls);
}

RunResult Pipeline::run(const RunRange& range, const BlockCallback& on_block) {
  RunResult out;
  ThreadPool pool(threads_);

  if (range.warm_from && *range.warm_from < range.from) {
    const auto t0 = Clock::now();
    std::uint64_t start = *range.warm_from;
    if (auto up = history_.up_to_block()) start = std::max(start, *up + 1);
    if (start < range.from) {
      Prefetcher fetch(chain_, start, range.from - 1, threads_);
      for (std::uint64_t n = start; n < range.from; ++n) {
        const Block b = fetch.next();
        const auto facts = prepare_block(b, ref_, decoder_, chain_, pool);
        for (const auto& f : facts) out.diag += f.diag;
        append_to_history(history_, b, facts);
      }
    }
    out.stages.warmup_ms = ms_since(t0);
  }
  if (range.from > range.to) return out;
  if (auto up = history_.up_to_block(); up && *up >= range.from)
    throw ConfigError("history already covers block " + std::to_string(*up) + "; start detection at " +
                      std::to_string(*up + 1));

  Prefetcher fetch(chain_, range.from, range.to, threads_);
  for (std::uint64_t n = range.from; n <= range.to; ++n) {
    const auto t_block = Clock::now();
    const Block b = fetch.next();
    out.stages.fetch_ms += ms_since(t_block);

    auto t0 = Clock::now();
    const auto facts = prepare_block(b, ref_, decoder_, chain_, pool);
    out.stages.prepare_ms += ms_since(t0);

    t0 = Clock::now();
    const DetectionContext ctx{ref_, history_, chain_, cfg_, &facts};
    std::vector<std::vector<Verdict>> verdicts(facts.size());
    std::vector<std::vector<AttackRecord>> attacks(facts.size());
    std::vector<Diagnostics> diags(facts.size());
    pool.parallel_for(facts.size(), [&](std::size_t i) {
      verdicts[i] = detect_tx(facts[i], ctx, &diags[i]);
      attacks[i] = detect_poisoning_attack(facts[i], ctx);
    });
    out.stages.detect_ms += ms_since(t0);

    t0 = Clock::now();
    append_to_history(history_, b, facts);
    out.stages.append_ms += ms_since(t0);

    std::vector<Verdict> block_verdicts;
    for (std::size_t i = 0; i < facts.size(); ++i) {
      out.diag += facts[i].diag;
      out.diag += diags[i];
      for (auto& v : verdicts[i]) block_verdicts.push_back(std::move(v));
      for (auto& a : attacks[i]) out.attacks.push_back(std::move(a));
      if (const auto& g = facts[i].grant; g && facts[i].tx->succeeded() && !g->is_revoke()) {
        if (g->kind == GrantKind::Approve || g->kind == GrantKind::IncreaseAllowance) ++out.grants.approve_calls;
        if (g->kind == GrantKind::Permit || g->kind == GrantKind::Permit2) ++out.grants.permit_calls;
      }
    }
    std::stable_sort(block_verdicts.begin(), block_verdicts.end(), verdict_less);
    if (on_block) on_block(n, block_verdicts);
    out.verdicts.insert(out.verdicts.end(), block_verdicts.begin(), block_verdicts.end());
    out.blocks.push_back(BlockTiming{n, b.transactions.size(), ms_since(t_block)});
  }
  return out;
}

std::optional<CallRecord> grant_of(const Verdict& v) {
  if (v.category != Category::IcePhishing) return std::nullopt;
  const auto token = v.detail.find("grantToken");
  const auto spender = v.detail.find("spender");
  if (token == v.detail.end() || spender == v.detail.end()) return std::nullopt;
  CallRecord c;
  c.owner = v.victim;
  c.token = Address::from_hex(token->second);
  c.grantee = Address::from_hex(spender->second);
  if (auto tx = v.detail.find("grantTx"); tx != v.detail.end()) c.tx_hash = Hash32::from_hex(tx->second);
  if (auto b = v.detail.find("grantBlock"); b != v.detail.end()) c.block_number = std::stoull(b->second);
  return c;
}

std::vector<RemediationRecord> classify_remediations(const std::vector<Verdict>& verdicts,
                                                     const HistoryStore& history, ChainSource& chain,
                                                     const ReferenceData& ref, std::uint64_t horizon) {
  std::vector<RemediationRecord> out;
  for (const auto& v : verdicts) {
    const auto grant = grant_of(v);
    if (!grant) continue;
    out.push_back(RemediationRecord{v.tx_hash, v.victim, v.sub_category,
                                    classify_remediation(v.victim, *grant, v, history, chain, ref, horizon)});
  }
  return out;
}

std::string encode_remediation(const RemediationRecord& r) {
  nlohmann::ordered_json j;
  j["txHash"] = r.tx_hash.hex();
  j["victim"] = r.victim.hex();
  j["subCategory"] = std::string(to_string(r.sub_category));
  j["remediation"] = std::string(to_string(r.remediation));
  return j.dump();
}

RemediationRecord decode_remediation(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    return RemediationRecord{Hash32::from_hex(j.at("txHash").get<std::string>()),
                             Address::from_hex(j.at("victim").get<std::string>()),
                             parse_sub_category(j.at("subCategory").get<std::string>()),
                             parse_remediation(j.at("remediation").get<std::string>())};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("remediation record: ") + e.what());
  }
}

}  // namespace phishscan::app
