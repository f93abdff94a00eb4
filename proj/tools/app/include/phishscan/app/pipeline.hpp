#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "phishscan/decoder.hpp"
#include "phishscan/diagnostics.hpp"
#include "phishscan/history.hpp"
#include "phishscan/ingest.hpp"
#include "phishscan/reference.hpp"
#include "phishscan/rules.hpp"

namespace phishscan::app {

struct BlockTiming {
  std::uint64_t number = 0;
  std::size_t tx_count = 0;
  double ms = 0;
};

struct StageTimes {
  double fetch_ms = 0;
  double prepare_ms = 0;
  double detect_ms = 0;
  double append_ms = 0;
  double warmup_ms = 0;
};

/// Grant calls seen in the detection range, by family.
struct GrantTotals {
  std::uint64_t approve_calls = 0;  // approve, increaseAllowance
  std::uint64_t permit_calls = 0;   // permit, permit2
};

struct RunResult {
  std::vector<Verdict> verdicts;      // canonical order
  std::vector<AttackRecord> attacks;  // block then tx order
  std::vector<BlockTiming> blocks;
  StageTimes stages;
  Diagnostics diag;
  GrantTotals grants;
};

struct RunRange {
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  /// Blocks [warm_from, from) are appended to history without detection.
  std::optional<std::uint64_t> warm_from;
};

/// Block loop: fetch ahead, prepare and detect each transaction in parallel against history of
/// earlier blocks, then append the block to history and emit its verdicts in order.
class Pipeline {
public:
  Pipeline(ChainSource& chain, const ReferenceData& ref, const Decoder& decoder, const RuleConfig& cfg,
           HistoryStore& history, unsigned threads);

  using BlockCallback = std::function<void(std::uint64_t block, const std::vector<Verdict>&)>;

  /// An empty range (from > to) is valid and yields nothing.
  RunResult run(const RunRange& range, const BlockCallback& on_block = {});

private:
  ChainSource& chain_;
  const ReferenceData& ref_;
  const Decoder& decoder_;
  const RuleConfig& cfg_;
  HistoryStore& history_;
  unsigned threads_;
};

/// History rows for one prepared block.
void append_to_history(HistoryStore& history, const Block& block, const std::vector<TxFacts>& facts);

/// The grant an ice-phishing verdict relied on, rebuilt from its detail fields.
std::optional<CallRecord> grant_of(const Verdict& v);

struct RemediationRecord {
  Hash32 tx_hash;
  Address victim;
  SubCategory sub_category = SubCategory::Approve;
  Remediation remediation = Remediation::None;
};

std::vector<RemediationRecord> classify_remediations(const std::vector<Verdict>& verdicts,
                                                     const HistoryStore& history, ChainSource& chain,
                                                     const ReferenceData& ref, std::uint64_t horizon);

std::string encode_remediation(const RemediationRecord& r);
RemediationRecord decode_remediation(std::string_view line);

}  // namespace phishscan::app
