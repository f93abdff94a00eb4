#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phishscan/decoder.hpp"
#include "phishscan/diagnostics.hpp"
#include "phishscan/history.hpp"
#include "phishscan/ingest.hpp"
#include "phishscan/reference.hpp"
#include "phishscan/similarity.hpp"

namespace phishscan {

struct RuleConfig {
  Decimal drain_ratio = Decimal::from_integer(1);
  Decimal dust_max_usd = Decimal::parse("0.01");
  U256 free_order_max_price_wei = 0;
  SimilarityConfig similarity;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  /// Stable JSON rendering; the basis of the run configuration hash.
  [[nodiscard]] std::string to_json() const;
  /// Accepts any subset of drainRatio, dustMaxUsd, freeOrderMaxPriceWei, prefixNibbles, suffixNibbles.
  static RuleConfig from_json(std::string_view text);

  friend bool operator==(const RuleConfig&, const RuleConfig&) = default;
};

enum class PoisonKind : std::uint8_t { ZeroValue, FakeToken, DustValue };

std::string_view to_string(PoisonKind k) noexcept;
PoisonKind parse_poison_kind(std::string_view text);

/// A transaction that plants look-alike records in other addresses' histories.
struct AttackRecord {
  Hash32 tx_hash;
  std::uint64_t block_number = 0;
  std::uint64_t timestamp = 0;
  Address attacker;
  PoisonKind kind = PoisonKind::ZeroValue;
  std::vector<Address> poisoned_victims;
  std::uint64_t gas_used = 0;
  U256 effective_gas_price_wei = 0;

  friend bool operator==(const AttackRecord&, const AttackRecord&) = default;
};

std::string encode_attack(const AttackRecord& r);
AttackRecord decode_attack(std::string_view json_line);

/// Per-transaction inputs the detectors read, computed ahead of detection.
struct TxFacts {
  const Transaction* tx = nullptr;
  std::uint64_t timestamp = 0;
  std::vector<TransferEvent> transfers;
  std::optional<DecodedCall> token_call;
  std::optional<CallRecord> grant;  // token_call normalized, when it grants or revokes
  std::optional<MarketCall> market_call;
  bool to_has_code = false;
  Diagnostics diag;
};

/// Everything a detector may consult. History covers blocks strictly before the one inspected.
struct DetectionContext {
  const ReferenceData& ref;
  const HistoryStore& history;
  ChainSource& chain;
  const RuleConfig& cfg;
  /// Facts of the inspected block, indexed by tx index; lets a grant earlier in the same block count.
  const std::vector<TxFacts>* block = nullptr;
};

/// Extracts transfers, decodes calldata, and prefetches code presence for one transaction.
TxFacts prepare_tx(const Transaction& tx, std::uint64_t timestamp, const ReferenceData& ref, const Decoder& decoder,
                   ChainSource& chain);

std::vector<Verdict> detect_ice(const TxFacts& f, const DetectionContext& ctx, Diagnostics* diag = nullptr);
std::vector<Verdict> detect_nft_order(const TxFacts& f, const DetectionContext& ctx);
std::vector<Verdict> detect_poisoning_victim(const TxFacts& f, const DetectionContext& ctx);
std::vector<Verdict> detect_payable(const TxFacts& f, const DetectionContext& ctx);
std::vector<AttackRecord> detect_poisoning_attack(const TxFacts& f, const DetectionContext& ctx);

/// Runs ice, nft-order, poisoning-victim and payable detectors, values losses, and returns the
/// verdicts in canonical order.
std::vector<Verdict> detect_tx(const TxFacts& f, const DetectionContext& ctx, Diagnostics* diag = nullptr);

/// True when `token` transfers are worth less than the dust threshold (or, unpriceable, < 0.01 whole tokens).
bool is_dust(const TransferEvent& e, const DetectionContext& ctx);

enum class Remediation : std::uint8_t { Revoke, AssetTransfer, None };

std::string_view to_string(Remediation r) noexcept;
Remediation parse_remediation(std::string_view text);

/// Victim response after an ice-phishing theft, looking at blocks (theft, horizon].
Remediation classify_remediation(const Address& victim, const CallRecord& grant, const Verdict& theft,
                                 const HistoryStore& history, ChainSource& chain, const ReferenceData& ref,
                                 std::uint64_t horizon);

}  // namespace phishscan
