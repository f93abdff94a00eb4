#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "phishscan/model.hpp"
#include "phishscan/similarity.hpp"

namespace phishscan {

enum class GrantKind : std::uint8_t { Approve, IncreaseAllowance, Permit, Permit2, SetApprovalForAll };

std::string_view to_string(GrantKind k) noexcept;

/// Bit set over GrantKind.
class GrantKinds {
public:
  constexpr GrantKinds() = default;
  constexpr GrantKinds(std::initializer_list<GrantKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }
  static constexpr GrantKinds all() {
    return {GrantKind::Approve, GrantKind::IncreaseAllowance, GrantKind::Permit, GrantKind::Permit2,
            GrantKind::SetApprovalForAll};
  }
  constexpr void insert(GrantKind k) { bits_ |= bit(k); }
  [[nodiscard]] constexpr bool contains(GrantKind k) const { return (bits_ & bit(k)) != 0; }

private:
  static constexpr std::uint8_t bit(GrantKind k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

/// An allowance-granting (or revoking) call, normalized from approve-family calldata.
struct CallRecord {
  Hash32 tx_hash;
  std::uint64_t block_number = 0;
  std::uint32_t tx_index = 0;
  GrantKind kind = GrantKind::Approve;
  Address owner;      // whose assets the grant covers
  Address grantee;    // spender / operator
  Address token;      // token or collection contract
  U256 amount = 0;    // allowance; unused for setApprovalForAll
  bool approved = true;  // setApprovalForAll flag
  Address submitter;  // tx.from

  /// approve(·,0), permit of 0, or setApprovalForAll(·,false).
  [[nodiscard]] bool is_revoke() const;
  friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

/// Grant record for a decoded approve-family call; absent for other calls.
std::optional<CallRecord> call_record_from(const Transaction& tx, const DecodedCall& call);

/// A transfer event together with the transaction sender that caused it.
struct TransferRecord {
  TransferEvent event;
  Address initiator;
  std::optional<Address> tx_to;  // contract or account the transaction called
  std::uint32_t tx_index = 0;

  friend bool operator==(const TransferRecord&, const TransferRecord&) = default;
};

/// Chronological order: block, tx index, log index (native first).
bool record_before(const TransferRecord& a, const TransferRecord& b);

struct HistoryOptions {
  /// Queries at `upTo` only see blocks in (upTo - lookback, upTo]. Absent = unbounded.
  std::optional<std::uint64_t> lookback_blocks;
  /// Write snapshot metadata every K appended blocks.
  std::uint64_t snapshot_interval = 10'000;
};

struct SnapshotMeta {
  std::uint64_t up_to_block = 0;
  std::uint64_t event_count = 0;  // transfers plus calls
  std::uint64_t checksum = 0;  // FNV-1a 64 over the first log_bytes of the log
  std::uint64_t log_bytes = 0;
};

/// Per-address transfer and grant index, appended one block at a time.
/// One writer; any number of concurrent readers. A block becomes visible atomically.
class HistoryStore {
public:
  explicit HistoryStore(HistoryOptions options = {});
  ~HistoryStore();
  HistoryStore(const HistoryStore&) = delete;
  HistoryStore& operator=(const HistoryStore&) = delete;

  /// Opens (or creates) a persistent store in `dir`, replaying history.log.
  /// A torn trailing block is truncated; a log that disagrees with snapshot.json is a ValidationError.
  static std::unique_ptr<HistoryStore> open(const std::filesystem::path& dir, HistoryOptions options = {});

  /// Requires number = up_to_block() + 1 unless the store is empty; otherwise SequencingError.
  void append_block(std::uint64_t number, std::uint64_t timestamp, const std::vector<TransferRecord>& transfers,
                    const std::vector<CallRecord>& calls);
  /// Forces snapshot metadata and log contents to disk.
  void flush();

  [[nodiscard]] std::optional<std::uint64_t> up_to_block() const;
  [[nodiscard]] std::uint64_t event_count() const;
  [[nodiscard]] std::uint64_t call_count() const;
  [[nodiscard]] std::optional<std::uint64_t> timestamp_of(std::uint64_t block) const;

  /// Most recent non-revoking grant of one of `kinds` by `owner` to `grantee` at block <= upTo.
  [[nodiscard]] std::optional<CallRecord> find_grant(const Address& owner, const Address& grantee, GrantKinds kinds,
                                                     std::uint64_t up_to) const;
  /// Earliest transfer with from = sender and to = dest at block <= upTo. Forged transferFrom records count.
  [[nodiscard]] std::optional<TransferRecord> find_prior_transfer_to(const Address& sender, const Address& dest,
                                                                     std::uint64_t up_to) const;
  /// Highest-amount transfer from `sender` with amount > 0 to an address similar to, but distinct
  /// from, `fake_dest`; ties go to the earliest.
  [[nodiscard]] std::optional<TransferRecord> find_genuine_similar_transfer(const Address& sender,
                                                                            const Address& fake_dest,
                                                                            std::uint64_t up_to,
                                                                            const SimilarityConfig& cfg) const;

  /// All transfers between a and b in either direction, chronological.
  [[nodiscard]] std::vector<TransferRecord> transfers_between(const Address& a, const Address& b,
                                                              std::uint64_t up_to) const;
  /// Chronological transfers touching `account` within [from_block, to_block].
  [[nodiscard]] std::vector<TransferRecord> transfers_of(const Address& account, std::uint64_t from_block,
                                                         std::uint64_t to_block) const;
  /// Chronological grant/revoke calls by `owner` within [from_block, to_block].
  [[nodiscard]] std::vector<CallRecord> calls_of(const Address& owner, std::uint64_t from_block,
                                                 std::uint64_t to_block) const;
  /// Block of the first transfer or call touching `account`, if any.
  [[nodiscard]] std::optional<std::uint64_t> first_seen(const Address& account) const;
  /// Every stored transfer, chronological.
  [[nodiscard]] std::vector<TransferRecord> all_transfers() const;
  /// Every stored call, chronological.
  [[nodiscard]] std::vector<CallRecord> all_calls() const;

  /// Reads snapshot.json from a store directory.
  static std::optional<SnapshotMeta> read_snapshot(const std::filesystem::path& dir);

private:
  struct PairKey {
    Address a, b;
    friend bool operator==(const PairKey&, const PairKey&) = default;
  };
  struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const noexcept;
  };

  void apply_block_locked(std::uint64_t number, std::uint64_t timestamp, const std::vector<TransferRecord>& transfers,
                          const std::vector<CallRecord>& calls);
  void write_snapshot_locked();
  [[nodiscard]] std::uint64_t window_start(std::uint64_t up_to) const;

  HistoryOptions options_;
  mutable std::shared_mutex mutex_;

  std::optional<std::uint64_t> up_to_;
  std::vector<TransferRecord> events_;
  std::vector<CallRecord> calls_;
  std::unordered_map<Address, std::vector<std::uint32_t>> touching_;  // events by either endpoint
  std::unordered_map<PairKey, std::vector<std::uint32_t>, PairKeyHash> directed_;
  std::unordered_map<Address, std::vector<Address>> destinations_;  // distinct, in first-seen order
  std::unordered_map<PairKey, std::vector<std::uint32_t>, PairKeyHash> grants_;
  std::unordered_map<Address, std::vector<std::uint32_t>> calls_by_owner_;
  std::unordered_map<Address, std::uint64_t> first_seen_;
  std::map<std::uint64_t, std::uint64_t> timestamps_;

  // Persistence (absent for in-memory stores).
  std::optional<std::filesystem::path> dir_;
  std::FILE* log_ = nullptr;
  std::uint64_t log_bytes_ = 0;
  std::uint64_t checksum_ = 0;
  std::uint64_t blocks_since_snapshot_ = 0;
};

}  // namespace phishscan
