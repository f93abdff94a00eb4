#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "phishscan/diagnostics.hpp"
#include "phishscan/model.hpp"

namespace phishscan {

struct Block {
  std::uint64_t number = 0;
  std::uint64_t timestamp = 0;
  std::vector<Transaction> transactions;  // ordered by tx index, contiguous from 0

  friend bool operator==(const Block&, const Block&) = default;
};

struct BalanceKey {
  std::optional<Address> token;  // absent = native
  Address holder;
  std::uint64_t block_number = 0;
};

/// topic0 of ERC-20/ERC-721 Transfer(address,address,uint256).
const Hash32& transfer_topic();
/// topic0 of ERC-1155 TransferSingle / TransferBatch.
const Hash32& transfer_single_topic();
const Hash32& transfer_batch_topic();

/// Native value movement plus one event per Transfer-shaped log, in log order.
/// Failed transactions yield nothing. Malformed logs are skipped and tallied.
std::vector<TransferEvent> extract_transfers(const Transaction& tx, Diagnostics* diag = nullptr);

/// Chain data access; implementations must be safe for concurrent readers.
class ChainSource {
public:
  virtual ~ChainSource() = default;

  /// Throws NotFoundError for missing blocks, TransportError for retryable failures.
  virtual Block block(std::uint64_t number) = 0;
  /// Balance in the pre-state of key.block_number. Throws UnavailableError.
  virtual U256 balance_of(const BalanceKey& key) = 0;
  virtual bool has_code(const Address& account) = 0;
  /// Owner of an upgradeable marketplace proxy, if known.
  virtual std::optional<Address> proxy_owner(const Address& proxy) = 0;
  /// Inclusive block range the source can serve, when known up front.
  virtual std::optional<std::pair<std::uint64_t, std::uint64_t>> block_range() { return std::nullopt; }
  /// Block containing a transaction, if the source can locate it.
  virtual std::optional<std::uint64_t> block_of_tx(const Hash32& /*hash*/) { return std::nullopt; }
};

/// Fetches a block, retrying transport failures; validates ordering invariants.
Block ingest_block(ChainSource& source, std::uint64_t number, int attempts = 3);

/// Reads a fixture directory:
///   blocks.jsonl (one block per line), balances.csv `token,holder,block,amount`,
///   code.csv `address`, proxies.csv `proxy,owner`. Only blocks.jsonl is required.
class FixtureSource final : public ChainSource {
public:
  static std::unique_ptr<FixtureSource> open(const std::filesystem::path& dir);
  FixtureSource() = default;

  void add_block(Block b);
  void set_balance(const std::optional<Address>& token, const Address& holder, std::uint64_t block, U256 amount);
  void add_code(const Address& a) { code_.insert(a); }
  void set_proxy_owner(const Address& proxy, const Address& owner) { proxies_[proxy] = owner; }

  Block block(std::uint64_t number) override;
  U256 balance_of(const BalanceKey& key) override;
  bool has_code(const Address& account) override { return code_.contains(account); }
  std::optional<Address> proxy_owner(const Address& proxy) override;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> block_range() override;

  std::optional<std::uint64_t> block_of_tx(const Hash32& hash) override;

  [[nodiscard]] std::size_t block_count() const noexcept { return blocks_.size(); }

private:
  struct BalanceSeries {
    std::vector<std::pair<std::uint64_t, U256>> points;  // sorted by block
  };
  struct HolderKey {
    std::optional<Address> token;
    Address holder;
    friend bool operator==(const HolderKey&, const HolderKey&) = default;
  };
  struct HolderKeyHash {
    std::size_t operator()(const HolderKey& k) const noexcept;
  };

  std::map<std::uint64_t, Block> blocks_;
  std::unordered_map<Hash32, std::uint64_t> tx_index_;
  std::unordered_map<HolderKey, BalanceSeries, HolderKeyHash> balances_;
  std::unordered_set<Address> code_;
  std::unordered_map<Address, Address> proxies_;
};

/// Standard EVM JSON-RPC endpoint (http://host:port/path).
class JsonRpcSource final : public ChainSource {
public:
  explicit JsonRpcSource(std::string url, int timeout_seconds = 10);
  ~JsonRpcSource() override;

  Block block(std::uint64_t number) override;
  U256 balance_of(const BalanceKey& key) override;
  bool has_code(const Address& account) override;
  std::optional<Address> proxy_owner(const Address& proxy) override;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> block_range() override;
  std::optional<std::uint64_t> block_of_tx(const Hash32& hash) override;

  /// Throws TransportError when the endpoint cannot be reached.
  void ping();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Fixture line format: {"number","timestamp","txs":[{hash,from,to,valueWei,input,status,gasUsed,
/// effectiveGasPriceWei,logs:[{address,topics,data}]}]}.
Block parse_block_json(std::string_view line);
std::string encode_block_json(const Block& block);

}  // namespace phishscan
