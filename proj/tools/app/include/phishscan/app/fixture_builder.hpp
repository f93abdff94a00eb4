#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "phishscan/abi.hpp"
#include "phishscan/ingest.hpp"
#include "phishscan/reference.hpp"

namespace phishscan::app {

/// Mainnet addresses of the priced tokens.
struct TokenInfo {
  std::string symbol;
  Address address;
  unsigned decimals;
};
const std::vector<TokenInfo>& mainnet_tokens();
const TokenInfo& mainnet_token(const std::string& symbol);

/// Airdrop and wallet selectors commonly abused by payable scams.
struct SelectorRow {
  std::string selector;
  std::string cls;
  std::string name;
};
const std::vector<SelectorRow>& scam_selectors();

// Log and calldata helpers.
Log erc20_transfer_log(const Address& token, const Address& from, const Address& to, const U256& amount);
Log erc721_transfer_log(const Address& collection, const Address& from, const Address& to, const U256& id);
Log approval_log(const Address& token, const Address& owner, const Address& spender, const U256& amount);
Log approval_for_all_log(const Address& collection, const Address& owner, const Address& op, bool approved);
Bytes token_call(const std::string& name, const std::vector<abi::Value>& args);
Bytes signature_call(const std::string& signature, const std::vector<abi::Value>& args);

/// In-memory fixture directory: registry, reference prices, chain blocks and state.
/// Balances are simulated from initial holdings plus the transfer events of every block.
class FixtureBuilder {
public:
  explicit FixtureBuilder(std::uint64_t first_block = 1, std::uint64_t first_timestamp = 1'700'000'000,
                          std::uint64_t block_seconds = 12);

  // Registry.
  std::vector<Address> authorized, cex, dex, permit2, verified, code;
  std::vector<std::tuple<Address, std::string, MarketAdapter>> markets;
  std::vector<TokenInfo> tokens;                                    // canonical
  std::vector<std::tuple<Address, std::string, unsigned>> symbols;  // other token contracts
  std::vector<SelectorRow> selectors;
  std::vector<std::tuple<std::string, std::uint64_t, std::string>> prices;  // symbol, block, usd
  std::vector<std::tuple<Address, std::uint64_t, std::string>> floors;
  std::vector<std::pair<Address, Address>> proxies;  // proxy, owner

  /// Holdings in place before the first block. erc721 holdings count tokens.
  void hold(const std::optional<Address>& token, const Address& holder, const BigInt& amount);

  /// Appends an empty block and returns its number.
  std::uint64_t add_block();
  std::uint64_t first_block() const noexcept { return first_block_; }
  std::uint64_t block_count() const noexcept { return blocks_.size(); }
  /// Appends a transaction to block `number`; fills in block number and index.
  Transaction& add_tx(std::uint64_t number, Transaction tx);
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::vector<Block>& blocks() noexcept { return blocks_; }

  /// Writes blocks.jsonl, balances.csv, code.csv, proxies.csv and registry/.
  void write(const std::filesystem::path& dir) const;

private:
  std::uint64_t first_block_;
  std::uint64_t first_timestamp_;
  std::uint64_t block_seconds_;
  std::vector<Block> blocks_;
  std::map<std::pair<std::string, Address>, BigInt> initial_;  // key: token hex ("" = native)
};

}  // namespace phishscan::app
