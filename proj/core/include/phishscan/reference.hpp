#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "phishscan/money.hpp"
#include "phishscan/types.hpp"

namespace phishscan {

enum class SelectorClass : std::uint8_t { None, Airdrop, Wallet };

std::string_view to_string(SelectorClass c) noexcept;

enum class MarketAdapter : std::uint8_t {
  Seaport11,
  Seaport12,
  Seaport13,
  Seaport14,
  Blur1,
  Blur2,
  OpenseaHelper,
  OpenseaFactory,
};

std::string_view adapter_id(MarketAdapter a) noexcept;
MarketAdapter parse_adapter(std::string_view id);

struct MarketEntry {
  std::string market;
  MarketAdapter adapter = MarketAdapter::Seaport11;
  friend bool operator==(const MarketEntry&, const MarketEntry&) = default;
};

struct CanonicalToken {
  Address address;
  unsigned decimals = 18;
  friend bool operator==(const CanonicalToken&, const CanonicalToken&) = default;
};

struct TokenMeta {
  std::string symbol;
  unsigned decimals = 18;
  friend bool operator==(const TokenMeta&, const TokenMeta&) = default;
};

/// Canonical permit2 deployment, used when no permit2.csv is supplied.
Address default_permit2_address();

/// Static labels consulted by the rules. Read-only after load.
struct LabelRegistry {
  std::unordered_set<Address> authorized;
  std::unordered_set<Address> cex;
  std::unordered_map<Address, MarketEntry> markets;
  std::map<std::string, CanonicalToken> canonical_tokens;  // by symbol
  std::unordered_map<Selector, std::string> airdrop_selectors;
  std::unordered_map<Selector, std::string> wallet_selectors;
  // Optional extension files.
  std::unordered_map<Address, TokenMeta> token_meta;  // on-chain symbol/decimals per token contract
  std::unordered_set<Address> dex_routers;
  std::unordered_set<Address> permit2_contracts;

  [[nodiscard]] bool is_authorized(const Address& a) const { return authorized.contains(a); }
  [[nodiscard]] bool is_cex(const Address& a) const { return cex.contains(a); }
  [[nodiscard]] bool is_dex(const Address& a) const { return dex_routers.contains(a); }
  [[nodiscard]] const MarketEntry* nft_market(const Address& a) const;
  [[nodiscard]] bool is_permit2(const Address& a) const { return permit2_contracts.contains(a); }

  /// Symbol under which `token` is listed as canonical, if any.
  [[nodiscard]] std::optional<std::string> canonical_symbol_of(const Address& token) const;
  [[nodiscard]] bool is_canonical(const Address& token) const { return canonical_symbol_of(token).has_value(); }
  /// Token whose on-chain symbol equals a canonical symbol while its address differs.
  [[nodiscard]] bool is_fake_token(const Address& token) const;
  [[nodiscard]] std::optional<unsigned> decimals_of(const Address& token) const;

  /// Throws ValidationError if selector classes overlap or decimals exceed 36.
  void validate() const;

  friend bool operator==(const LabelRegistry&, const LabelRegistry&) = default;
};

struct RegistryFiles {
  std::filesystem::path authorized;
  std::filesystem::path cex;
  std::filesystem::path markets;
  std::filesystem::path tokens;
  std::filesystem::path selectors;
  std::optional<std::filesystem::path> symbols;
  std::optional<std::filesystem::path> dex;
  std::optional<std::filesystem::path> permit2;
};

/// Missing required file -> ConfigError; overlapping selector classes -> ValidationError.
LabelRegistry load_registry(const RegistryFiles& files);
/// authorized/cex/markets/tokens/selectors.csv required; symbols/dex/permit2.csv optional.
LabelRegistry load_registry_dir(const std::filesystem::path& dir);

/// Tokens the valuation step prices; every other asset is unpriceable.
const std::vector<std::string>& supported_price_symbols();

/// At-or-before lookup over an append-only series of (block, value) points.
class PointSeries {
public:
  void add(std::uint64_t block, Decimal value);
  /// Value of the last point with block' <= block; nullopt when none.
  [[nodiscard]] std::optional<Decimal> at(std::uint64_t block) const;
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }

private:
  std::vector<std::pair<std::uint64_t, Decimal>> points_;  // sorted by block; later duplicates win
};

class PriceOracle {
public:
  PriceOracle() = default;
  explicit PriceOracle(const LabelRegistry& registry);

  /// prices.csv `token,block,usd`; token is a symbol or a canonical token address.
  void load(const std::filesystem::path& path);
  void add_point(const std::string& symbol, std::uint64_t block, Decimal usd);

  /// USD per whole token. Throws UnpriceableError outside the supported set or before the first point.
  [[nodiscard]] Decimal price_usd(const Address& token, std::uint64_t block) const;
  [[nodiscard]] Decimal native_price_usd(std::uint64_t block) const;
  /// Absent asset = native ETH.
  [[nodiscard]] Decimal price_of(const std::optional<Address>& asset, std::uint64_t block) const;
  [[nodiscard]] unsigned decimals_of(const std::optional<Address>& asset) const;
  [[nodiscard]] bool is_priceable(const std::optional<Address>& asset) const;

private:
  [[nodiscard]] Decimal lookup(const std::string& symbol, std::uint64_t block) const;

  std::unordered_map<Address, std::pair<std::string, unsigned>> tokens_;
  std::map<std::string, PointSeries> series_;
};

class FloorOracle {
public:
  /// floors.csv `collection,block,usd`.
  void load(const std::filesystem::path& path);
  void add_point(const Address& collection, std::uint64_t block, Decimal usd);
  [[nodiscard]] Decimal floor_price_usd(const Address& collection, std::uint64_t block) const;

private:
  std::unordered_map<Address, PointSeries> series_;
};

/// Verified-source membership. Absence means unverified.
class SourceOracle {
public:
  /// verified.csv `address`.
  void load(const std::filesystem::path& path);
  void add(const Address& a) { verified_.insert(a); }
  [[nodiscard]] bool is_verified_source(const Address& contract) const { return verified_.contains(contract); }

private:
  std::unordered_set<Address> verified_;
};

struct ReferenceData {
  LabelRegistry registry;
  PriceOracle prices;
  FloorOracle floors;
  SourceOracle sources;
};

/// Loads the registry plus prices.csv, floors.csv, verified.csv (each optional) from one directory.
ReferenceData load_reference_dir(const std::filesystem::path& dir);

/// Holder for the current immutable reference snapshot; refresh swaps atomically.
class ReferenceSnapshot {
public:
  explicit ReferenceSnapshot(std::shared_ptr<const ReferenceData> initial) : current_(std::move(initial)) {}
  [[nodiscard]] std::shared_ptr<const ReferenceData> current() const { return std::atomic_load(&current_); }
  void replace(std::shared_ptr<const ReferenceData> next) { std::atomic_store(&current_, std::move(next)); }

private:
  std::shared_ptr<const ReferenceData> current_;
};

}  // namespace phishscan
