#include "phishscan/reference.hpp"

#include <algorithm>
#include <cctype>

#include "csv.hpp"

namespace phishscan {

namespace fs = std::filesystem;
using detail::CsvTable;

std::string_view to_string(SelectorClass c) noexcept {
  switch (c) {
    case SelectorClass::None: return "None";
    case SelectorClass::Airdrop: return "Airdrop";
    case SelectorClass::Wallet: return "Wallet";
  }
  return "?";
}

namespace {

constexpr std::pair<MarketAdapter, std::string_view> kAdapterIds[] = {
    {MarketAdapter::Seaport11, "seaport11"},        {MarketAdapter::Seaport12, "seaport12"},
    {MarketAdapter::Seaport13, "seaport13"},        {MarketAdapter::Seaport14, "seaport14"},
    {MarketAdapter::Blur1, "blur1"},                {MarketAdapter::Blur2, "blur2"},
    {MarketAdapter::OpenseaHelper, "openseaHelper"}, {MarketAdapter::OpenseaFactory, "openseaFactory"},
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Address row_address(const CsvTable& t, std::size_t row, const std::string& col) {
  try {
    return normalize_address(t.at(row, col));
  } catch (const ParseError& e) {
    throw ParseError(t.path().string() + ":" + std::to_string(t.line_of(row)) + ": " + e.what());
  }
}

std::uint64_t row_u64(const CsvTable& t, std::size_t row, const std::string& col) {
  const auto& text = t.at(row, col);
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(t.path().string() + ":" + std::to_string(t.line_of(row)) + ": bad integer '" + text + "'");
  }
}

Decimal row_decimal(const CsvTable& t, std::size_t row, const std::string& col) {
  try {
    return Decimal::parse(t.at(row, col));
  } catch (const ParseError& e) {
    throw ParseError(t.path().string() + ":" + std::to_string(t.line_of(row)) + ": " + e.what());
  }
}

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw ConfigError("missing registry file " + p.string());
}

}  // namespace

std::string_view adapter_id(MarketAdapter a) noexcept {
  for (const auto& [adapter, id] : kAdapterIds)
    if (adapter == a) return id;
  return "?";
}

MarketAdapter parse_adapter(std::string_view id) {
  for (const auto& [adapter, name] : kAdapterIds)
    if (name == id) return adapter;
  throw ValidationError("unknown market adapter '" + std::string(id) + "'");
}

Address default_permit2_address() { return normalize_address("0x000000000022D473030F116dDEE9F6B43aC78BA3"); }

const MarketEntry* LabelRegistry::nft_market(const Address& a) const {
  auto it = markets.find(a);
  return it == markets.end() ? nullptr : &it->second;
}

std::optional<std::string> LabelRegistry::canonical_symbol_of(const Address& token) const {
  for (const auto& [symbol, info] : canonical_tokens)
    if (info.address == token) return symbol;
  return std::nullopt;
}

bool LabelRegistry::is_fake_token(const Address& token) const {
  auto it = token_meta.find(token);
  if (it == token_meta.end()) return false;
  const std::string sym = lower(it->second.symbol);
  for (const auto& [symbol, info] : canonical_tokens)
    if (lower(symbol) == sym && info.address != token) return true;
  return false;
}

std::optional<unsigned> LabelRegistry::decimals_of(const Address& token) const {
  for (const auto& [symbol, info] : canonical_tokens)
    if (info.address == token) return info.decimals;
  if (auto it = token_meta.find(token); it != token_meta.end()) return it->second.decimals;
  return std::nullopt;
}

void LabelRegistry::validate() const {
  for (const auto& [sel, name] : airdrop_selectors)
    if (wallet_selectors.contains(sel))
      throw ValidationError("selector " + sel.hex() + " listed as both Airdrop and Wallet");
  for (const auto& [symbol, info] : canonical_tokens)
    if (info.decimals > 36) throw ValidationError("token " + symbol + " has decimals > 36");
  for (const auto& [addr, meta] : token_meta)
    if (meta.decimals > 36) throw ValidationError("token " + addr.hex() + " has decimals > 36");
}

LabelRegistry load_registry(const RegistryFiles& files) {
  for (const auto* p : {&files.authorized, &files.cex, &files.markets, &files.tokens, &files.selectors}) require_file(*p);

  LabelRegistry reg;
  {
    auto t = CsvTable::read(files.authorized, {"address"});
    for (std::size_t r = 0; r < t.rows(); ++r) reg.authorized.insert(row_address(t, r, "address"));
  }
  {
    auto t = CsvTable::read(files.cex, {"address"});
    for (std::size_t r = 0; r < t.rows(); ++r) reg.cex.insert(row_address(t, r, "address"));
  }
  {
    auto t = CsvTable::read(files.markets, {"address", "market", "adapter"});
    for (std::size_t r = 0; r < t.rows(); ++r)
      reg.markets[row_address(t, r, "address")] = MarketEntry{t.at(r, "market"), parse_adapter(t.at(r, "adapter"))};
  }
  {
    auto t = CsvTable::read(files.tokens, {"symbol", "address", "decimals"});
    for (std::size_t r = 0; r < t.rows(); ++r)
      reg.canonical_tokens[t.at(r, "symbol")] =
          CanonicalToken{row_address(t, r, "address"), static_cast<unsigned>(row_u64(t, r, "decimals"))};
  }
  {
    auto t = CsvTable::read(files.selectors, {"selector", "class", "name"});
    for (std::size_t r = 0; r < t.rows(); ++r) {
      Selector sel;
      try {
        sel = Selector::from_hex(lower(t.at(r, "selector")));
      } catch (const ParseError& e) {
        throw ParseError(files.selectors.string() + ":" + std::to_string(t.line_of(r)) + ": " + e.what());
      }
      const auto& cls = t.at(r, "class");
      if (cls == "Airdrop")
        reg.airdrop_selectors[sel] = t.at(r, "name");
      else if (cls == "Wallet")
        reg.wallet_selectors[sel] = t.at(r, "name");
      else
        throw ValidationError(files.selectors.string() + ": unknown selector class '" + cls + "'");
    }
  }
  if (files.symbols && fs::exists(*files.symbols)) {
    auto t = CsvTable::read(*files.symbols, {"address", "symbol"});
    for (std::size_t r = 0; r < t.rows(); ++r) {
      TokenMeta meta{t.at(r, "symbol"), 18};
      if (t.has_column("decimals") && !t.at(r, "decimals").empty())
        meta.decimals = static_cast<unsigned>(row_u64(t, r, "decimals"));
      reg.token_meta[row_address(t, r, "address")] = std::move(meta);
    }
  }
  if (files.dex && fs::exists(*files.dex)) {
    auto t = CsvTable::read(*files.dex, {"address"});
    for (std::size_t r = 0; r < t.rows(); ++r) reg.dex_routers.insert(row_address(t, r, "address"));
  }
  if (files.permit2 && fs::exists(*files.permit2)) {
    auto t = CsvTable::read(*files.permit2, {"address"});
    for (std::size_t r = 0; r < t.rows(); ++r) reg.permit2_contracts.insert(row_address(t, r, "address"));
  } else {
    reg.permit2_contracts.insert(default_permit2_address());
  }
  reg.validate();
  return reg;
}

LabelRegistry load_registry_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("registry directory not found: " + dir.string());
  RegistryFiles files{dir / "authorized.csv", dir / "cex.csv",         dir / "markets.csv",
                      dir / "tokens.csv",     dir / "selectors.csv",   dir / "symbols.csv",
                      dir / "dex.csv",        dir / "permit2.csv"};
  return load_registry(files);
}

const std::vector<std::string>& supported_price_symbols() {
  static const std::vector<std::string> kSymbols = {"ETH", "USDT", "USDC", "DAI", "WETH", "stETH", "WBTC", "BUSD"};
  return kSymbols;
}

namespace {

bool is_supported_symbol(const std::string& s) {
  const auto& list = supported_price_symbols();
  return std::find(list.begin(), list.end(), s) != list.end();
}

}  // namespace

void PointSeries::add(std::uint64_t block, Decimal value) {
  auto it = std::upper_bound(points_.begin(), points_.end(), block,
                             [](std::uint64_t b, const auto& p) { return b < p.first; });
  if (it != points_.begin() && std::prev(it)->first == block) {
    std::prev(it)->second = std::move(value);
    return;
  }
  points_.insert(it, {block, std::move(value)});
}

std::optional<Decimal> PointSeries::at(std::uint64_t block) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), block,
                             [](std::uint64_t b, const auto& p) { return b < p.first; });
  if (it == points_.begin()) return std::nullopt;
  return std::prev(it)->second;
}

PriceOracle::PriceOracle(const LabelRegistry& registry) {
  for (const auto& [symbol, info] : registry.canonical_tokens) tokens_[info.address] = {symbol, info.decimals};
}

void PriceOracle::load(const fs::path& path) {
  auto t = CsvTable::read(path, {"token", "block", "usd"});
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::string symbol = t.at(r, "token");
    if (symbol.rfind("0x", 0) == 0 || symbol.rfind("0X", 0) == 0) {
      const Address a = row_address(t, r, "token");
      auto it = tokens_.find(a);
      if (it == tokens_.end())
        throw ValidationError(path.string() + ":" + std::to_string(t.line_of(r)) + ": price for non-canonical token " +
                              a.hex());
      symbol = it->second.first;
    }
    add_point(symbol, row_u64(t, r, "block"), row_decimal(t, r, "usd"));
  }
}

void PriceOracle::add_point(const std::string& symbol, std::uint64_t block, Decimal usd) {
  series_[symbol].add(block, std::move(usd));
}

Decimal PriceOracle::lookup(const std::string& symbol, std::uint64_t block) const {
  if (!is_supported_symbol(symbol)) throw UnpriceableError(symbol + " is outside the supported price set");
  auto it = series_.find(symbol);
  if (it == series_.end()) throw UnpriceableError("no price series for " + symbol);
  auto p = it->second.at(block);
  if (!p) throw UnpriceableError("no " + symbol + " price at or before block " + std::to_string(block));
  return *p;
}

Decimal PriceOracle::price_usd(const Address& token, std::uint64_t block) const {
  auto it = tokens_.find(token);
  if (it == tokens_.end()) throw UnpriceableError("token " + token.hex() + " is not a canonical token");
  return lookup(it->second.first, block);
}

Decimal PriceOracle::native_price_usd(std::uint64_t block) const { return lookup("ETH", block); }

Decimal PriceOracle::price_of(const std::optional<Address>& asset, std::uint64_t block) const {
  return asset ? price_usd(*asset, block) : native_price_usd(block);
}

unsigned PriceOracle::decimals_of(const std::optional<Address>& asset) const {
  if (!asset) return 18;
  auto it = tokens_.find(*asset);
  return it == tokens_.end() ? 18 : it->second.second;
}

bool PriceOracle::is_priceable(const std::optional<Address>& asset) const {
  if (!asset) return true;
  auto it = tokens_.find(*asset);
  return it != tokens_.end() && is_supported_symbol(it->second.first);
}

void FloorOracle::load(const fs::path& path) {
  auto t = CsvTable::read(path, {"collection", "block", "usd"});
  for (std::size_t r = 0; r < t.rows(); ++r)
    add_point(row_address(t, r, "collection"), row_u64(t, r, "block"), row_decimal(t, r, "usd"));
}

void FloorOracle::add_point(const Address& collection, std::uint64_t block, Decimal usd) {
  series_[collection].add(block, std::move(usd));
}

Decimal FloorOracle::floor_price_usd(const Address& collection, std::uint64_t block) const {
  auto it = series_.find(collection);
  if (it == series_.end()) throw UnpriceableError("no floor price for collection " + collection.hex());
  auto p = it->second.at(block);
  if (!p) throw UnpriceableError("no floor price for " + collection.hex() + " at or before block " + std::to_string(block));
  return *p;
}

void SourceOracle::load(const fs::path& path) {
  auto t = CsvTable::read(path, {"address"});
  for (std::size_t r = 0; r < t.rows(); ++r) verified_.insert(row_address(t, r, "address"));
}

ReferenceData load_reference_dir(const fs::path& dir) {
  ReferenceData data;
  data.registry = load_registry_dir(dir);
  data.prices = PriceOracle(data.registry);
  if (fs::exists(dir / "prices.csv")) data.prices.load(dir / "prices.csv");
  if (fs::exists(dir / "floors.csv")) data.floors.load(dir / "floors.csv");
  if (fs::exists(dir / "verified.csv")) data.sources.load(dir / "verified.csv");
  return data;
}

}  // namespace phishscan
