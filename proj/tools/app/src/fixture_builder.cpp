#include "phishscan/app/fixture_builder.hpp"

#include <fstream>

#include "phishscan/decoder.hpp"
#include "phishscan/errors.hpp"
#include "phishscan/keccak.hpp"

namespace phishscan::app {

namespace fs = std::filesystem;

const std::vector<TokenInfo>& mainnet_tokens() {
  static const std::vector<TokenInfo> t = {
      {"USDT", normalize_address("0xdAC17F958D2ee523a2206206994597C13D831ec7"), 6},
      {"USDC", normalize_address("0xA0b86991c6218b36c1d19D4a2e9Eb0cE3606eB48"), 6},
      {"DAI", normalize_address("0x6B175474E89094C44Da98b954EedeAC495271d0F"), 18},
      {"WETH", normalize_address("0xC02aaA39b223FE8D0A0e5C4F27eAD9083C756Cc2"), 18},
      {"stETH", normalize_address("0xae7ab96520DE3A18E5e111B5EaAb095312D7fE84"), 18},
      {"WBTC", normalize_address("0x2260FAC5E5542a773Aa44fBCfeDf7C193bc2C599"), 8},
      {"BUSD", normalize_address("0x4Fabb145d64652a948d72533023f6E7A623C7C53"), 18},
  };
  return t;
}

const TokenInfo& mainnet_token(const std::string& symbol) {
  for (const auto& t : mainnet_tokens())
    if (t.symbol == symbol) return t;
  throw NotFoundError("no mainnet token " + symbol);
}

const std::vector<SelectorRow>& scam_selectors() {
  static const std::vector<SelectorRow> s = {
      {"0x5fba79f5", "Wallet", "SecurityUpdate"}, {"0xaf347b61", "Wallet", "SecurityUpdate"},
      {"0x62929a1e", "Wallet", "ConnectWallet"},  {"0x9c9316c5", "Wallet", "NetworkMerge"},
      {"0x1b9265b8", "Wallet", "pay"},            {"0x4e71d92d", "Airdrop", "claim"},
      {"0x3158952e", "Airdrop", "Claim"},         {"0xaad3ec96", "Airdrop", "claim"},
      {"0x0c7ef932", "Airdrop", "claim"},         {"0xb88a802f", "Airdrop", "claimReward"},
      {"0x79372f9a", "Airdrop", "claimReward"},   {"0xaf7ec6cb", "Airdrop", "claimReward"},
      {"0x63e32091", "Airdrop", "claimReward"},   {"0xef5cfb8c", "Airdrop", "claimRewards"},
      {"0x4185f8eb", "Airdrop", "receiveETH"},
  };
  return s;
}

namespace {

Hash32 topic_of(std::string_view event) { return keccak256(event); }

Hash32 address_topic(const Address& a) {
  Hash32 h;
  std::copy(a.bytes().begin(), a.bytes().end(), h.bytes().begin() + 12);
  return h;
}

Hash32 word_topic(const U256& v) { return Hash32::from_span(u256_to_be(v)); }

Bytes word(const U256& v) {
  const auto w = u256_to_be(v);
  return Bytes(w.begin(), w.end());
}

std::string token_key(const std::optional<Address>& t) { return t ? t->hex() : std::string(); }

}  // namespace

Log erc20_transfer_log(const Address& token, const Address& from, const Address& to, const U256& amount) {
  return Log{token, {topic_of("Transfer(address,address,uint256)"), address_topic(from), address_topic(to)}, word(amount)};
}

Log erc721_transfer_log(const Address& collection, const Address& from, const Address& to, const U256& id) {
  return Log{collection,
             {topic_of("Transfer(address,address,uint256)"), address_topic(from), address_topic(to), word_topic(id)},
             {}};
}

Log approval_log(const Address& token, const Address& owner, const Address& spender, const U256& amount) {
  return Log{token, {topic_of("Approval(address,address,uint256)"), address_topic(owner), address_topic(spender)},
             word(amount)};
}

Log approval_for_all_log(const Address& collection, const Address& owner, const Address& op, bool approved) {
  return Log{collection, {topic_of("ApprovalForAll(address,address,bool)"), address_topic(owner), address_topic(op)},
             word(approved ? 1 : 0)};
}

Bytes token_call(const std::string& name, const std::vector<abi::Value>& args) {
  return Decoder::token_function(name).encode_call(args);
}

Bytes signature_call(const std::string& signature, const std::vector<abi::Value>& args) {
  return abi::parse_function(signature).encode_call(args);
}

FixtureBuilder::FixtureBuilder(std::uint64_t first_block, std::uint64_t first_timestamp, std::uint64_t block_seconds)
    : first_block_(first_block), first_timestamp_(first_timestamp), block_seconds_(block_seconds) {}

void FixtureBuilder::hold(const std::optional<Address>& token, const Address& holder, const BigInt& amount) {
  initial_[{token_key(token), holder}] += amount;
}

std::uint64_t FixtureBuilder::add_block() {
  Block b;
  b.number = first_block_ + blocks_.size();
  b.timestamp = first_timestamp_ + blocks_.size() * block_seconds_;
  blocks_.push_back(std::move(b));
  return blocks_.back().number;
}

Transaction& FixtureBuilder::add_tx(std::uint64_t number, Transaction tx) {
  if (number < first_block_ || number - first_block_ >= blocks_.size())
    throw NotFoundError("block " + std::to_string(number) + " not in builder");
  Block& b = blocks_[number - first_block_];
  tx.block_number = number;
  tx.tx_index = static_cast<std::uint32_t>(b.transactions.size());
  b.transactions.push_back(std::move(tx));
  return b.transactions.back();
}

namespace {

void write_lines(const fs::path& path, const std::string& header, const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
}

std::vector<std::string> address_rows(const std::vector<Address>& list) {
  std::vector<std::string> rows;
  for (const auto& a : list) rows.push_back(a.hex());
  return rows;
}

}  // namespace

void FixtureBuilder::write(const fs::path& dir) const {
  fs::create_directories(dir / "registry");
  const fs::path reg = dir / "registry";

  write_lines(reg / "authorized.csv", "address", address_rows(authorized));
  write_lines(reg / "cex.csv", "address", address_rows(cex));
  write_lines(reg / "dex.csv", "address", address_rows(dex));
  write_lines(reg / "permit2.csv", "address", address_rows(permit2));
  write_lines(reg / "verified.csv", "address", address_rows(verified));
  {
    std::vector<std::string> rows;
    for (const auto& [a, name, adapter] : markets) rows.push_back(a.hex() + "," + name + "," + std::string(adapter_id(adapter)));
    write_lines(reg / "markets.csv", "address,market,adapter", rows);
  }
  {
    std::vector<std::string> rows;
    for (const auto& t : tokens) rows.push_back(t.symbol + "," + t.address.hex() + "," + std::to_string(t.decimals));
    write_lines(reg / "tokens.csv", "symbol,address,decimals", rows);
  }
  {
    std::vector<std::string> rows;
    for (const auto& [a, sym, dec] : symbols) rows.push_back(a.hex() + "," + sym + "," + std::to_string(dec));
    write_lines(reg / "symbols.csv", "address,symbol,decimals", rows);
  }
  {
    std::vector<std::string> rows;
    for (const auto& s : selectors) rows.push_back(s.selector + "," + s.cls + "," + s.name);
    write_lines(reg / "selectors.csv", "selector,class,name", rows);
  }
  {
    std::vector<std::string> rows;
    for (const auto& [sym, block, usd] : prices) rows.push_back(sym + "," + std::to_string(block) + "," + usd);
    write_lines(reg / "prices.csv", "token,block,usd", rows);
  }
  {
    std::vector<std::string> rows;
    for (const auto& [c, block, usd] : floors) rows.push_back(c.hex() + "," + std::to_string(block) + "," + usd);
    write_lines(reg / "floors.csv", "collection,block,usd", rows);
  }

  {
    std::ofstream out(dir / "blocks.jsonl", std::ios::binary);
    if (!out) throw ConfigError("cannot write blocks.jsonl");
    for (const auto& b : blocks_) out << encode_block_json(b) << '\n';
  }
  write_lines(dir / "code.csv", "address", address_rows(code));
  {
    std::vector<std::string> rows;
    for (const auto& [p, o] : proxies) rows.push_back(p.hex() + "," + o.hex());
    write_lines(dir / "proxies.csv", "proxy,owner", rows);
  }

  // Balance rows give the pre-state of each block at which a holding changed.
  std::map<std::pair<std::string, Address>, BigInt> ledger = initial_;
  std::vector<std::string> rows;
  auto emit = [&](const std::pair<std::string, Address>& key, std::uint64_t block) {
    BigInt v = ledger[key];
    if (v < 0) v = 0;
    rows.push_back(key.first + "," + key.second.hex() + "," + std::to_string(block) + "," + v.str());
  };
  for (const auto& [key, amount] : initial_) emit(key, first_block_);
  for (const auto& b : blocks_) {
    std::map<std::pair<std::string, Address>, bool> touched;
    for (const auto& tx : b.transactions) {
      for (const auto& e : extract_transfers(tx)) {
        const std::string t = token_key(e.token);
        const BigInt delta = e.kind == TransferKind::Erc721 ? BigInt(1) : BigInt(e.amount);
        if (!e.from.is_zero()) {
          ledger[{t, e.from}] -= delta;
          touched[{t, e.from}] = true;
        }
        ledger[{t, e.to}] += delta;
        touched[{t, e.to}] = true;
      }
    }
    for (const auto& [key, _] : touched) emit(key, b.number + 1);
  }
  write_lines(dir / "balances.csv", "token,holder,block,amount", rows);
}

}  // namespace phishscan::app
