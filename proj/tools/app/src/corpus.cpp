#include "phishscan/app/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <unordered_set>

#include "phishscan/app/fixture_builder.hpp"
#include "phishscan/decoder.hpp"
#include "phishscan/errors.hpp"
#include "phishscan/keccak.hpp"
#include "phishscan/similarity.hpp"

namespace phishscan::app {

namespace fs = std::filesystem;
using abi::make_address;
using abi::make_bool;
using abi::make_bytes;
using abi::make_list;
using abi::make_uint;
using abi::Value;

namespace {

U256 pow10(unsigned n) {
  U256 v = 1;
  for (unsigned i = 0; i < n; ++i) v *= 10;
  return v;
}

const U256 kEther = pow10(18);
const U256 kMaxU256 = std::numeric_limits<U256>::max();

struct Step {
  Transaction tx;
  std::string kind;
  std::string label;
  std::string scenario{};
};

struct Scenario {
  std::string name;
  std::vector<Step> steps;
};

enum class PoisonStyle { Zero, Fake, Dust };

Value bytes32(std::uint8_t fill) { return make_bytes(Bytes(32, fill)); }
Value signature_bytes() { return make_bytes(Bytes(65, 0x1b)); }

class Generator {
public:
  explicit Generator(const CorpusOptions& o) : opts_(o), rng_(o.seed) { setup_world(); }

  CorpusSummary run(const fs::path& out);

private:
  // Randomness and identities.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_); }
  bool chance(unsigned percent) { return uniform(0, 99) < percent; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[uniform(0, v.size() - 1)]; }

  Address fresh() {
    for (;;) {
      Address a;
      for (auto& b : a.bytes()) b = static_cast<std::uint8_t>(uniform(0, 255));
      if (!a.is_zero() && used_.insert(a).second) return a;
    }
  }
  /// Shares the first and last four nibbles with `g`.
  Address similar_to(const Address& g) {
    for (;;) {
      Address a = g;
      for (std::size_t i = 2; i < 18; ++i) a.bytes()[i] = static_cast<std::uint8_t>(uniform(0, 255));
      if (a != g && addresses_similar(a, g, SimilarityConfig{}) && used_.insert(a).second) return a;
    }
  }
  /// Shares only the last four nibbles with `g`.
  Address suffix_lookalike(const Address& g) {
    for (;;) {
      Address a = fresh();
      a.bytes()[18] = g.bytes()[18];
      a.bytes()[19] = g.bytes()[19];
      a.bytes()[0] = static_cast<std::uint8_t>(g.bytes()[0] ^ 0x80);
      if (!addresses_similar(a, g, SimilarityConfig{}) && used_.insert(a).second) return a;
    }
  }
  Hash32 next_hash() {
    Bytes seed(16);
    std::uint64_t a = opts_.seed, b = hash_counter_++;
    for (int i = 0; i < 8; ++i) {
      seed[i] = static_cast<std::uint8_t>(a >> (8 * i));
      seed[8 + i] = static_cast<std::uint8_t>(b >> (8 * i));
    }
    return keccak256(ByteView(seed));
  }

  Transaction make_tx(const Address& from, const std::optional<Address>& to, const U256& value, Bytes input,
                      std::vector<Log> logs, TxStatus status = TxStatus::Success) {
    Transaction t;
    t.hash = next_hash();
    t.from = from;
    t.to = to;
    t.value_wei = value;
    t.input = std::move(input);
    t.logs = std::move(logs);
    t.status = status;
    t.gas_used = uniform(21'000, 250'000);
    t.effective_gas_price_wei = U256(uniform(8, 60)) * 1'000'000'000u;
    return t;
  }

  // Assets.
  const TokenInfo& any_token() { return pick(fb_.tokens); }
  const TokenInfo& stable_token() { return fb_.tokens[uniform(0, 2)]; }  // USDT, USDC, DAI
  std::uint64_t usd_price(const TokenInfo& t) const {
    if (t.symbol == "WETH" || t.symbol == "stETH") return 2000;
    if (t.symbol == "WBTC") return 30000;
    return 1;
  }
  U256 units_for_usd(const TokenInfo& t, std::uint64_t usd) { return U256(usd) * pow10(t.decimals) / usd_price(t); }
  U256 token_amount(const TokenInfo& t) { return units_for_usd(t, uniform(100, 50'000)); }
  U256 eth(std::uint64_t milli) { return U256(milli) * pow10(15); }
  Address fund(const Address& who, std::uint64_t milli_eth) {
    fb_.hold(std::nullopt, who, BigInt(eth(milli_eth)));
    return who;
  }
  struct Nft {
    Address collection;
    U256 id;
  };
  Nft mint(const Address& owner, bool with_floor = true) {
    const Address c = with_floor ? pick(floored_) : pick(collections_);
    fb_.hold(c, owner, 1);
    return {c, next_token_id_++};
  }

  // Calldata.
  Bytes erc20(const std::string& fn, const std::vector<Value>& args) { return token_call(fn, args); }
  Bytes blur_execute(const Address& market_addr, const Address& seller, const Address& buyer, const Nft& nft,
                     const U256& price, const std::vector<std::pair<std::uint32_t, Address>>& fees);
  Bytes seaport_fulfill(MarketAdapter adapter, bool advanced, const Address& offerer,
                        const std::vector<Value>& offer, const std::vector<Value>& consideration,
                        const Address& recipient);
  Bytes bulk_transfer(const std::vector<Nft>& items, const Address& to);

  MarketAdapter adapter_of(const Address& market) const {
    for (const auto& [a, name, adapter] : fb_.markets)
      if (a == market) return adapter;
    throw NotFoundError("market");
  }
  Address seaport() { return pick(seaports_); }

  void setup_world();
  void remediation_followup(Scenario& s, const Address& victim, std::uint64_t victim_milli_eth,
                            const std::function<Transaction()>& revoke);

  // Positive scenarios.
  Scenario approve_scenario();
  Scenario permit_scenario();
  Scenario set_approval_scenario();
  Scenario bulk_scenario();
  Scenario proxy_scenario();
  Scenario free_order_scenario();
  Scenario poisoning_scenario(PoisonStyle style);
  Scenario payable_scenario(const std::string& cls);
  // Benign and near-miss scenarios; each has one negative probe.
  Scenario benign_scenario(unsigned kind);
  Transaction filler_tx();

  const CorpusOptions& opts_;
  std::mt19937_64 rng_;
  FixtureBuilder fb_;
  Decoder decoder_;
  std::uint64_t hash_counter_ = 0;
  std::unordered_set<Address> used_;
  U256 next_token_id_ = 1;

  Address blur1_, blur2_, helper_, conduit_, blur_delegate_, fee_recipient_, router_, pool_;
  std::vector<Address> seaports_, cex_, scam_contracts_, verified_contracts_, logging_contracts_;
  std::vector<Address> collections_, floored_;
  std::map<std::string, std::vector<Address>> fakes_;  // by symbol
  std::vector<Address> memes_;
  std::vector<SelectorRow> airdrop_, wallet_;
};


void Generator::setup_world() {
  const auto first = fb_.first_block();
  fb_.tokens = mainnet_tokens();
  fb_.selectors = scam_selectors();
  for (const auto& s : fb_.selectors) (s.cls == "Airdrop" ? airdrop_ : wallet_).push_back(s);
  for (const auto& [sym, usd] : std::vector<std::pair<std::string, std::string>>{
           {"ETH", "2000"}, {"WETH", "2000"}, {"stETH", "2000"}, {"WBTC", "30000"},
           {"USDT", "1"}, {"USDC", "1"}, {"DAI", "1"}, {"BUSD", "1"}})
    fb_.prices.emplace_back(sym, first, usd);
  fb_.permit2.push_back(default_permit2_address());

  blur1_ = fresh();
  blur2_ = fresh();
  helper_ = fresh();
  fb_.markets.emplace_back(blur1_, "Blur", MarketAdapter::Blur1);
  fb_.markets.emplace_back(blur2_, "Blur", MarketAdapter::Blur2);
  fb_.markets.emplace_back(helper_, "OpenSea", MarketAdapter::OpenseaHelper);
  for (auto adapter : {MarketAdapter::Seaport11, MarketAdapter::Seaport12, MarketAdapter::Seaport13,
                       MarketAdapter::Seaport14}) {
    seaports_.push_back(fresh());
    fb_.markets.emplace_back(seaports_.back(), "OpenSea", adapter);
  }
  conduit_ = fresh();
  blur_delegate_ = fresh();
  fee_recipient_ = fresh();
  router_ = fresh();
  pool_ = fresh();
  fb_.authorized = {conduit_, blur_delegate_, router_};
  fb_.dex = {router_};
  for (int i = 0; i < 3; ++i) cex_.push_back(fresh());
  fb_.cex = cex_;
  for (const auto& t : fb_.tokens) fb_.hold(t.address, pool_, BigInt(pow10(t.decimals + 9)));

  for (int i = 0; i < 40; ++i) scam_contracts_.push_back(fresh());
  for (int i = 0; i < 10; ++i) verified_contracts_.push_back(fresh());
  for (int i = 0; i < 10; ++i) logging_contracts_.push_back(fresh());
  for (const auto* list : {&scam_contracts_, &verified_contracts_, &logging_contracts_})
    fb_.code.insert(fb_.code.end(), list->begin(), list->end());
  fb_.verified = verified_contracts_;

  for (int i = 0; i < 24; ++i) {
    collections_.push_back(fresh());
    if (i < 20) {
      floored_.push_back(collections_.back());
      fb_.floors.emplace_back(collections_.back(), first, std::to_string(uniform(2, 200) * 100));
    }
  }
  for (const std::string sym : {"USDT", "USDC", "DAI"}) {
    const auto& real = mainnet_token(sym);
    for (int i = 0; i < 10; ++i) {
      fakes_[sym].push_back(fresh());
      fb_.symbols.emplace_back(fakes_[sym].back(), sym, real.decimals);
    }
  }
  for (const std::string sym : {"PEPE2", "MOONX", "SHIBA2", "FLOKI2", "DOGE2"}) {
    memes_.push_back(fresh());
    fb_.symbols.emplace_back(memes_.back(), sym, 18);
  }
}

Bytes Generator::blur_execute(const Address& market_addr, const Address& seller, const Address& buyer, const Nft& nft,
                              const U256& price, const std::vector<std::pair<std::uint32_t, Address>>& fees) {
  const auto& fn = decoder_.market_function(adapter_of(market_addr), "execute");
  auto order = [&](const Address& trader, std::uint8_t side, const std::vector<std::pair<std::uint32_t, Address>>& f) {
    std::vector<Value> fee_items;
    for (const auto& [rate, who] : f) fee_items.push_back(make_list({make_uint(rate), make_address(who)}));
    const Value o = make_list({make_address(trader), make_uint(side), make_address(Address{}), make_address(nft.collection),
                               make_uint(nft.id), make_uint(1), make_address(Address{}), make_uint(price),
                               make_uint(1'700'000'000), make_uint(1'800'000'000), make_list(fee_items),
                               make_uint(uniform(1, 1'000'000)), make_bytes({})});
    return make_list({o, make_uint(27), bytes32(0x11), bytes32(0x22), make_bytes({}), make_uint(0), make_uint(0)});
  };
  return fn.encode_call({order(seller, 1, fees), order(buyer, 0, {})});
}

Bytes Generator::seaport_fulfill(MarketAdapter adapter, bool advanced, const Address& offerer,
                                 const std::vector<Value>& offer, const std::vector<Value>& consideration,
                                 const Address& recipient) {
  const Value params =
      make_list({make_address(offerer), make_address(Address{}), make_list(offer), make_list(consideration), make_uint(0),
                 make_uint(1'700'000'000), make_uint(1'800'000'000), bytes32(0), make_uint(uniform(1, 1'000'000)),
                 bytes32(0), make_uint(consideration.size())});
  if (advanced) {
    const auto& fn = decoder_.market_function(adapter, "fulfillAdvancedOrder");
    const Value order = make_list({params, make_uint(1), make_uint(1), signature_bytes(), make_bytes({})});
    return fn.encode_call({order, make_list({}), bytes32(0), make_address(recipient)});
  }
  const auto& fn = decoder_.market_function(adapter, "fulfillOrder");
  return fn.encode_call({make_list({params, signature_bytes()}), bytes32(0)});
}

Value offer_nft(const Address& collection, const U256& id) {
  return make_list({make_uint(2), make_address(collection), make_uint(id), make_uint(1), make_uint(1)});
}
Value consider_native(const U256& amount, const Address& to) {
  return make_list({make_uint(0), make_address(Address{}), make_uint(0), make_uint(amount), make_uint(amount), make_address(to)});
}

Bytes Generator::bulk_transfer(const std::vector<Nft>& items, const Address& to) {
  const auto& fn = decoder_.market_function(MarketAdapter::OpenseaHelper, "bulkTransfer");
  std::vector<Value> list;
  for (const auto& n : items)
    list.push_back(make_list({make_uint(2), make_address(n.collection), make_uint(n.id), make_uint(1)}));
  return fn.encode_call({make_list({make_list({make_list(list), make_address(to), make_bool(true)})}), bytes32(0)});
}

void Generator::remediation_followup(Scenario& s, const Address& victim, std::uint64_t victim_milli_eth,
                                     const std::function<Transaction()>& revoke) {
  switch (uniform(0, 2)) {
    case 0:
      s.steps.push_back({revoke(), "support", "revoke"});
      break;
    case 1:
      s.steps.push_back({make_tx(victim, fresh(), eth(victim_milli_eth), {}, {}), "support", "asset-transfer"});
      break;
    default:
      break;
  }
}

Scenario Generator::approve_scenario() {
  Scenario s{"approve-drain", {}};
  const Address v = fresh(), sc = fresh();
  const std::uint64_t milli = uniform(200, 5000);
  fund(v, milli);
  const TokenInfo* info = chance(10) ? nullptr : &any_token();
  const Address token = info ? info->address : pick(memes_);
  const U256 amount = info ? token_amount(*info) : U256(uniform(1000, 1'000'000)) * kEther;
  fb_.hold(token, v, BigInt(amount));
  const Address dest = chance(50) ? sc : fresh();
  if (chance(50)) {
    s.steps.push_back({make_tx(v, token, 0, erc20("approve", {make_address(sc), make_uint(kMaxU256)}),
                               {approval_log(token, v, sc, kMaxU256)}),
                       "support", "grant"});
    s.steps.push_back({make_tx(sc, token, 0, erc20("transferFrom", {make_address(v), make_address(dest), make_uint(amount)}),
                               {erc20_transfer_log(token, v, dest, amount)}),
                       "positive", "I-A"});
  } else {
    s.name = "increase-allowance-drain";
    s.steps.push_back({make_tx(v, token, 0, erc20("increaseAllowance", {make_address(sc), make_uint(amount)}),
                               {approval_log(token, v, sc, amount)}),
                       "support", "grant"});
    const Address drainer = fresh();
    s.steps.push_back({make_tx(sc, drainer, 0,
                               signature_call("sweep(address,address,address,uint256)",
                                              {make_address(token), make_address(v), make_address(dest), make_uint(amount)}),
                               {erc20_transfer_log(token, v, dest, amount)}),
                       "positive", "I-A"});
  }
  remediation_followup(s, v, milli, [&] {
    return make_tx(v, token, 0, erc20("approve", {make_address(sc), make_uint(0)}), {approval_log(token, v, sc, 0)});
  });
  return s;
}

Scenario Generator::permit_scenario() {
  Scenario s{"permit-drain", {}};
  const Address v = fresh(), sc = fresh();
  const std::uint64_t milli = uniform(200, 5000);
  fund(v, milli);
  const auto style = uniform(0, 2);
  const TokenInfo& info = style == 1 ? mainnet_token("DAI") : any_token();
  const Address token = info.address;
  const U256 amount = token_amount(info);
  fb_.hold(token, v, BigInt(amount));
  const U256 deadline = 1'800'000'000;
  std::function<Transaction()> revoke = [&] {
    return make_tx(v, token, 0, erc20("approve", {make_address(sc), make_uint(0)}), {approval_log(token, v, sc, 0)});
  };

  if (style == 0) {
    s.steps.push_back({make_tx(sc, token, 0,
                               erc20("permit", {make_address(v), make_address(sc), make_uint(amount), make_uint(deadline),
                                                make_uint(27), bytes32(0x33), bytes32(0x44)}),
                               {approval_log(token, v, sc, amount)}),
                       "support", "grant"});
    s.steps.push_back({make_tx(sc, token, 0, erc20("transferFrom", {make_address(v), make_address(sc), make_uint(amount)}),
                               {erc20_transfer_log(token, v, sc, amount)}),
                       "positive", "I-B"});
  } else if (style == 1) {
    s.name = "dai-permit-drain";
    s.steps.push_back({make_tx(sc, token, 0,
                               erc20("permit.dai", {make_address(v), make_address(sc), make_uint(0), make_uint(deadline),
                                                    make_bool(true), make_uint(28), bytes32(0x33), bytes32(0x44)}),
                               {approval_log(token, v, sc, kMaxU256)}),
                       "support", "grant"});
    s.steps.push_back({make_tx(sc, token, 0, erc20("transferFrom", {make_address(v), make_address(sc), make_uint(amount)}),
                               {erc20_transfer_log(token, v, sc, amount)}),
                       "positive", "I-B"});
  } else {
    s.name = "permit2-drain";
    const Address p2 = default_permit2_address();
    s.steps.push_back({make_tx(v, token, 0, erc20("approve", {make_address(p2), make_uint(kMaxU256)}),
                               {approval_log(token, v, p2, kMaxU256)}),
                       "support", "permit2-allowance"});
    const Value details = make_list({make_address(token), make_uint(amount), make_uint(1'800'000'000), make_uint(0)});
    s.steps.push_back({make_tx(sc, p2, 0,
                               token_call("permit2.permit", {make_address(v), make_list({details, make_address(sc), make_uint(deadline)}),
                                                             signature_bytes()}),
                               {}),
                       "support", "grant"});
    s.steps.push_back({make_tx(sc, p2, 0,
                               signature_call("transferFrom(address,address,uint160,address)",
                                              {make_address(v), make_address(sc), make_uint(amount), make_address(token)}),
                               {erc20_transfer_log(token, v, sc, amount)}),
                       "positive", "I-B"});
    revoke = [&] {
      return make_tx(v, p2, 0,
                     token_call("permit2.approve", {make_address(token), make_address(sc), make_uint(0), make_uint(0)}), {});
    };
  }
  remediation_followup(s, v, milli, revoke);
  return s;
}

Scenario Generator::set_approval_scenario() {
  Scenario s{"set-approval-drain", {}};
  const Address v = fresh(), sc = fresh();
  const std::uint64_t milli = uniform(200, 5000);
  fund(v, milli);
  const Address collection = chance(85) ? pick(floored_) : pick(collections_);
  const auto n = uniform(1, 3);
  std::vector<U256> ids;
  for (std::uint64_t i = 0; i < n; ++i) ids.push_back(next_token_id_++);
  fb_.hold(collection, v, BigInt(n));
  s.steps.push_back({make_tx(v, collection, 0, erc20("setApprovalForAll", {make_address(sc), make_bool(true)}),
                             {approval_for_all_log(collection, v, sc, true)}),
                     "support", "grant"});
  if (n == 1) {
    s.steps.push_back({make_tx(sc, collection, 0, erc20("transferFrom", {make_address(v), make_address(sc), make_uint(ids[0])}),
                               {erc721_transfer_log(collection, v, sc, ids[0])}),
                       "positive", "I-C"});
  } else {
    std::vector<Value> id_values;
    std::vector<Log> logs;
    for (const auto& id : ids) {
      id_values.push_back(make_uint(id));
      logs.push_back(erc721_transfer_log(collection, v, sc, id));
    }
    s.steps.push_back({make_tx(sc, fresh(), 0,
                               signature_call("sweepNfts(address,address,uint256[])",
                                              {make_address(collection), make_address(v), make_list(id_values)}),
                               std::move(logs)),
                       "positive", "I-C"});
  }
  if (chance(30)) {
    // The thief sells the first stolen token on Blur.
    const Address buyer = fresh();
    const U256 price = eth(uniform(100, 3000));
    fb_.hold(std::nullopt, buyer, BigInt(price));
    const Address market = chance(50) ? blur1_ : blur2_;
    s.steps.push_back({make_tx(buyer, market, price,
                               blur_execute(market, sc, buyer, {collection, ids[0]}, price, {{50, fee_recipient_}}),
                               {erc721_transfer_log(collection, sc, buyer, ids[0])}),
                       "support", "stolen-nft-sale"});
  }
  remediation_followup(s, v, milli, [&] {
    return make_tx(v, collection, 0, erc20("setApprovalForAll", {make_address(sc), make_bool(false)}),
                   {approval_for_all_log(collection, v, sc, false)});
  });
  return s;
}

Scenario Generator::bulk_scenario() {
  Scenario s{"bulk-transfer", {}};
  const Address v = fresh(), sc = fresh();
  fund(v, uniform(100, 2000));
  std::vector<Nft> items;
  const auto n = uniform(1, 3);
  for (std::uint64_t i = 0; i < n; ++i) items.push_back(mint(v, chance(90)));
  std::vector<Log> logs;
  std::vector<Address> approved;
  for (const auto& it : items) {
    if (std::find(approved.begin(), approved.end(), it.collection) == approved.end()) {
      approved.push_back(it.collection);
      s.steps.push_back({make_tx(v, it.collection, 0, erc20("setApprovalForAll", {make_address(conduit_), make_bool(true)}),
                                 {approval_for_all_log(it.collection, v, conduit_, true)}),
                         "support", "conduit-approval"});
    }
    logs.push_back(erc721_transfer_log(it.collection, v, sc, it.id));
  }
  s.steps.push_back({make_tx(v, helper_, 0, bulk_transfer(items, sc), std::move(logs)), "positive", "II-A"});
  return s;
}

Scenario Generator::proxy_scenario() {
  Scenario s{"proxy-upgrade", {}};
  const Address proxy = fresh(), owner = fresh(), attacker = fresh();
  fb_.markets.emplace_back(proxy, "OpenSea", MarketAdapter::OpenseaFactory);
  fb_.proxies.emplace_back(proxy, owner);
  fb_.code.push_back(proxy);
  s.steps.push_back({make_tx(attacker, proxy, 0, signature_call("upgradeTo(address)", {make_address(fresh())}), {}),
                     "positive", "II-B"});
  return s;
}

Scenario Generator::free_order_scenario() {
  Scenario s{"free-order", {}};
  const Address v = fresh(), sc = fresh();
  fund(v, uniform(100, 2000));
  const Nft nft = mint(v, chance(90));
  const auto style = uniform(0, 4);
  const bool blur = style <= 1;
  const Address op = blur ? blur_delegate_ : conduit_;
  s.steps.push_back({make_tx(v, nft.collection, 0, erc20("setApprovalForAll", {make_address(op), make_bool(true)}),
                             {approval_for_all_log(nft.collection, v, op, true)}),
                     "support", "market-approval"});
  const U256 price = eth(uniform(100, 10'000));
  Transaction t;
  switch (style) {
    case 0: {
      s.name = "free-order-blur-fees";
      const Address market = chance(50) ? blur1_ : blur2_;
      t = make_tx(sc, market, 0, blur_execute(market, v, sc, nft, price, {{10000, sc}}),
                  {erc721_transfer_log(nft.collection, v, sc, nft.id)});
      break;
    }
    case 1: {
      s.name = "free-order-blur-zero-price";
      const Address market = chance(50) ? blur1_ : blur2_;
      t = make_tx(sc, market, 0, blur_execute(market, v, sc, nft, 0, {}),
                  {erc721_transfer_log(nft.collection, v, sc, nft.id)});
      break;
    }
    case 2: {
      s.name = "free-order-seaport-recipient";
      const Address market = seaport();
      fb_.hold(std::nullopt, sc, BigInt(price));
      t = make_tx(sc, market, price,
                  seaport_fulfill(adapter_of(market), false, v, {offer_nft(nft.collection, nft.id)},
                                  {consider_native(price, sc)}, Address{}),
                  {erc721_transfer_log(nft.collection, v, sc, nft.id)});
      break;
    }
    case 3: {
      s.name = "free-order-seaport-empty";
      const Address market = seaport();
      const Address receiver = fresh();
      t = make_tx(sc, market, 0,
                  seaport_fulfill(adapter_of(market), true, v, {offer_nft(nft.collection, nft.id)}, {}, receiver),
                  {erc721_transfer_log(nft.collection, v, receiver, nft.id)});
      break;
    }
    default: {
      s.name = "free-order-seaport-diverted";
      const Address market = seaport();
      const U256 seller_part = price / 10;
      fb_.hold(std::nullopt, sc, BigInt(price));
      t = make_tx(sc, market, price,
                  seaport_fulfill(adapter_of(market), false, v, {offer_nft(nft.collection, nft.id)},
                                  {consider_native(seller_part, v), consider_native(price - seller_part, sc)}, Address{}),
                  {erc721_transfer_log(nft.collection, v, sc, nft.id)});
      break;
    }
  }
  s.steps.push_back({std::move(t), "positive", "II-C"});
  return s;
}

Scenario Generator::poisoning_scenario(PoisonStyle style) {
  Scenario s{"", {}};
  const Address v = fresh(), genuine = fresh();
  fund(v, uniform(100, 2000));
  const TokenInfo& info = style == PoisonStyle::Zero ? any_token() : stable_token();
  const U256 first = token_amount(info), second = token_amount(info);
  fb_.hold(info.address, v, BigInt(first + second));
  s.steps.push_back({make_tx(v, info.address, 0, erc20("transfer", {make_address(genuine), make_uint(first)}),
                             {erc20_transfer_log(info.address, v, genuine, first)}),
                     "support", "genuine-transfer"});
  const Address lookalike = similar_to(genuine);
  std::string rule;
  switch (style) {
    case PoisonStyle::Zero: {
      s.name = "zero-value-poisoning";
      rule = "III-A";
      s.steps.push_back({make_tx(fresh(), fresh(), 0,
                                 signature_call("batchTransferFrom(address,address[],address[],uint256)",
                                                {make_address(info.address), make_list({make_address(v)}),
                                                 make_list({make_address(lookalike)}), make_uint(0)}),
                                 {erc20_transfer_log(info.address, v, lookalike, 0)}),
                         "attack", "ZeroValue"});
      break;
    }
    case PoisonStyle::Fake: {
      s.name = "fake-token-poisoning";
      rule = "III-B";
      const Address fake = pick(fakes_.at(info.symbol));
      s.steps.push_back({make_tx(fresh(), fake, 0,
                                 erc20("transferFrom", {make_address(v), make_address(lookalike), make_uint(first)}),
                                 {erc20_transfer_log(fake, v, lookalike, first)}),
                         "attack", "FakeToken"});
      break;
    }
    case PoisonStyle::Dust: {
      s.name = "dust-poisoning";
      rule = "III-C";
      if (chance(50)) {
        const U256 wei = U256(uniform(1'000, 4'000'000)) * 1'000'000u;  // at most 0.000004 ETH
        fb_.hold(std::nullopt, lookalike, BigInt(wei));
        s.steps.push_back({make_tx(lookalike, v, wei, {}, {}), "attack", "DustValue"});
      } else {
        const U256 dust = pow10(info.decimals) * uniform(1, 90) / 10'000;  // below one cent
        fb_.hold(info.address, lookalike, BigInt(dust));
        s.steps.push_back({make_tx(lookalike, info.address, 0, erc20("transfer", {make_address(v), make_uint(dust)}),
                                   {erc20_transfer_log(info.address, lookalike, v, dust)}),
                           "attack", "DustValue"});
      }
      break;
    }
  }
  s.steps.push_back({make_tx(v, info.address, 0, erc20("transfer", {make_address(lookalike), make_uint(second)}),
                             {erc20_transfer_log(info.address, v, lookalike, second)}),
                     "positive", rule});
  return s;
}

Scenario Generator::payable_scenario(const std::string& cls) {
  Scenario s{cls == "Airdrop" ? "payable-airdrop" : "payable-wallet", {}};
  const Address v = fresh();
  const U256 value = eth(uniform(10, 2000));
  fund(v, 3000);
  const auto& row = pick(cls == "Airdrop" ? airdrop_ : wallet_);
  Bytes input = parse_hex(row.selector);
  if (chance(30)) input.resize(36, 0);
  s.steps.push_back({make_tx(v, pick(scam_contracts_), value, std::move(input), {}), "positive",
                     cls == "Airdrop" ? "IV-A" : "IV-B"});
  return s;
}

Transaction Generator::filler_tx() {
  const Address from = fund(fresh(), 2000);
  return make_tx(from, fresh(), eth(uniform(1, 1000)), {}, {});
}

constexpr unsigned kBenignKinds = 27;

Scenario Generator::benign_scenario(unsigned kind) {
  Scenario s{"", {}};
  const Address v = fund(fresh(), uniform(500, 5000));
  const TokenInfo& info = any_token();
  const Address token = info.address;
  const U256 amount = token_amount(info);
  auto support = [&](Transaction t, const std::string& what) { s.steps.push_back({std::move(t), "support", what}); };
  auto probe = [&](Transaction t) { s.steps.push_back({std::move(t), "negative", "benign"}); };
  auto pay = [&](const Address& to, const U256& amt) {
    return make_tx(v, token, 0, erc20("transfer", {make_address(to), make_uint(amt)}), {erc20_transfer_log(token, v, to, amt)});
  };
  auto approve = [&](const Address& spender) {
    return make_tx(v, token, 0, erc20("approve", {make_address(spender), make_uint(kMaxU256)}),
                   {approval_log(token, v, spender, kMaxU256)});
  };

  switch (kind) {
    case 0:
      s.name = "plain-eth";
      probe(make_tx(v, fresh(), eth(uniform(10, 400)), {}, {}));
      break;
    case 1:
      s.name = "plain-erc20";
      fb_.hold(token, v, BigInt(amount));
      probe(pay(fresh(), amount));
      break;
    case 2: {
      s.name = "dex-swap";
      fb_.hold(token, v, BigInt(amount));
      const TokenInfo& out = any_token();
      const U256 out_amount = token_amount(out);
      support(approve(router_), "router-approval");
      probe(make_tx(v, router_, 0,
                    signature_call("swapExactTokensForTokens(uint256,uint256,address[],address,uint256)",
                                   {make_uint(amount), make_uint(0), make_list({make_address(token), make_address(out.address)}),
                                    make_address(v), make_uint(1'800'000'000)}),
                    {erc20_transfer_log(token, v, pool_, amount), erc20_transfer_log(out.address, pool_, v, out_amount)}));
      break;
    }
    case 3:
      s.name = "authorized-spender-pull";
      fb_.hold(token, v, BigInt(amount));
      support(approve(router_), "router-approval");
      probe(make_tx(router_, token, 0, erc20("transferFrom", {make_address(v), make_address(pool_), make_uint(amount)}),
                    {erc20_transfer_log(token, v, pool_, amount)}));
      break;
    case 4: {
      s.name = "partial-pull";
      const Address spender = fresh();
      const U256 part = amount * 2 / 5;
      fb_.hold(token, v, BigInt(amount));
      support(approve(spender), "grant");
      probe(make_tx(spender, token, 0, erc20("transferFrom", {make_address(v), make_address(spender), make_uint(part)}),
                    {erc20_transfer_log(token, v, spender, part)}));
      break;
    }
    case 5: {
      s.name = "self-pull";
      const Address to = fresh();
      fb_.hold(token, v, BigInt(amount));
      support(approve(v), "self-grant");
      probe(make_tx(v, token, 0, erc20("transferFrom", {make_address(v), make_address(to), make_uint(amount)}),
                    {erc20_transfer_log(token, v, to, amount)}));
      break;
    }
    case 6: {
      s.name = "pull-without-grant";
      const Address spender = fresh();
      fb_.hold(token, v, BigInt(amount));
      probe(make_tx(spender, token, 0, erc20("transferFrom", {make_address(v), make_address(spender), make_uint(amount)}),
                    {erc20_transfer_log(token, v, spender, amount)}));
      break;
    }
    case 7: {
      s.name = "failed-drain";
      const Address spender = fresh();
      fb_.hold(token, v, BigInt(amount));
      support(approve(spender), "grant");
      probe(make_tx(spender, token, 0, erc20("transferFrom", {make_address(v), make_address(spender), make_uint(amount)}), {},
                    TxStatus::Failure));
      break;
    }
    case 8: {
      s.name = "blur-sale";
      const Nft nft = mint(v);
      const Address buyer = fresh();
      const U256 price = eth(uniform(100, 5000));
      fb_.hold(std::nullopt, buyer, BigInt(price));
      const Address market = chance(50) ? blur1_ : blur2_;
      support(make_tx(v, nft.collection, 0, erc20("setApprovalForAll", {make_address(blur_delegate_), make_bool(true)}),
                      {approval_for_all_log(nft.collection, v, blur_delegate_, true)}),
              "market-approval");
      probe(make_tx(buyer, market, price, blur_execute(market, v, buyer, nft, price, {{50, fee_recipient_}}),
                    {erc721_transfer_log(nft.collection, v, buyer, nft.id)}));
      break;
    }
    case 9: {
      s.name = "seaport-sale";
      const Nft nft = mint(v);
      const Address buyer = fresh(), market = seaport();
      const U256 price = eth(uniform(100, 5000));
      const U256 fee = price / 40;
      fb_.hold(std::nullopt, buyer, BigInt(price));
      support(make_tx(v, nft.collection, 0, erc20("setApprovalForAll", {make_address(conduit_), make_bool(true)}),
                      {approval_for_all_log(nft.collection, v, conduit_, true)}),
              "market-approval");
      probe(make_tx(buyer, market, price,
                    seaport_fulfill(adapter_of(market), chance(50), v, {offer_nft(nft.collection, nft.id)},
                                    {consider_native(price - fee, v), consider_native(fee, fee_recipient_)}, Address{}),
                    {erc721_transfer_log(nft.collection, v, buyer, nft.id)}));
      break;
    }
    case 10: {
      s.name = "seaport-accept-bid";
      const Nft nft = mint(v);
      const Address bidder = fresh(), market = seaport();
      const auto& weth = mainnet_token("WETH");
      const U256 price = eth(uniform(100, 5000));
      fb_.hold(weth.address, bidder, BigInt(price * 3));
      const Value offer = make_list({make_uint(1), make_address(weth.address), make_uint(0), make_uint(price), make_uint(price)});
      const Value want = make_list({make_uint(2), make_address(nft.collection), make_uint(nft.id), make_uint(1), make_uint(1),
                                    make_address(bidder)});
      probe(make_tx(v, market, 0, seaport_fulfill(adapter_of(market), false, bidder, {offer}, {want}, Address{}),
                    {erc721_transfer_log(nft.collection, v, bidder, nft.id),
                     erc20_transfer_log(weth.address, bidder, v, price)}));
      break;
    }
    case 11: {
      s.name = "bulk-transfer-self";
      const Nft nft = mint(v);
      probe(make_tx(v, helper_, 0, bulk_transfer({nft}, v), {erc721_transfer_log(nft.collection, v, v, nft.id)}));
      break;
    }
    case 12: {
      s.name = "upgrade-by-owner";
      const Address proxy = fresh();
      fb_.markets.emplace_back(proxy, "OpenSea", MarketAdapter::OpenseaFactory);
      fb_.proxies.emplace_back(proxy, v);
      fb_.code.push_back(proxy);
      probe(make_tx(v, proxy, 0, signature_call("upgradeTo(address)", {make_address(fresh())}), {}));
      break;
    }
    case 13:
      s.name = "verified-payable";
      probe(make_tx(v, pick(verified_contracts_), eth(uniform(10, 400)), parse_hex(pick(airdrop_).selector), {}));
      break;
    case 14: {
      s.name = "payable-with-logs";
      const Address c = pick(logging_contracts_);
      probe(make_tx(v, c, eth(uniform(10, 400)), parse_hex(pick(wallet_).selector),
                    {Log{c, {keccak256(std::string_view("Deposited(address,uint256)"))}, Bytes(32, 0)}}));
      break;
    }
    case 15:
      s.name = "payable-unknown-selector";
      probe(make_tx(v, pick(scam_contracts_), eth(uniform(10, 400)), parse_hex("0xd0e30db0"), {}));
      break;
    case 16:
      s.name = "claim-selector-to-eoa";
      probe(make_tx(v, fresh(), eth(uniform(10, 400)), parse_hex(pick(airdrop_).selector), {}));
      break;
    case 17:
      s.name = "claim-without-value";
      probe(make_tx(v, pick(scam_contracts_), 0, parse_hex(pick(airdrop_).selector), {}));
      break;
    case 18: {
      s.name = "repeat-payment";
      const Address g = fresh();
      fb_.hold(token, v, BigInt(amount * 2));
      support(pay(g, amount), "first-payment");
      probe(pay(g, amount));
      break;
    }
    case 19: {
      s.name = "lookalike-without-plant";
      const Address g = fresh(), g2 = similar_to(g);
      fb_.hold(token, v, BigInt(amount * 2));
      support(pay(g, amount), "genuine-transfer");
      probe(pay(g2, amount));
      break;
    }
    case 20: {
      s.name = "own-zero-transfer";
      const Address g = fresh(), g2 = similar_to(g);
      fb_.hold(token, v, BigInt(amount * 2));
      support(pay(g, amount), "genuine-transfer");
      support(pay(g2, 0), "own-zero-transfer");
      probe(pay(g2, amount));
      break;
    }
    case 21: {
      s.name = "dust-without-lookalike";
      const Address f = fresh();
      const U256 wei = U256(uniform(1'000, 4'000'000)) * 1'000'000u;
      fb_.hold(std::nullopt, f, BigInt(wei));
      fb_.hold(token, v, BigInt(amount));
      support(make_tx(f, v, wei, {}, {}), "dust");
      probe(pay(f, amount));
      break;
    }
    case 22: {
      s.name = "lookalike-real-inbound";
      const Address g = fresh(), x = similar_to(g);
      const TokenInfo& stable = stable_token();
      const U256 fifty = units_for_usd(stable, 50);
      fb_.hold(token, v, BigInt(amount * 2));
      fb_.hold(stable.address, x, BigInt(fifty));
      support(pay(g, amount), "genuine-transfer");
      support(make_tx(x, stable.address, 0, erc20("transfer", {make_address(v), make_uint(fifty)}),
                      {erc20_transfer_log(stable.address, x, v, fifty)}),
              "inbound-payment");
      probe(pay(x, amount));
      break;
    }
    case 23: {
      s.name = "suffix-only-lookalike";
      const Address g = fresh(), f = suffix_lookalike(g);
      fb_.hold(token, v, BigInt(amount * 2));
      support(pay(g, amount), "genuine-transfer");
      s.steps.push_back({make_tx(fresh(), fresh(), 0,
                                 signature_call("batchTransferFrom(address,address[],address[],uint256)",
                                                {make_address(token), make_list({make_address(v)}), make_list({make_address(f)}),
                                                 make_uint(0)}),
                                 {erc20_transfer_log(token, v, f, 0)}),
                         "attack", "ZeroValue"});
      probe(pay(f, amount));
      break;
    }
    case 24: {
      s.name = "nft-gift";
      const Address x = fresh();
      const Nft nft = mint(x);
      probe(make_tx(x, nft.collection, 0, erc20("transferFrom", {make_address(x), make_address(v), make_uint(nft.id)}),
                    {erc721_transfer_log(nft.collection, x, v, nft.id)}));
      break;
    }
    case 25: {
      s.name = "fake-token-own-transfer";
      const Address x = fresh();
      const TokenInfo& stable = stable_token();
      const Address fake = pick(fakes_.at(stable.symbol));
      const U256 amt = token_amount(stable);
      fb_.hold(fake, x, BigInt(amt));
      probe(make_tx(x, fake, 0, erc20("transfer", {make_address(v), make_uint(amt)}), {erc20_transfer_log(fake, x, v, amt)}));
      break;
    }
    default: {
      s.name = "dust-then-genuine-payment";
      const Address g = fresh(), f = similar_to(g);
      const U256 wei = U256(uniform(1'000, 4'000'000)) * 1'000'000u;
      fb_.hold(std::nullopt, f, BigInt(wei));
      fb_.hold(token, v, BigInt(amount * 2));
      support(pay(g, amount), "genuine-transfer");
      s.steps.push_back({make_tx(f, v, wei, {}, {}), "attack", "DustValue"});
      probe(pay(g, amount));
      break;
    }
  }
  return s;
}

CorpusSummary Generator::run(const fs::path& out) {
  std::vector<Scenario> scenarios;
  for (std::uint64_t i = 0; i < opts_.per_subcat; ++i) {
    scenarios.push_back(approve_scenario());
    scenarios.push_back(permit_scenario());
    scenarios.push_back(set_approval_scenario());
    scenarios.push_back(bulk_scenario());
    scenarios.push_back(proxy_scenario());
    scenarios.push_back(free_order_scenario());
    scenarios.push_back(poisoning_scenario(PoisonStyle::Zero));
    scenarios.push_back(poisoning_scenario(PoisonStyle::Fake));
    scenarios.push_back(poisoning_scenario(PoisonStyle::Dust));
    scenarios.push_back(payable_scenario("Airdrop"));
    scenarios.push_back(payable_scenario("Wallet"));
  }
  for (std::uint64_t i = 0; i < opts_.benign; ++i) scenarios.push_back(benign_scenario(static_cast<unsigned>(i % kBenignKinds)));
  std::shuffle(scenarios.begin(), scenarios.end(), rng_);

  std::size_t total = 0, longest = 1;
  for (const auto& s : scenarios) {
    total += s.steps.size();
    longest = std::max(longest, s.steps.size());
  }
  const bool fixed = opts_.fill_blocks.has_value();
  const std::size_t capacity = fixed ? opts_.block_size : std::numeric_limits<std::size_t>::max();
  std::size_t block_count = fixed ? *opts_.fill_blocks : std::max<std::size_t>(32, (total + 49) / 50);
  block_count = std::max<std::size_t>(block_count, fixed ? 0 : longest * 3 + 1);
  if (fixed && total > block_count * capacity)
    throw ConfigError("corpus needs " + std::to_string(total) + " transactions but only " +
                      std::to_string(block_count * capacity) + " slots are available");

  std::vector<std::vector<Step>> slots(block_count);
  for (auto& s : scenarios) {
    const std::size_t k = s.steps.size();
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      std::vector<std::size_t> gaps(k, 0);
      std::size_t span = 0;
      for (std::size_t i = 1; i < k; ++i) span += gaps[i] = uniform(1, 3);
      if (span >= block_count) continue;
      std::size_t pos = uniform(0, block_count - 1 - span);
      std::vector<std::size_t> where;
      for (std::size_t i = 0; i < k; ++i) {
        if (i > 0) pos = std::max(pos + 1, where.back() + gaps[i]);
        while (pos < block_count && slots[pos].size() >= capacity) ++pos;
        if (pos >= block_count) break;
        where.push_back(pos);
      }
      if (where.size() != k) continue;
      for (std::size_t i = 0; i < k; ++i) {
        s.steps[i].scenario = s.name;
        slots[where[i]].push_back(std::move(s.steps[i]));
      }
      placed = true;
    }
    if (!placed) throw ConfigError("could not place scenario " + s.name + "; raise --blocks");
  }

  std::vector<LabelRow> labels;
  CorpusSummary sum;
  sum.first_block = fb_.first_block();
  for (std::size_t b = 0; b < block_count; ++b) {
    if (fixed)
      while (slots[b].size() < capacity) slots[b].push_back({filler_tx(), "filler", "benign", "filler"});
    std::shuffle(slots[b].begin(), slots[b].end(), rng_);
    const std::uint64_t number = fb_.add_block();
    for (auto& step : slots[b]) {
      const Transaction& t = fb_.add_tx(number, std::move(step.tx));
      labels.push_back({t.hash, step.kind, step.label, step.scenario});
      if (step.kind == "positive") ++sum.positives;
      else if (step.kind == "negative") ++sum.negatives;
      else if (step.kind == "support") ++sum.support;
      else if (step.kind == "attack") ++sum.attacks;
      else ++sum.fillers;
    }
  }
  sum.blocks = block_count;
  sum.transactions = labels.size();
  fb_.write(out);
  std::ofstream lab(out / "labels.csv", std::ios::binary);
  lab << "txHash,kind,label,scenario\n";
  for (const auto& l : labels) lab << l.tx_hash.hex() << ',' << l.kind << ',' << l.label << ',' << l.scenario << '\n';
  return sum;
}

}  // namespace

CorpusSummary generate_corpus(const CorpusOptions& options, const fs::path& out) {
  fs::create_directories(out);
  Generator g(options);
  return g.run(out);
}

std::vector<LabelRow> read_labels(const fs::path& labels_csv) {
  std::ifstream in(labels_csv);
  if (!in) throw NotFoundError("labels file not found: " + labels_csv.string());
  std::vector<LabelRow> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 4) throw ParseError("labels.csv: expected 4 fields: " + line);
    rows.push_back({Hash32::from_hex(f[0]), f[1], f[2], f[3]});
  }
  return rows;
}

}  // namespace phishscan::app
