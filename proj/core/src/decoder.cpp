#include "phishscan/decoder.hpp"

#include <algorithm>

namespace phishscan {

namespace {

const std::string kOrderParams =
    "(address,address,(uint8,address,uint256,uint256,uint256)[],(uint8,address,uint256,uint256,uint256,address)[],"
    "uint8,uint256,uint256,bytes32,uint256,bytes32,uint256)";
const std::string kBlurOrder =
    "(address,uint8,address,address,uint256,uint256,address,uint256,uint256,uint256,(uint16,address)[],uint256,bytes)";
const std::string kBlurInput = "(" + kBlurOrder + ",uint8,bytes32,bytes32,bytes,uint8,uint256)";

const std::vector<std::string>& seaport_signatures() {
  static const std::vector<std::string> s = {
      "fulfillAdvancedOrder((" + kOrderParams + ",uint120,uint120,bytes,bytes),(uint256,uint8,uint256,uint256,bytes32[])[],bytes32,address)",
      "fulfillOrder((" + kOrderParams + ",bytes),bytes32)",
  };
  return s;
}

const std::map<std::string, abi::Function>& token_functions() {
  static const std::map<std::string, abi::Function> fns = [] {
    std::map<std::string, abi::Function> m;
    m["approve"] = abi::parse_function("approve(address,uint256)");
    m["increaseAllowance"] = abi::parse_function("increaseAllowance(address,uint256)");
    m["transfer"] = abi::parse_function("transfer(address,uint256)");
    m["transferFrom"] = abi::parse_function("transferFrom(address,address,uint256)");
    m["permit"] = abi::parse_function("permit(address,address,uint256,uint256,uint8,bytes32,bytes32)");
    m["permit.dai"] = abi::parse_function("permit(address,address,uint256,uint256,bool,uint8,bytes32,bytes32)");
    m["setApprovalForAll"] = abi::parse_function("setApprovalForAll(address,bool)");
    m["permit2.permit"] = abi::parse_function("permit(address,((address,uint160,uint48,uint48),address,uint256),bytes)");
    m["permit2.permitBatch"] = abi::parse_function("permit(address,((address,uint160,uint48,uint48)[],address,uint256),bytes)");
    m["permit2.approve"] = abi::parse_function("approve(address,address,uint160,uint48)");
    return m;
  }();
  return fns;
}

bool selector_matches(const abi::Function& f, const Selector& sel) { return f.selector == sel; }

DecodedCall base_call(const Selector& sel, std::string name) {
  DecodedCall c;
  c.selector = sel;
  c.function_name = std::move(name);
  return c;
}

DecodedCall decode_token(const Transaction& tx, const Selector& sel, bool via_permit2) {
  const auto& fns = token_functions();
  const Address token = *tx.to;
  if (via_permit2) {
    if (selector_matches(fns.at("permit2.permit"), sel)) {
      const auto args = fns.at("permit2.permit").decode_call(tx.input);
      const auto& single = args[1];
      auto c = base_call(sel, "permit2");
      c.params["owner"] = args[0].address();
      c.params["token"] = single[0][0].address();
      c.params["value"] = single[0][1].uint();
      c.params["spender"] = single[1].address();
      return c;
    }
    if (selector_matches(fns.at("permit2.permitBatch"), sel)) {
      const auto args = fns.at("permit2.permitBatch").decode_call(tx.input);
      const auto& batch = args[1];
      auto c = base_call(sel, "permit2");
      c.params["owner"] = args[0].address();
      const auto& details = batch[0].items();
      if (details.empty()) throw DecodeError("permit2 batch without details");
      c.params["token"] = details[0][0].address();
      c.params["value"] = details[0][1].uint();
      c.params["spender"] = batch[1].address();
      return c;
    }
    if (selector_matches(fns.at("permit2.approve"), sel)) {
      const auto args = fns.at("permit2.approve").decode_call(tx.input);
      auto c = base_call(sel, "permit2");
      c.params["owner"] = tx.from;
      c.params["token"] = args[0].address();
      c.params["spender"] = args[1].address();
      c.params["value"] = args[2].uint();
      return c;
    }
    throw DecodeError("not a permit2 call");
  }
  if (selector_matches(fns.at("approve"), sel) || selector_matches(fns.at("increaseAllowance"), sel)) {
    const bool approve = selector_matches(fns.at("approve"), sel);
    const auto args = fns.at(approve ? "approve" : "increaseAllowance").decode_call(tx.input);
    auto c = base_call(sel, approve ? "approve" : "increaseAllowance");
    c.params["owner"] = tx.from;
    c.params["spender"] = args[0].address();
    c.params["value"] = args[1].uint();
    c.params["token"] = token;
    return c;
  }
  if (selector_matches(fns.at("transfer"), sel)) {
    const auto args = fns.at("transfer").decode_call(tx.input);
    auto c = base_call(sel, "transfer");
    c.params["owner"] = tx.from;
    c.params["recipient"] = args[0].address();
    c.params["value"] = args[1].uint();
    c.params["token"] = token;
    return c;
  }
  if (selector_matches(fns.at("transferFrom"), sel)) {
    const auto args = fns.at("transferFrom").decode_call(tx.input);
    auto c = base_call(sel, "transferFrom");
    c.params["owner"] = args[0].address();
    c.params["recipient"] = args[1].address();
    c.params["value"] = args[2].uint();
    c.params["token"] = token;
    return c;
  }
  if (selector_matches(fns.at("permit"), sel)) {
    const auto args = fns.at("permit").decode_call(tx.input);
    auto c = base_call(sel, "permit");
    c.params["owner"] = args[0].address();
    c.params["spender"] = args[1].address();
    c.params["value"] = args[2].uint();
    c.params["token"] = token;
    return c;
  }
  if (selector_matches(fns.at("permit.dai"), sel)) {
    const auto args = fns.at("permit.dai").decode_call(tx.input);
    auto c = base_call(sel, "permit");
    c.params["owner"] = args[0].address();
    c.params["spender"] = args[1].address();
    c.params["value"] = args[4].boolean() ? std::numeric_limits<U256>::max() : U256(0);
    c.params["token"] = token;
    return c;
  }
  if (selector_matches(fns.at("setApprovalForAll"), sel)) {
    const auto args = fns.at("setApprovalForAll").decode_call(tx.input);
    auto c = base_call(sel, "setApprovalForAll");
    c.params["owner"] = tx.from;
    c.params["operator"] = args[0].address();
    c.params["approved"] = args[1].boolean();
    c.params["token"] = token;
    return c;
  }
  throw DecodeError("not a token call");
}

bool is_token_selector(const Selector& sel, bool via_permit2) {
  for (const auto& [name, f] : token_functions()) {
    const bool p2 = name.rfind("permit2.", 0) == 0;
    if (p2 == via_permit2 && f.selector == sel) return true;
  }
  return false;
}

// Picks the address receiving the largest share; the offerer wins ties.
Address largest_payee(const Address& offerer, const std::vector<std::pair<Address, U256>>& payouts) {
  std::vector<std::pair<Address, U256>> totals;
  for (const auto& [who, amount] : payouts) {
    auto it = std::find_if(totals.begin(), totals.end(), [&](const auto& p) { return p.first == who; });
    if (it == totals.end())
      totals.emplace_back(who, amount);
    else
      it->second += amount;
  }
  Address best = offerer;
  U256 best_amount = 0;
  for (const auto& [who, amount] : totals)
    if (who == offerer) best_amount = amount;
  for (const auto& [who, amount] : totals)
    if (amount > best_amount) {
      best = who;
      best_amount = amount;
    }
  return best;
}

OrderInfo decode_blur(const abi::Function& f, const Transaction& tx, MarketAdapter adapter) {
  const auto args = f.decode_call(tx.input);
  const auto& sell = args[0][0];
  const auto& buy = args[1][0];
  OrderInfo o;
  o.market = std::string(adapter_id(adapter));
  o.offerer = sell[0].address();
  o.buyer = buy[0].address();
  o.nft_items.push_back({sell[3].address(), sell[4].uint()});
  const Address pay = sell[6].address();
  if (!pay.is_zero()) o.payment_token = pay;
  o.price_wei = sell[7].uint();
  std::uint32_t fees = 0;
  std::vector<std::pair<Address, U256>> shares;
  for (const auto& fee : sell[10].items()) {
    const U256& rate = fee[0].uint();
    fees += rate.convert_to<std::uint32_t>();
    if (fees > 10000) throw DecodeError("order fee rates exceed 100%");
    shares.emplace_back(fee[1].address(), rate);
  }
  shares.emplace_back(o.offerer, U256(10000 - fees));
  o.fees_bps = fees;
  o.recipient = largest_payee(o.offerer, shares);
  return o;
}

std::optional<OrderInfo> order_from_seaport_params(const abi::Value& params, MarketAdapter adapter) {
  OrderInfo o;
  o.market = std::string(adapter_id(adapter));
  o.offerer = params[0].address();
  for (const auto& item : params[2].items()) {
    const auto type = item[0].uint();
    if (type >= 2 && type <= 5) o.nft_items.push_back({item[1].address(), item[2].uint()});
  }
  if (o.nft_items.empty()) return std::nullopt;  // a bid, not a listing by the offerer
  U256 total = 0, to_others = 0;
  std::vector<std::pair<Address, U256>> payouts;
  bool first_currency = true;
  for (const auto& item : params[3].items()) {
    const auto type = item[0].uint();
    if (type > 1) continue;
    if (first_currency && type == 1) o.payment_token = item[1].address();
    first_currency = false;
    const U256& amount = item[3].uint();
    const Address& to = item[5].address();
    if (amount > std::numeric_limits<U256>::max() - total) throw DecodeError("consideration total overflows");
    total += amount;
    if (to != o.offerer) to_others += amount;
    payouts.emplace_back(to, amount);
  }
  o.price_wei = total;
  o.fees_bps = total == 0 ? 0 : static_cast<std::uint32_t>((BigInt(to_others) * 10000 / BigInt(total)).convert_to<std::uint64_t>());
  o.recipient = largest_payee(o.offerer, payouts);
  return o;
}

}  // namespace

std::optional<Selector> selector_of(ByteView input) {
  if (input.size() < 4) return std::nullopt;
  return Selector::from_span(input.subspan(0, 4));
}

SelectorClass classify_selector(const Selector& sel, const LabelRegistry& registry) {
  if (registry.airdrop_selectors.contains(sel)) return SelectorClass::Airdrop;
  if (registry.wallet_selectors.contains(sel)) return SelectorClass::Wallet;
  return SelectorClass::None;
}

const std::vector<std::string>& builtin_market_signatures(MarketAdapter adapter) {
  static const std::vector<std::string> blur = {"execute(" + kBlurInput + "," + kBlurInput + ")"};
  static const std::vector<std::string> helper = {"bulkTransfer(((uint8,address,uint256,uint256)[],address,bool)[],bytes32)"};
  static const std::vector<std::string> factory = {"upgradeTo(address)"};
  switch (adapter) {
    case MarketAdapter::Seaport11:
    case MarketAdapter::Seaport12:
    case MarketAdapter::Seaport13:
    case MarketAdapter::Seaport14:
      return seaport_signatures();
    case MarketAdapter::Blur1:
    case MarketAdapter::Blur2:
      return blur;
    case MarketAdapter::OpenseaHelper:
      return helper;
    case MarketAdapter::OpenseaFactory:
      return factory;
  }
  return factory;
}

Decoder::Decoder() {
  for (auto adapter : {MarketAdapter::Seaport11, MarketAdapter::Seaport12, MarketAdapter::Seaport13,
                       MarketAdapter::Seaport14, MarketAdapter::Blur1, MarketAdapter::Blur2,
                       MarketAdapter::OpenseaHelper, MarketAdapter::OpenseaFactory}) {
    auto& fns = market_abis_[adapter];
    for (const auto& sig : builtin_market_signatures(adapter)) fns.push_back(abi::parse_function(sig));
  }
}

Decoder Decoder::load(const std::filesystem::path& abi_dir) {
  Decoder d;
  for (auto& [adapter, fns] : d.market_abis_) {
    const auto path = abi_dir / (std::string(adapter_id(adapter)) + ".json");
    if (!std::filesystem::exists(path)) continue;
    const auto loaded = abi::load_json_abi(path);
    for (auto& expected : fns) {
      auto it = std::find_if(loaded.begin(), loaded.end(), [&](const abi::Function& f) { return f.name == expected.name; });
      if (it == loaded.end())
        throw ConfigError(path.string() + ": missing function '" + expected.name + "'");
      if (it->signature() != expected.signature())
        throw ConfigError(path.string() + ": '" + it->signature() + "' does not match the decoder layout '" +
                          expected.signature() + "'");
      expected = *it;
    }
  }
  return d;
}

const abi::Function& Decoder::market_function(MarketAdapter adapter, const std::string& name) const {
  for (const auto& f : market_abis_.at(adapter))
    if (f.name == name) return f;
  throw NotFoundError("adapter " + std::string(adapter_id(adapter)) + " has no function " + name);
}

const abi::Function& Decoder::token_function(const std::string& name) { return token_functions().at(name); }

std::optional<DecodedCall> Decoder::decode_token_call(const Transaction& tx, const LabelRegistry& registry,
                                                      Diagnostics* diag) const {
  if (!tx.to) return std::nullopt;
  const auto sel = selector_of(tx.input);
  if (!sel) return std::nullopt;
  const bool via_permit2 = registry.is_permit2(*tx.to);
  if (!is_token_selector(*sel, via_permit2)) return std::nullopt;
  try {
    return decode_token(tx, *sel, via_permit2);
  } catch (const DecodeError&) {
    if (diag) ++diag->decode_errors;
    return std::nullopt;
  }
}

std::optional<MarketCall> Decoder::decode_market_order(const Transaction& tx, const LabelRegistry& registry,
                                                       const ProxyOwnerLookup& proxy_owner, Diagnostics* diag) const {
  if (!tx.to) return std::nullopt;
  const MarketEntry* market = registry.nft_market(*tx.to);
  if (!market) return std::nullopt;
  const auto sel = selector_of(tx.input);
  if (!sel) return std::nullopt;
  const auto& fns = market_abis_.at(market->adapter);
  auto fn = std::find_if(fns.begin(), fns.end(), [&](const abi::Function& f) { return f.selector == *sel; });
  if (fn == fns.end()) return std::nullopt;
  try {
    switch (market->adapter) {
      case MarketAdapter::Blur1:
      case MarketAdapter::Blur2:
        return decode_blur(*fn, tx, market->adapter);
      case MarketAdapter::Seaport11:
      case MarketAdapter::Seaport12:
      case MarketAdapter::Seaport13:
      case MarketAdapter::Seaport14: {
        const auto args = fn->decode_call(tx.input);
        const auto& params = args[0][0];
        auto order = order_from_seaport_params(params, market->adapter);
        if (!order) return std::nullopt;
        order->buyer = tx.from;
        if (fn->name == "fulfillAdvancedOrder" && !args[3].address().is_zero()) order->buyer = args[3].address();
        return *order;
      }
      case MarketAdapter::OpenseaHelper: {
        const auto args = fn->decode_call(tx.input);
        auto c = base_call(*sel, "bulkTransfer");
        std::vector<TransferItem> items;
        std::optional<Address> recipient;
        for (const auto& group : args[0].items()) {
          const Address& to = group[1].address();
          if (!recipient || (*recipient == tx.from && to != tx.from)) recipient = to;
          for (const auto& item : group[0].items()) items.push_back({item[1].address(), item[2].uint(), to});
        }
        c.params["transferItems"] = std::move(items);
        if (recipient) c.params["recipient"] = *recipient;
        return c;
      }
      case MarketAdapter::OpenseaFactory: {
        const auto args = fn->decode_call(tx.input);
        auto c = base_call(*sel, "upgradeTo");
        c.params["implementation"] = args[0].address();
        if (proxy_owner)
          if (auto owner = proxy_owner(*tx.to)) c.params["owner"] = *owner;
        return c;
      }
    }
  } catch (const DecodeError&) {
    if (diag) ++diag->decode_errors;
  }
  return std::nullopt;
}

}  // namespace phishscan
