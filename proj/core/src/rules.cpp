#include "phishscan/rules.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>

#include "phishscan/valuation.hpp"

namespace phishscan {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

void RuleConfig::validate() const {
  if (drain_ratio.is_zero() || drain_ratio > Decimal::from_integer(1))
    throw ConfigError("drainRatio must be within (0, 1]");
  if (dust_max_usd.is_zero()) throw ConfigError("dustMaxUsd must be positive");
  similarity.validate();
}

std::string RuleConfig::to_json() const {
  json j;
  j["drainRatio"] = drain_ratio.str();
  j["dustMaxUsd"] = dust_max_usd.str();
  j["freeOrderMaxPriceWei"] = to_dec(free_order_max_price_wei);
  j["prefixNibbles"] = similarity.prefix_nibbles;
  j["suffixNibbles"] = similarity.suffix_nibbles;
  return j.dump();
}

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return v.dump();
  throw ConfigError("expected a number or numeric string");
}

}  // namespace

RuleConfig RuleConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("rule config is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("rule config must be a JSON object");
  RuleConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "drainRatio") c.drain_ratio = Decimal::parse(scalar_text(value));
      else if (key == "dustMaxUsd") c.dust_max_usd = Decimal::parse(scalar_text(value));
      else if (key == "freeOrderMaxPriceWei") c.free_order_max_price_wei = parse_u256(scalar_text(value));
      else if (key == "prefixNibbles") c.similarity.prefix_nibbles = value.get<unsigned>();
      else if (key == "suffixNibbles") c.similarity.suffix_nibbles = value.get<unsigned>();
      else throw ConfigError("unknown rule config key '" + key + "'");
    }
  } catch (const ParseError& e) {
    throw ConfigError(std::string("rule config: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("rule config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string_view to_string(PoisonKind k) noexcept {
  switch (k) {
    case PoisonKind::ZeroValue: return "ZeroValue";
    case PoisonKind::FakeToken: return "FakeToken";
    case PoisonKind::DustValue: return "DustValue";
  }
  return "?";
}

PoisonKind parse_poison_kind(std::string_view text) {
  for (auto k : {PoisonKind::ZeroValue, PoisonKind::FakeToken, PoisonKind::DustValue})
    if (to_string(k) == text) return k;
  throw ParseError("unknown poison kind '" + std::string(text) + "'");
}

std::string encode_attack(const AttackRecord& r) {
  json victims = json::array();
  for (const auto& v : r.poisoned_victims) victims.push_back(v.hex());
  json j{{"txHash", r.tx_hash.hex()},
         {"blockNumber", r.block_number},
         {"timestamp", r.timestamp},
         {"attacker", r.attacker.hex()},
         {"kind", to_string(r.kind)},
         {"poisonedVictims", std::move(victims)},
         {"gasUsed", r.gas_used},
         {"effectiveGasPriceWei", to_dec(r.effective_gas_price_wei)}};
  return j.dump();
}

AttackRecord decode_attack(std::string_view json_line) {
  try {
    const auto j = json::parse(json_line);
    AttackRecord r;
    r.tx_hash = Hash32::from_hex(j.at("txHash").get<std::string>());
    r.block_number = j.at("blockNumber").get<std::uint64_t>();
    r.timestamp = j.at("timestamp").get<std::uint64_t>();
    r.attacker = normalize_address(j.at("attacker").get<std::string>());
    r.kind = parse_poison_kind(j.at("kind").get<std::string>());
    for (const auto& v : j.at("poisonedVictims")) r.poisoned_victims.push_back(normalize_address(v.get<std::string>()));
    r.gas_used = j.at("gasUsed").get<std::uint64_t>();
    r.effective_gas_price_wei = parse_u256(j.at("effectiveGasPriceWei").get<std::string>());
    if (r.poisoned_victims.empty()) throw ValidationError("attack record without victims");
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed attack record: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Preparation

TxFacts prepare_tx(const Transaction& tx, std::uint64_t timestamp, const ReferenceData& ref, const Decoder& decoder,
                   ChainSource& chain) {
  TxFacts f;
  f.tx = &tx;
  f.timestamp = timestamp;
  if (!tx.succeeded()) return f;
  f.transfers = extract_transfers(tx, &f.diag);
  f.token_call = decoder.decode_token_call(tx, ref.registry, &f.diag);
  if (f.token_call) f.grant = call_record_from(tx, *f.token_call);
  f.market_call = decoder.decode_market_order(
      tx, ref.registry, [&chain](const Address& proxy) { return chain.proxy_owner(proxy); }, &f.diag);
  if (tx.to && tx.value_wei > 0 && tx.logs.empty()) {
    const auto sel = selector_of(tx.input);
    if (sel && classify_selector(*sel, ref.registry) != SelectorClass::None) f.to_has_code = chain.has_code(*tx.to);
  }
  return f;
}

namespace {

Verdict base_verdict(const TxFacts& f, SubCategory sub) {
  Verdict v;
  v.tx_hash = f.tx->hash;
  v.block_number = f.tx->block_number;
  v.timestamp = f.timestamp;
  v.tx_index = f.tx->tx_index;
  v.sub_category = sub;
  v.category = category_of(sub);
  return v;
}

void add_unique(std::vector<Address>& list, const Address& a) {
  if (std::find(list.begin(), list.end(), a) == list.end()) list.push_back(a);
}

std::optional<std::uint64_t> before(std::uint64_t block) {
  if (block == 0) return std::nullopt;
  return block - 1;
}

std::optional<CallRecord> find_enabling_grant(const TxFacts& f, const DetectionContext& ctx, const Address& owner) {
  const Address& grantee = f.tx->from;
  if (ctx.block) {
    for (std::size_t j = std::min<std::size_t>(f.tx->tx_index, ctx.block->size()); j-- > 0;) {
      const auto& g = (*ctx.block)[j].grant;
      if (g && g->owner == owner && g->grantee == grantee && !g->is_revoke()) return g;
    }
  }
  if (auto up = before(f.tx->block_number)) return ctx.history.find_grant(owner, grantee, GrantKinds::all(), *up);
  return std::nullopt;
}

SubCategory ice_sub(GrantKind k) {
  switch (k) {
    case GrantKind::Approve:
    case GrantKind::IncreaseAllowance:
      return SubCategory::Approve;
    case GrantKind::Permit:
    case GrantKind::Permit2:
      return SubCategory::Permit;
    case GrantKind::SetApprovalForAll:
      return SubCategory::SetApproveForAll;
  }
  return SubCategory::Approve;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ice phishing

std::vector<Verdict> detect_ice(const TxFacts& f, const DetectionContext& ctx, Diagnostics* diag) {
  std::vector<Verdict> out;
  const Transaction& tx = *f.tx;
  if (!tx.succeeded() || ctx.ref.registry.is_authorized(tx.from)) return out;

  struct Group {
    Address victim;
    Address token;
    TransferKind kind;
    U256 total = 0;
    std::vector<const TransferEvent*> legs;
  };
  std::vector<Group> groups;
  for (const auto& e : f.transfers) {
    if (e.kind == TransferKind::Native || e.from == tx.from) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.victim == e.from && g.token == *e.token && g.kind == e.kind;
    });
    if (it == groups.end()) {
      groups.push_back(Group{e.from, *e.token, e.kind, 0, {}});
      it = std::prev(groups.end());
    }
    it->total += e.kind == TransferKind::Erc721 ? U256(1) : e.amount;
    it->legs.push_back(&e);
  }

  const BigInt unit = BigInt(Decimal::from_integer(1).scaled());
  std::vector<Address> victims;
  std::map<Address, std::vector<const Group*>> drained;
  for (const auto& g : groups) {
    if (g.total == 0) continue;
    U256 balance;
    try {
      balance = ctx.chain.balance_of(BalanceKey{g.token, g.victim, tx.block_number});
    } catch (const UnavailableError&) {
      if (diag) ++diag->balance_unavailable;
      continue;
    }
    if (balance == 0) continue;
    if (BigInt(g.total) * unit < ctx.cfg.drain_ratio.scaled() * BigInt(balance)) continue;
    if (!drained.contains(g.victim)) victims.push_back(g.victim);
    drained[g.victim].push_back(&g);
  }

  for (const auto& victim : victims) {
    const auto grant = find_enabling_grant(f, ctx, victim);
    if (!grant) continue;
    Verdict v = base_verdict(f, ice_sub(grant->kind));
    v.victim = victim;
    v.scammer.push_back(tx.from);
    for (const Group* g : drained[victim])
      for (const TransferEvent* e : g->legs) {
        v.assets.push_back(leg_from(*e));
        if (e->to != victim) add_unique(v.scammer, e->to);
      }
    v.evidence.push_back({std::string(rule_id(v.sub_category)), {grant->tx_hash}});
    v.detail["grantKind"] = std::string(to_string(grant->kind));
    v.detail["grantTx"] = grant->tx_hash.hex();
    v.detail["grantBlock"] = std::to_string(grant->block_number);
    v.detail["grantToken"] = grant->token.hex();
    v.detail["spender"] = grant->grantee.hex();
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// NFT orders

std::vector<Verdict> detect_nft_order(const TxFacts& f, const DetectionContext& ctx) {
  std::vector<Verdict> out;
  const Transaction& tx = *f.tx;
  if (!tx.succeeded() || !f.market_call || !tx.to || !ctx.ref.registry.nft_market(*tx.to)) return out;

  if (const auto* order = std::get_if<OrderInfo>(&*f.market_call)) {
    std::vector<std::string> reasons;
    if (order->price_wei <= ctx.cfg.free_order_max_price_wei) reasons.push_back("price=" + to_dec(order->price_wei));
    if (order->fees_bps == 10000) reasons.push_back("fees=100%");
    if (order->recipient != order->offerer) reasons.push_back("recipient≠offerer");
    if (reasons.empty()) return out;
    Verdict v = base_verdict(f, SubCategory::FreeBuyOrder);
    v.victim = order->offerer;
    if (order->recipient != order->offerer) add_unique(v.scammer, order->recipient);
    if (order->buyer != order->offerer) add_unique(v.scammer, order->buyer);
    if (v.scammer.empty()) return out;
    const auto n = order->nft_items.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& item = order->nft_items[i];
      AssetLeg leg{TransferKind::Erc721, item.collection, order->offerer, order->buyer, item.token_id, std::nullopt};
      U256 share = order->price_wei / n;
      if (i == 0) share += order->price_wei % n;
      leg.quote = AssetQuote{order->payment_token, share};
      v.assets.push_back(std::move(leg));
    }
    v.evidence.push_back({"II-C", {}});
    v.detail["market"] = order->market;
    v.detail["offerer"] = order->offerer.hex();
    v.detail["recipient"] = order->recipient.hex();
    v.detail["buyer"] = order->buyer.hex();
    v.detail["priceWei"] = to_dec(order->price_wei);
    v.detail["feesBps"] = std::to_string(order->fees_bps);
    v.detail["reasons"] = join(reasons, "; ");
    out.push_back(std::move(v));
    return out;
  }

  const auto& call = std::get<DecodedCall>(*f.market_call);
  if (call.function_name == "bulkTransfer") {
    const auto* items = call.items_param("transferItems");
    if (!items) return out;
    Verdict v = base_verdict(f, SubCategory::BulkTransfer);
    v.victim = tx.from;
    for (const auto& item : *items) {
      if (item.recipient == tx.from) continue;
      add_unique(v.scammer, item.recipient);
      v.assets.push_back(AssetLeg{TransferKind::Erc721, item.token, tx.from, item.recipient, item.token_id, std::nullopt});
    }
    if (v.scammer.empty()) return out;
    v.evidence.push_back({"II-A", {}});
    v.detail["recipient"] = v.scammer.front().hex();
    v.detail["items"] = std::to_string(v.assets.size());
    out.push_back(std::move(v));
  } else if (call.function_name == "upgradeTo") {
    const auto owner = call.address_param("owner");
    if (!owner || *owner == tx.from) return out;
    Verdict v = base_verdict(f, SubCategory::ProxyUpgrade);
    v.victim = *owner;
    v.scammer.push_back(tx.from);
    v.evidence.push_back({"II-B", {}});
    v.detail["proxy"] = tx.to->hex();
    v.detail["owner"] = owner->hex();
    if (auto impl = call.address_param("implementation")) v.detail["implementation"] = impl->hex();
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Address poisoning

bool is_dust(const TransferEvent& e, const DetectionContext& ctx) {
  if (e.kind == TransferKind::Erc721) return false;
  const auto& prices = ctx.ref.prices;
  const bool fake = e.token && ctx.ref.registry.is_fake_token(*e.token);
  if (!fake && prices.is_priceable(e.token)) {
    try {
      const Decimal usd = usd_value_exact(e.amount, prices.decimals_of(e.token), prices.price_of(e.token, e.block_number));
      return usd < ctx.cfg.dust_max_usd;
    } catch (const UnpriceableError&) {
    }
  }
  unsigned decimals = 18;
  if (e.token)
    if (auto d = ctx.ref.registry.decimals_of(*e.token)) decimals = *d;
  // Fewer than 0.01 whole tokens.
  BigInt amount(e.amount);
  return amount * 100 < boost::multiprecision::pow(BigInt(10), decimals);
}

namespace {

std::optional<std::pair<PoisonKind, TransferRecord>> planted_record(const Address& victim, const Address& dest,
                                                                    std::uint64_t up_to, const DetectionContext& ctx) {
  for (const auto& r : ctx.history.transfers_between(victim, dest, up_to)) {
    if (r.initiator == victim) continue;
    const auto& e = r.event;
    if (e.kind == TransferKind::Erc721) continue;
    if (e.amount == 0) return std::pair{PoisonKind::ZeroValue, r};
    if (e.token && ctx.ref.registry.is_fake_token(*e.token)) return std::pair{PoisonKind::FakeToken, r};
    if (is_dust(e, ctx)) return std::pair{PoisonKind::DustValue, r};
  }
  return std::nullopt;
}

SubCategory poison_sub(PoisonKind k) {
  switch (k) {
    case PoisonKind::ZeroValue: return SubCategory::ZeroValue;
    case PoisonKind::FakeToken: return SubCategory::FakeToken;
    case PoisonKind::DustValue: return SubCategory::DustValue;
  }
  return SubCategory::ZeroValue;
}

}  // namespace

std::vector<Verdict> detect_poisoning_victim(const TxFacts& f, const DetectionContext& ctx) {
  std::vector<Verdict> out;
  const Transaction& tx = *f.tx;
  const auto up_to = before(tx.block_number);
  if (!tx.succeeded() || !up_to) return out;

  std::vector<Address> dests;
  for (const auto& e : f.transfers)
    if (e.from == tx.from && e.to != tx.from && (e.amount > 0 || e.kind == TransferKind::Erc721)) add_unique(dests, e.to);

  for (const auto& dest : dests) {
    const auto planted = planted_record(tx.from, dest, *up_to, ctx);
    if (!planted) continue;
    const auto genuine = ctx.history.find_genuine_similar_transfer(tx.from, dest, *up_to, ctx.cfg.similarity);
    if (!genuine) continue;
    Verdict v = base_verdict(f, poison_sub(planted->first));
    v.victim = tx.from;
    v.scammer.push_back(dest);
    for (const auto& e : f.transfers)
      if (e.from == tx.from && e.to == dest && (e.amount > 0 || e.kind == TransferKind::Erc721))
        v.assets.push_back(leg_from(e));
    v.evidence.push_back(
        {std::string(rule_id(v.sub_category)), {planted->second.event.tx_hash, genuine->event.tx_hash}});
    v.detail["plantedTx"] = planted->second.event.tx_hash.hex();
    v.detail["plantedAmount"] = to_dec(planted->second.event.amount);
    v.detail["plantedToken"] = planted->second.event.token ? planted->second.event.token->hex() : "native";
    v.detail["genuineTx"] = genuine->event.tx_hash.hex();
    v.detail["genuineDest"] = genuine->event.to.hex();
    v.detail["genuineAmount"] = to_dec(genuine->event.amount);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<AttackRecord> detect_poisoning_attack(const TxFacts& f, const DetectionContext& ctx) {
  std::vector<AttackRecord> out;
  const Transaction& tx = *f.tx;
  if (!tx.succeeded()) return out;
  const auto up_to = before(tx.block_number);
  const auto& reg = ctx.ref.registry;

  std::map<PoisonKind, std::vector<Address>> victims;
  std::vector<PoisonKind> order;
  auto note = [&](PoisonKind k, const Address& v) {
    auto& list = victims[k];
    if (list.empty()) order.push_back(k);
    add_unique(list, v);
  };
  for (const auto& e : f.transfers) {
    if (e.kind != TransferKind::Erc20 && e.kind != TransferKind::Native) continue;
    const bool third_party = tx.from != e.from && tx.from != e.to;
    if (e.kind == TransferKind::Erc20 && third_party) {
      if (e.amount == 0 && reg.is_canonical(*e.token)) {
        note(PoisonKind::ZeroValue, e.from);
        continue;
      }
      if (reg.is_fake_token(*e.token)) {
        note(PoisonKind::FakeToken, e.from);
        continue;
      }
    }
    if (e.amount == 0 || !up_to || (e.token && reg.is_fake_token(*e.token))) continue;
    if (!is_dust(e, ctx)) continue;
    if (ctx.history.find_genuine_similar_transfer(e.to, e.from, *up_to, ctx.cfg.similarity))
      note(PoisonKind::DustValue, e.to);
  }
  for (auto k : order) {
    AttackRecord r;
    r.tx_hash = tx.hash;
    r.block_number = tx.block_number;
    r.timestamp = f.timestamp;
    r.attacker = tx.from;
    r.kind = k;
    r.poisoned_victims = victims[k];
    r.gas_used = tx.gas_used;
    r.effective_gas_price_wei = tx.effective_gas_price_wei;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Payable functions

std::vector<Verdict> detect_payable(const TxFacts& f, const DetectionContext& ctx) {
  std::vector<Verdict> out;
  const Transaction& tx = *f.tx;
  if (!tx.succeeded() || !tx.to || tx.value_wei == 0 || !tx.logs.empty() || !f.to_has_code) return out;
  if (ctx.ref.sources.is_verified_source(*tx.to)) return out;
  const auto sel = selector_of(tx.input);
  if (!sel) return out;
  const auto cls = classify_selector(*sel, ctx.ref.registry);
  if (cls == SelectorClass::None) return out;
  Verdict v = base_verdict(f, cls == SelectorClass::Airdrop ? SubCategory::AirdropFunction : SubCategory::WalletFunction);
  v.victim = tx.from;
  v.scammer.push_back(*tx.to);
  v.assets.push_back(AssetLeg{TransferKind::Native, std::nullopt, tx.from, *tx.to, tx.value_wei, std::nullopt});
  v.evidence.push_back({std::string(rule_id(v.sub_category)), {}});
  v.detail["selector"] = sel->hex();
  const auto& names = cls == SelectorClass::Airdrop ? ctx.ref.registry.airdrop_selectors : ctx.ref.registry.wallet_selectors;
  if (auto it = names.find(*sel); it != names.end()) v.detail["function"] = it->second;
  out.push_back(std::move(v));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Verdict> detect_tx(const TxFacts& f, const DetectionContext& ctx, Diagnostics* diag) {
  std::vector<Verdict> out;
  if (!f.tx || !f.tx->succeeded()) return out;
  auto append = [&out](std::vector<Verdict> vs) {
    for (auto& v : vs) out.push_back(std::move(v));
  };
  append(detect_ice(f, ctx, diag));
  append(detect_nft_order(f, ctx));
  append(detect_poisoning_victim(f, ctx));
  append(detect_payable(f, ctx));
  for (auto& v : out) {
    const auto loss = loss_usd(v, ctx.ref.prices, ctx.ref.floors);
    v.loss_usd = loss.usd;
    v.loss_partial = loss.partial;
    if (diag) diag->unpriceable_legs += loss.unpriceable_legs;
  }
  std::stable_sort(out.begin(), out.end(), verdict_less);
  return out;
}

// ---------------------------------------------------------------------------
// Remediation

std::string_view to_string(Remediation r) noexcept {
  switch (r) {
    case Remediation::Revoke: return "Revoke";
    case Remediation::AssetTransfer: return "AssetTransfer";
    case Remediation::None: return "None";
  }
  return "?";
}

Remediation parse_remediation(std::string_view text) {
  for (auto r : {Remediation::Revoke, Remediation::AssetTransfer, Remediation::None})
    if (to_string(r) == text) return r;
  throw ParseError("unknown remediation '" + std::string(text) + "'");
}

Remediation classify_remediation(const Address& victim, const CallRecord& grant, const Verdict& theft,
                                 const HistoryStore& history, ChainSource& chain, const ReferenceData& ref,
                                 std::uint64_t horizon) {
  const auto after = [&](std::uint64_t block, std::uint32_t index) {
    return block > theft.block_number || (block == theft.block_number && index > theft.tx_index);
  };
  for (const auto& c : history.calls_of(victim, theft.block_number, horizon)) {
    if (!after(c.block_number, c.tx_index)) continue;
    if (c.token == grant.token && c.grantee == grant.grantee && c.is_revoke()) return Remediation::Revoke;
  }

  const std::uint64_t state_block = theft.block_number + 1;
  const auto& prices = ref.prices;
  BigInt remaining = 0;
  auto add_balance = [&](const std::optional<Address>& token) {
    try {
      const U256 bal = chain.balance_of(BalanceKey{token, victim, state_block});
      if (bal > 0) remaining += usd_value_exact(bal, prices.decimals_of(token), prices.price_of(token, theft.block_number)).scaled();
    } catch (const UnavailableError&) {
    } catch (const UnpriceableError&) {
    }
  };
  add_balance(std::nullopt);
  for (const auto& [symbol, token] : ref.registry.canonical_tokens) add_balance(token.address);
  if (remaining == 0) return Remediation::None;

  std::map<Address, BigInt> moved;
  std::map<Address, std::uint64_t> first_sent;
  for (const auto& r : history.transfers_of(victim, state_block, horizon)) {
    const auto& e = r.event;
    if (e.from != victim || e.to == victim || e.kind == TransferKind::Erc721) continue;
    if (!prices.is_priceable(e.token)) continue;
    try {
      moved[e.to] += leg_usd(leg_from(e), e.block_number, prices, ref.floors).scaled();
      first_sent.try_emplace(e.to, e.block_number);
    } catch (const UnpriceableError&) {
    }
  }
  for (const auto& [to, usd] : moved) {
    const auto seen = history.first_seen(to);
    const bool fresh = seen && *seen >= first_sent[to];
    if (fresh && usd * 100 >= remaining * 95) return Remediation::AssetTransfer;
  }
  return Remediation::None;
}

}  // namespace phishscan
