#include "phishscan/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <tuple>

namespace phishscan {

using nlohmann::json;

void validate(const Transaction& tx) {
  if (!tx.logs.empty() && !tx.succeeded()) throw ValidationError("failed transaction carries logs: " + tx.hash.hex());
  for (const auto& log : tx.logs)
    if (log.topics.size() > 4) throw ValidationError("log with more than 4 topics in " + tx.hash.hex());
}

std::optional<Address> DecodedCall::address_param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  if (const auto* a = std::get_if<Address>(&it->second)) return *a;
  return std::nullopt;
}

std::optional<U256> DecodedCall::uint_param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  if (const auto* v = std::get_if<U256>(&it->second)) return *v;
  return std::nullopt;
}

std::optional<bool> DecodedCall::bool_param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  if (const auto* v = std::get_if<bool>(&it->second)) return *v;
  return std::nullopt;
}

const std::vector<TransferItem>* DecodedCall::items_param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) return nullptr;
  return std::get_if<std::vector<TransferItem>>(&it->second);
}

Category category_of(SubCategory sub) noexcept {
  switch (sub) {
    case SubCategory::Approve:
    case SubCategory::Permit:
    case SubCategory::SetApproveForAll:
      return Category::IcePhishing;
    case SubCategory::BulkTransfer:
    case SubCategory::ProxyUpgrade:
    case SubCategory::FreeBuyOrder:
      return Category::NftOrder;
    case SubCategory::ZeroValue:
    case SubCategory::FakeToken:
    case SubCategory::DustValue:
      return Category::AddressPoisoning;
    case SubCategory::AirdropFunction:
    case SubCategory::WalletFunction:
      return Category::PayableFunction;
  }
  return Category::IcePhishing;
}

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::IcePhishing: return "IcePhishing";
    case Category::NftOrder: return "NftOrder";
    case Category::AddressPoisoning: return "AddressPoisoning";
    case Category::PayableFunction: return "PayableFunction";
  }
  return "?";
}

std::string_view to_string(SubCategory s) noexcept {
  switch (s) {
    case SubCategory::Approve: return "Approve";
    case SubCategory::Permit: return "Permit";
    case SubCategory::SetApproveForAll: return "SetApproveForAll";
    case SubCategory::BulkTransfer: return "BulkTransfer";
    case SubCategory::ProxyUpgrade: return "ProxyUpgrade";
    case SubCategory::FreeBuyOrder: return "FreeBuyOrder";
    case SubCategory::ZeroValue: return "ZeroValue";
    case SubCategory::FakeToken: return "FakeToken";
    case SubCategory::DustValue: return "DustValue";
    case SubCategory::AirdropFunction: return "AirdropFunction";
    case SubCategory::WalletFunction: return "WalletFunction";
  }
  return "?";
}

std::string_view rule_id(SubCategory s) noexcept {
  switch (s) {
    case SubCategory::Approve: return "I-A";
    case SubCategory::Permit: return "I-B";
    case SubCategory::SetApproveForAll: return "I-C";
    case SubCategory::BulkTransfer: return "II-A";
    case SubCategory::ProxyUpgrade: return "II-B";
    case SubCategory::FreeBuyOrder: return "II-C";
    case SubCategory::ZeroValue: return "III-A";
    case SubCategory::FakeToken: return "III-B";
    case SubCategory::DustValue: return "III-C";
    case SubCategory::AirdropFunction: return "IV-A";
    case SubCategory::WalletFunction: return "IV-B";
  }
  return "?";
}

Category parse_category(std::string_view text) {
  for (auto c : kAllCategories)
    if (to_string(c) == text) return c;
  throw ParseError("unknown category '" + std::string(text) + "'");
}

SubCategory parse_sub_category(std::string_view text) {
  for (auto s : kAllSubCategories)
    if (to_string(s) == text) return s;
  throw ParseError("unknown sub-category '" + std::string(text) + "'");
}

SubCategory sub_category_from_rule_id(std::string_view id) {
  for (auto s : kAllSubCategories)
    if (rule_id(s) == id) return s;
  throw ParseError("unknown rule id '" + std::string(id) + "'");
}

AssetLeg leg_from(const TransferEvent& e) {
  return AssetLeg{e.kind, e.token, e.from, e.to, e.amount, std::nullopt};
}

void validate(const Verdict& v) {
  if (category_of(v.sub_category) != v.category)
    throw ValidationError(std::string("sub-category ") + std::string(to_string(v.sub_category)) +
                          " is not under " + std::string(to_string(v.category)));
  if (v.evidence.empty()) throw ValidationError("verdict without evidence: " + v.tx_hash.hex());
}

bool verdict_less(const Verdict& a, const Verdict& b) {
  return std::tuple(a.block_number, a.tx_index, a.category, a.sub_category, a.victim, a.tx_hash) <
         std::tuple(b.block_number, b.tx_index, b.category, b.sub_category, b.victim, b.tx_hash);
}

namespace {

std::string_view kind_name(TransferKind k) {
  switch (k) {
    case TransferKind::Native: return "native";
    case TransferKind::Erc20: return "erc20";
    case TransferKind::Erc721: return "erc721";
  }
  return "?";
}

TransferKind parse_kind(std::string_view s) {
  if (s == "native") return TransferKind::Native;
  if (s == "erc20") return TransferKind::Erc20;
  if (s == "erc721") return TransferKind::Erc721;
  throw ParseError("unknown transfer kind '" + std::string(s) + "'");
}

json optional_address(const std::optional<Address>& a) { return a ? json(a->hex()) : json(nullptr); }

std::optional<Address> read_optional_address(const json& j) {
  if (j.is_null()) return std::nullopt;
  return normalize_address(j.get<std::string>());
}

}  // namespace

std::string encode_verdict(const Verdict& v) {
  json j = json::object();
  j["txHash"] = v.tx_hash.hex();
  j["blockNumber"] = v.block_number;
  j["timestamp"] = v.timestamp;
  j["txIndex"] = v.tx_index;
  j["category"] = to_string(v.category);
  j["subCategory"] = to_string(v.sub_category);
  j["ruleId"] = rule_id(v.sub_category);
  json scammers = json::array();
  for (const auto& s : v.scammer) scammers.push_back(s.hex());
  j["scammer"] = std::move(scammers);
  j["victim"] = v.victim.hex();
  json evidence = json::array();
  for (const auto& e : v.evidence) {
    json hashes = json::array();
    for (const auto& h : e.supporting_tx_hashes) hashes.push_back(h.hex());
    evidence.push_back(json{{"ruleId", e.rule_id}, {"supportingTxHashes", std::move(hashes)}});
  }
  j["evidence"] = std::move(evidence);
  json assets = json::array();
  for (const auto& a : v.assets) {
    json leg{{"kind", kind_name(a.kind)},
             {"token", optional_address(a.token)},
             {"from", a.from.hex()},
             {"to", a.to.hex()},
             {"amount", to_dec(a.amount)}};
    if (a.quote) leg["quote"] = json{{"token", optional_address(a.quote->token)}, {"amount", to_dec(a.quote->amount)}};
    assets.push_back(std::move(leg));
  }
  j["assets"] = std::move(assets);
  j["detail"] = v.detail;
  j["lossUsd"] = v.loss_usd ? json(v.loss_usd->str()) : json(nullptr);
  j["lossPartial"] = v.loss_partial;
  return j.dump();
}

Verdict decode_verdict(std::string_view json_line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("verdict is not valid JSON: ") + e.what());
  }
  try {
    Verdict v;
    v.tx_hash = Hash32::from_hex(j.at("txHash").get<std::string>());
    v.block_number = j.at("blockNumber").get<std::uint64_t>();
    v.timestamp = j.value("timestamp", std::uint64_t{0});
    v.tx_index = j.value("txIndex", std::uint32_t{0});
    v.category = parse_category(j.at("category").get<std::string>());
    v.sub_category = parse_sub_category(j.at("subCategory").get<std::string>());
    for (const auto& s : j.at("scammer")) v.scammer.push_back(normalize_address(s.get<std::string>()));
    v.victim = normalize_address(j.at("victim").get<std::string>());
    for (const auto& e : j.at("evidence")) {
      Evidence ev;
      ev.rule_id = e.at("ruleId").get<std::string>();
      for (const auto& h : e.at("supportingTxHashes")) ev.supporting_tx_hashes.push_back(Hash32::from_hex(h.get<std::string>()));
      v.evidence.push_back(std::move(ev));
    }
    if (j.contains("assets")) {
      for (const auto& a : j.at("assets")) {
        AssetLeg leg;
        leg.kind = parse_kind(a.at("kind").get<std::string>());
        leg.token = read_optional_address(a.at("token"));
        leg.from = normalize_address(a.at("from").get<std::string>());
        leg.to = normalize_address(a.at("to").get<std::string>());
        leg.amount = parse_u256(a.at("amount").get<std::string>());
        if (a.contains("quote"))
          leg.quote = AssetQuote{read_optional_address(a["quote"].at("token")),
                                 parse_u256(a["quote"].at("amount").get<std::string>())};
        v.assets.push_back(std::move(leg));
      }
    }
    if (j.contains("detail")) v.detail = j.at("detail").get<std::map<std::string, std::string>>();
    if (!j.at("lossUsd").is_null()) v.loss_usd = Usd::parse(j.at("lossUsd").get<std::string>());
    v.loss_partial = j.value("lossPartial", false);
    validate(v);
    return v;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed verdict: ") + e.what());
  }
}

}  // namespace phishscan
