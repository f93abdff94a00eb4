#include <httplib.h>

#include <nlohmann/json.hpp>

#include <atomic>

#include "phishscan/ingest.hpp"
#include "phishscan/keccak.hpp"

namespace phishscan {

using nlohmann::json;

namespace {

std::string hex_qty(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  if (v == 0) return "0x0";
  std::string s;
  while (v) {
    s.insert(s.begin(), digits[v & 0xf]);
    v >>= 4;
  }
  return "0x" + s;
}

std::string call_data(std::string_view signature, const std::vector<Address>& args) {
  Bytes data;
  const auto sel = selector_for(signature);
  data.insert(data.end(), sel.bytes().begin(), sel.bytes().end());
  for (const auto& a : args) {
    data.insert(data.end(), 12, 0);
    data.insert(data.end(), a.bytes().begin(), a.bytes().end());
  }
  return to_hex(data);
}

}  // namespace

struct JsonRpcSource::Impl {
  std::string scheme_host_port;
  std::string path;
  int timeout_seconds;
  std::atomic<std::uint64_t> next_id{1};

  json post(const json& body) {
    httplib::Client client(scheme_host_port);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw TransportError("rpc " + scheme_host_port + ": " + httplib::to_string(res.error()));
    if (res->status >= 500) throw TransportError("rpc http status " + std::to_string(res->status));
    if (res->status != 200) throw UnavailableError("rpc http status " + std::to_string(res->status));
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw TransportError(std::string("rpc returned non-JSON body: ") + e.what());
    }
  }

  json request(const std::string& method, json params) {
    const json reply = post(json{{"jsonrpc", "2.0"}, {"id", next_id++}, {"method", method}, {"params", std::move(params)}});
    if (reply.contains("error") && !reply["error"].is_null())
      throw UnavailableError(method + ": " + reply["error"].value("message", reply["error"].dump()));
    return reply.value("result", json());
  }

  std::vector<json> batch(const std::string& method, const std::vector<json>& params) {
    if (params.empty()) return {};
    json body = json::array();
    const std::uint64_t base = next_id.fetch_add(params.size());
    for (std::size_t i = 0; i < params.size(); ++i)
      body.push_back({{"jsonrpc", "2.0"}, {"id", base + i}, {"method", method}, {"params", params[i]}});
    const json reply = post(body);
    if (!reply.is_array()) throw TransportError(method + ": batch reply is not an array");
    std::vector<json> out(params.size());
    for (const auto& r : reply) {
      const auto id = r.value("id", std::uint64_t{0});
      if (id < base || id >= base + params.size()) continue;
      if (r.contains("error") && !r["error"].is_null())
        throw UnavailableError(method + ": " + r["error"].value("message", r["error"].dump()));
      out[id - base] = r.value("result", json());
    }
    return out;
  }
};

JsonRpcSource::JsonRpcSource(std::string url, int timeout_seconds) : impl_(std::make_unique<Impl>()) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("rpc url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  impl_->scheme_host_port = url.substr(0, path_start);
  impl_->path = path_start == std::string::npos ? "/" : url.substr(path_start);
  impl_->timeout_seconds = timeout_seconds;
}

JsonRpcSource::~JsonRpcSource() = default;

void JsonRpcSource::ping() { impl_->request("eth_blockNumber", json::array()); }

Block JsonRpcSource::block(std::uint64_t number) {
  const json raw = impl_->request("eth_getBlockByNumber", {hex_qty(number), true});
  if (raw.is_null()) throw NotFoundError("block " + std::to_string(number) + " not available from rpc");
  try {
    Block b;
    b.number = number;
    b.timestamp = parse_u256(raw.at("timestamp").get<std::string>()).convert_to<std::uint64_t>();
    std::vector<json> receipt_params;
    for (const auto& t : raw.at("transactions")) receipt_params.push_back(json::array({t.at("hash")}));
    const auto receipts = impl_->batch("eth_getTransactionReceipt", receipt_params);
    std::uint32_t idx = 0;
    for (const auto& t : raw.at("transactions")) {
      const json& rc = receipts[idx];
      if (rc.is_null()) throw TransportError("missing receipt for " + t.at("hash").get<std::string>());
      Transaction tx;
      tx.hash = Hash32::from_hex(t.at("hash").get<std::string>());
      tx.from = normalize_address(t.at("from").get<std::string>());
      if (!t["to"].is_null()) tx.to = normalize_address(t["to"].get<std::string>());
      tx.value_wei = parse_u256(t.at("value").get<std::string>());
      tx.input = parse_hex(t.at("input").get<std::string>());
      tx.status = parse_u256(rc.at("status").get<std::string>()) == 1 ? TxStatus::Success : TxStatus::Failure;
      tx.gas_used = parse_u256(rc.at("gasUsed").get<std::string>()).convert_to<std::uint64_t>();
      const auto& price = rc.contains("effectiveGasPrice") ? rc["effectiveGasPrice"] : t.at("gasPrice");
      tx.effective_gas_price_wei = parse_u256(price.get<std::string>());
      tx.block_number = number;
      tx.tx_index = idx++;
      for (const auto& l : rc.at("logs")) {
        Log log;
        log.emitter = normalize_address(l.at("address").get<std::string>());
        for (const auto& topic : l.at("topics")) log.topics.push_back(Hash32::from_hex(topic.get<std::string>()));
        log.data = parse_hex(l.at("data").get<std::string>());
        tx.logs.push_back(std::move(log));
      }
      b.transactions.push_back(std::move(tx));
    }
    return b;
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed rpc block payload: ") + e.what());
  }
}

U256 JsonRpcSource::balance_of(const BalanceKey& key) {
  // Pre-state of block N is the state at the end of N-1.
  const std::string at = key.block_number == 0 ? "earliest" : hex_qty(key.block_number - 1);
  json result;
  if (!key.token) {
    result = impl_->request("eth_getBalance", {key.holder.hex(), at});
  } else {
    result = impl_->request("eth_call", {json{{"to", key.token->hex()}, {"data", call_data("balanceOf(address)", {key.holder})}}, at});
  }
  if (!result.is_string()) throw UnavailableError("balance query returned no value");
  const auto text = result.get<std::string>();
  if (text == "0x") throw UnavailableError("balanceOf not supported by " + key.token->hex());
  try {
    if (!key.token) return parse_u256(text);
    const Bytes word = parse_hex(text);
    if (word.size() < 32) throw UnavailableError("short balanceOf result");
    return u256_from_be(ByteView(word).subspan(0, 32));
  } catch (const ParseError& e) {
    throw UnavailableError(std::string("bad balance payload: ") + e.what());
  }
}

bool JsonRpcSource::has_code(const Address& account) {
  const json code = impl_->request("eth_getCode", {account.hex(), "latest"});
  return code.is_string() && code.get<std::string>().size() > 2;
}

std::optional<Address> JsonRpcSource::proxy_owner(const Address& proxy) {
  try {
    const json result = impl_->request("eth_call", {json{{"to", proxy.hex()}, {"data", call_data("proxyOwner()", {})}}, "latest"});
    if (!result.is_string()) return std::nullopt;
    const Bytes word = parse_hex(result.get<std::string>());
    if (word.size() < 32) return std::nullopt;
    return address_from_word(ByteView(word).subspan(0, 32));
  } catch (const UnavailableError&) {
    return std::nullopt;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> JsonRpcSource::block_range() {
  const json head = impl_->request("eth_blockNumber", json::array());
  return std::pair<std::uint64_t, std::uint64_t>{0, parse_u256(head.get<std::string>()).convert_to<std::uint64_t>()};
}

std::optional<std::uint64_t> JsonRpcSource::block_of_tx(const Hash32& hash) {
  const json tx = impl_->request("eth_getTransactionByHash", {hash.hex()});
  if (!tx.is_object() || !tx.contains("blockNumber") || tx["blockNumber"].is_null()) return std::nullopt;
  return parse_u256(tx["blockNumber"].get<std::string>()).convert_to<std::uint64_t>();
}

}  // namespace phishscan
