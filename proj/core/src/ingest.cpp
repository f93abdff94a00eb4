#include "phishscan/ingest.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <thread>

#include "csv.hpp"
#include "phishscan/keccak.hpp"

namespace phishscan {

namespace fs = std::filesystem;
using nlohmann::json;

const Hash32& transfer_topic() {
  static const Hash32 h = keccak256(std::string_view("Transfer(address,address,uint256)"));
  return h;
}

const Hash32& transfer_single_topic() {
  static const Hash32 h = keccak256(std::string_view("TransferSingle(address,address,address,uint256,uint256)"));
  return h;
}

const Hash32& transfer_batch_topic() {
  static const Hash32 h = keccak256(std::string_view("TransferBatch(address,address,address,uint256[],uint256[])"));
  return h;
}

namespace {

bool is_address_word(const Hash32& topic) {
  for (std::size_t i = 0; i < 12; ++i)
    if (topic.bytes()[i] != 0) return false;
  return true;
}

Address topic_address(const Hash32& topic) { return Address::from_span(topic.view().subspan(12, 20)); }

// Reads a uint256[] at `offset` inside ABI-encoded `data`; nullopt if malformed.
std::optional<std::vector<U256>> read_uint_array(ByteView data, std::size_t offset) {
  if (offset + 32 > data.size()) return std::nullopt;
  const U256 len = u256_from_be(data.subspan(offset, 32));
  if (len > (data.size() - offset - 32) / 32) return std::nullopt;
  const auto n = static_cast<std::size_t>(len);
  std::vector<U256> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(u256_from_be(data.subspan(offset + 32 + 32 * i, 32)));
  return out;
}

std::optional<std::size_t> word_offset(ByteView data, std::size_t at) {
  if (at + 32 > data.size()) return std::nullopt;
  const U256 v = u256_from_be(data.subspan(at, 32));
  if (v > data.size()) return std::nullopt;
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<TransferEvent> extract_transfers(const Transaction& tx, Diagnostics* diag) {
  std::vector<TransferEvent> out;
  if (!tx.succeeded()) return out;
  if (tx.value_wei > 0 && tx.to) {
    TransferEvent e;
    e.kind = TransferKind::Native;
    e.from = tx.from;
    e.to = *tx.to;
    e.amount = tx.value_wei;
    e.tx_hash = tx.hash;
    e.block_number = tx.block_number;
    out.push_back(e);
  }
  auto malformed = [diag] {
    if (diag) ++diag->malformed_logs;
  };
  for (std::size_t i = 0; i < tx.logs.size(); ++i) {
    const Log& log = tx.logs[i];
    if (log.topics.empty()) continue;
    const Hash32& topic0 = log.topics[0];
    TransferEvent e;
    e.token = log.emitter;
    e.tx_hash = tx.hash;
    e.block_number = tx.block_number;
    e.log_index = static_cast<std::uint32_t>(i);

    if (topic0 == transfer_topic()) {
      if (log.topics.size() == 3) {
        if (log.data.size() != 32 || !is_address_word(log.topics[1]) || !is_address_word(log.topics[2])) {
          malformed();
          continue;
        }
        e.kind = TransferKind::Erc20;
        e.amount = u256_from_be(log.data);
      } else if (log.topics.size() == 4) {
        if (!log.data.empty() || !is_address_word(log.topics[1]) || !is_address_word(log.topics[2])) {
          malformed();
          continue;
        }
        e.kind = TransferKind::Erc721;
        e.amount = u256_from_be(log.topics[3].view());
      } else {
        malformed();
        continue;
      }
      e.from = topic_address(log.topics[1]);
      e.to = topic_address(log.topics[2]);
      out.push_back(e);
    } else if (topic0 == transfer_single_topic() || topic0 == transfer_batch_topic()) {
      // ERC-1155 is folded into erc721-kind events, one per token id.
      if (log.topics.size() != 4 || !is_address_word(log.topics[2]) || !is_address_word(log.topics[3])) {
        malformed();
        continue;
      }
      e.kind = TransferKind::Erc721;
      e.from = topic_address(log.topics[2]);
      e.to = topic_address(log.topics[3]);
      if (topic0 == transfer_single_topic()) {
        if (log.data.size() != 64) {
          malformed();
          continue;
        }
        e.amount = u256_from_be(ByteView(log.data).subspan(0, 32));
        out.push_back(e);
      } else {
        const ByteView data(log.data);
        auto ids_at = word_offset(data, 0);
        auto values_at = word_offset(data, 32);
        std::optional<std::vector<U256>> ids, values;
        if (ids_at && values_at) {
          ids = read_uint_array(data, *ids_at);
          values = read_uint_array(data, *values_at);
        }
        if (!ids || !values || ids->size() != values->size()) {
          malformed();
          continue;
        }
        for (const auto& id : *ids) {
          e.amount = id;
          out.push_back(e);
        }
      }
    }
  }
  return out;
}

Block ingest_block(ChainSource& source, std::uint64_t number, int attempts) {
  for (int attempt = 1;; ++attempt) {
    try {
      Block b = source.block(number);
      for (std::size_t i = 0; i < b.transactions.size(); ++i) {
        auto& tx = b.transactions[i];
        if (tx.tx_index != i)
          throw ValidationError("block " + std::to_string(number) + ": tx indices not contiguous at " + std::to_string(i));
        tx.block_number = b.number;
        validate(tx);
      }
      return b;
    } catch (const TransportError&) {
      if (attempt >= attempts) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    }
  }
}

// ---------------------------------------------------------------------------
// Fixture JSON

namespace {

U256 json_u256(const json& j) {
  if (j.is_number_unsigned()) return U256(j.get<std::uint64_t>());
  if (j.is_string()) return parse_u256(j.get<std::string>());
  throw ParseError("expected integer or integer string");
}

std::uint64_t json_u64(const json& j) {
  const U256 v = json_u256(j);
  if (v > std::numeric_limits<std::uint64_t>::max()) throw ParseError("integer exceeds 64 bits");
  return v.convert_to<std::uint64_t>();
}

TxStatus json_status(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "success" || s == "0x1" || s == "1") return TxStatus::Success;
    if (s == "failure" || s == "0x0" || s == "0") return TxStatus::Failure;
    throw ParseError("bad status '" + s + "'");
  }
  if (j.is_boolean()) return j.get<bool>() ? TxStatus::Success : TxStatus::Failure;
  if (j.is_number()) return j.get<int>() != 0 ? TxStatus::Success : TxStatus::Failure;
  throw ParseError("bad status");
}

}  // namespace

Block parse_block_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("block line is not JSON: ") + e.what());
  }
  try {
    Block b;
    b.number = json_u64(j.at("number"));
    b.timestamp = json_u64(j.at("timestamp"));
    std::uint32_t idx = 0;
    for (const auto& t : j.at("txs")) {
      Transaction tx;
      tx.hash = Hash32::from_hex(t.at("hash").get<std::string>());
      tx.from = normalize_address(t.at("from").get<std::string>());
      if (t.contains("to") && !t["to"].is_null()) tx.to = normalize_address(t["to"].get<std::string>());
      tx.value_wei = t.contains("valueWei") ? json_u256(t["valueWei"]) : U256(0);
      tx.input = t.contains("input") ? parse_hex(t["input"].get<std::string>()) : Bytes{};
      tx.status = t.contains("status") ? json_status(t["status"]) : TxStatus::Success;
      tx.gas_used = t.contains("gasUsed") ? json_u64(t["gasUsed"]) : 0;
      tx.effective_gas_price_wei = t.contains("effectiveGasPriceWei") ? json_u256(t["effectiveGasPriceWei"]) : U256(0);
      tx.block_number = b.number;
      tx.tx_index = idx++;
      if (t.contains("logs")) {
        for (const auto& l : t["logs"]) {
          Log log;
          log.emitter = normalize_address(l.at("address").get<std::string>());
          for (const auto& topic : l.at("topics")) log.topics.push_back(Hash32::from_hex(topic.get<std::string>()));
          log.data = parse_hex(l.value("data", std::string("0x")));
          tx.logs.push_back(std::move(log));
        }
      }
      b.transactions.push_back(std::move(tx));
    }
    return b;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed block record: ") + e.what());
  }
}

std::string encode_block_json(const Block& block) {
  // Written by hand so field order is fixed and output is byte-stable.
  std::string out;
  out.reserve(256 + block.transactions.size() * 512);
  out += "{\"number\":" + std::to_string(block.number) + ",\"timestamp\":" + std::to_string(block.timestamp) + ",\"txs\":[";
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    const auto& tx = block.transactions[i];
    if (i) out += ',';
    out += "{\"hash\":\"" + tx.hash.hex() + "\",\"from\":\"" + tx.from.hex() + "\",\"to\":";
    out += tx.to ? "\"" + tx.to->hex() + "\"" : std::string("null");
    out += ",\"valueWei\":\"" + to_dec(tx.value_wei) + "\",\"input\":\"" + to_hex(tx.input) + "\",\"status\":\"";
    out += tx.succeeded() ? "success" : "failure";
    out += "\",\"gasUsed\":" + std::to_string(tx.gas_used) + ",\"effectiveGasPriceWei\":\"" +
           to_dec(tx.effective_gas_price_wei) + "\",\"logs\":[";
    for (std::size_t k = 0; k < tx.logs.size(); ++k) {
      const auto& log = tx.logs[k];
      if (k) out += ',';
      out += "{\"address\":\"" + log.emitter.hex() + "\",\"topics\":[";
      for (std::size_t t = 0; t < log.topics.size(); ++t) {
        if (t) out += ',';
        out += "\"" + log.topics[t].hex() + "\"";
      }
      out += "],\"data\":\"" + to_hex(log.data) + "\"}";
    }
    out += "]}";
  }
  out += "]}";
  return out;
}

// ---------------------------------------------------------------------------
// FixtureSource

std::size_t FixtureSource::HolderKeyHash::operator()(const HolderKey& k) const noexcept {
  std::size_t h = std::hash<Address>{}(k.holder);
  if (k.token) h ^= std::hash<Address>{}(*k.token) * 31;
  return h;
}

std::unique_ptr<FixtureSource> FixtureSource::open(const fs::path& dir) {
  const fs::path blocks_path = dir / "blocks.jsonl";
  std::ifstream in(blocks_path);
  if (!in) throw ConfigError("fixture directory lacks blocks.jsonl: " + dir.string());
  auto src = std::make_unique<FixtureSource>();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      src->add_block(parse_block_json(line));
    } catch (const ParseError& e) {
      throw ParseError(blocks_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  using detail::CsvTable;
  if (fs::exists(dir / "balances.csv")) {
    auto t = CsvTable::read(dir / "balances.csv", {"token", "holder", "block", "amount"});
    for (std::size_t r = 0; r < t.rows(); ++r) {
      std::optional<Address> token;
      if (!t.at(r, "token").empty()) token = normalize_address(t.at(r, "token"));
      src->set_balance(token, normalize_address(t.at(r, "holder")), std::stoull(t.at(r, "block")),
                       parse_u256(t.at(r, "amount")));
    }
  }
  if (fs::exists(dir / "code.csv")) {
    auto t = CsvTable::read(dir / "code.csv", {"address"});
    for (std::size_t r = 0; r < t.rows(); ++r) src->add_code(normalize_address(t.at(r, "address")));
  }
  if (fs::exists(dir / "proxies.csv")) {
    auto t = CsvTable::read(dir / "proxies.csv", {"proxy", "owner"});
    for (std::size_t r = 0; r < t.rows(); ++r)
      src->set_proxy_owner(normalize_address(t.at(r, "proxy")), normalize_address(t.at(r, "owner")));
  }
  return src;
}

void FixtureSource::add_block(Block b) {
  for (std::size_t i = 0; i < b.transactions.size(); ++i) {
    b.transactions[i].block_number = b.number;
    b.transactions[i].tx_index = static_cast<std::uint32_t>(i);
    tx_index_[b.transactions[i].hash] = b.number;
  }
  const auto n = b.number;
  blocks_[n] = std::move(b);
}

void FixtureSource::set_balance(const std::optional<Address>& token, const Address& holder, std::uint64_t block,
                                U256 amount) {
  auto& pts = balances_[HolderKey{token, holder}].points;
  auto it = std::lower_bound(pts.begin(), pts.end(), block, [](const auto& p, std::uint64_t b) { return p.first < b; });
  if (it != pts.end() && it->first == block)
    it->second = std::move(amount);
  else
    pts.insert(it, {block, std::move(amount)});
}

Block FixtureSource::block(std::uint64_t number) {
  auto it = blocks_.find(number);
  if (it == blocks_.end()) throw NotFoundError("block " + std::to_string(number) + " not in fixtures");
  return it->second;
}

U256 FixtureSource::balance_of(const BalanceKey& key) {
  auto it = balances_.find(HolderKey{key.token, key.holder});
  if (it == balances_.end()) return 0;
  const auto& pts = it->second.points;
  auto p = std::upper_bound(pts.begin(), pts.end(), key.block_number,
                            [](std::uint64_t b, const auto& pt) { return b < pt.first; });
  if (p == pts.begin()) return 0;
  return std::prev(p)->second;
}

std::optional<Address> FixtureSource::proxy_owner(const Address& proxy) {
  auto it = proxies_.find(proxy);
  if (it == proxies_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> FixtureSource::block_range() {
  if (blocks_.empty()) return std::nullopt;
  return std::pair{blocks_.begin()->first, blocks_.rbegin()->first};
}

std::optional<std::uint64_t> FixtureSource::block_of_tx(const Hash32& hash) {
  auto it = tx_index_.find(hash);
  if (it == tx_index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace phishscan
