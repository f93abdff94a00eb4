#include "phishscan/history.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <mutex>

namespace phishscan {

namespace fs = std::filesystem;

std::string_view to_string(GrantKind k) noexcept {
  switch (k) {
    case GrantKind::Approve: return "approve";
    case GrantKind::IncreaseAllowance: return "increaseAllowance";
    case GrantKind::Permit: return "permit";
    case GrantKind::Permit2: return "permit2";
    case GrantKind::SetApprovalForAll: return "setApprovalForAll";
  }
  return "?";
}

bool CallRecord::is_revoke() const {
  if (kind == GrantKind::SetApprovalForAll) return !approved;
  if (kind == GrantKind::IncreaseAllowance) return false;
  return amount == 0;
}

std::optional<CallRecord> call_record_from(const Transaction& tx, const DecodedCall& call) {
  if (!call.function_name) return std::nullopt;
  const std::string& name = *call.function_name;
  CallRecord r;
  if (name == "approve") r.kind = GrantKind::Approve;
  else if (name == "increaseAllowance") r.kind = GrantKind::IncreaseAllowance;
  else if (name == "permit") r.kind = GrantKind::Permit;
  else if (name == "permit2") r.kind = GrantKind::Permit2;
  else if (name == "setApprovalForAll") r.kind = GrantKind::SetApprovalForAll;
  else return std::nullopt;
  auto owner = call.address_param("owner");
  auto grantee = r.kind == GrantKind::SetApprovalForAll ? call.address_param("operator") : call.address_param("spender");
  auto token = call.address_param("token");
  if (!owner || !grantee || !token) return std::nullopt;
  r.tx_hash = tx.hash;
  r.block_number = tx.block_number;
  r.tx_index = tx.tx_index;
  r.owner = *owner;
  r.grantee = *grantee;
  r.token = *token;
  r.amount = call.uint_param("value").value_or(0);
  r.approved = call.bool_param("approved").value_or(true);
  r.submitter = tx.from;
  return r;
}

bool record_before(const TransferRecord& a, const TransferRecord& b) {
  if (a.event.block_number != b.event.block_number) return a.event.block_number < b.event.block_number;
  if (a.tx_index != b.tx_index) return a.tx_index < b.tx_index;
  const std::int64_t la = a.event.log_index ? static_cast<std::int64_t>(*a.event.log_index) : -1;
  const std::int64_t lb = b.event.log_index ? static_cast<std::int64_t>(*b.event.log_index) : -1;
  return la < lb;
}

std::size_t HistoryStore::PairKeyHash::operator()(const PairKey& k) const noexcept {
  return std::hash<Address>{}(k.a) * 1000003u ^ std::hash<Address>{}(k.b);
}

// ---------------------------------------------------------------------------
// Binary log codec

namespace {

enum RecordType : std::uint8_t { kTransfer = 1, kCall = 2, kBlockEnd = 3 };

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;

std::uint64_t fnv1a(std::uint64_t h, const std::uint8_t* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

struct Writer {
  Bytes out;
  void u8(std::uint8_t v) { out.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  template <std::size_t N, typename T>
  void fixed(const FixedBytes<N, T>& v) {
    out.insert(out.end(), v.bytes().begin(), v.bytes().end());
  }
  void u256(const U256& v) {
    const auto w = u256_to_be(v);
    out.insert(out.end(), w.begin(), w.end());
  }
};

struct Reader {
  ByteView in;
  std::size_t pos = 0;
  void need(std::size_t n) const {
    if (in.size() - pos < n) throw ParseError("history record truncated");
  }
  std::uint8_t u8() {
    need(1);
    return in[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[pos++]) << (8 * i);
    return v;
  }
  template <typename F>
  F fixed() {
    need(F::size);
    auto v = F::from_span(in.subspan(pos, F::size));
    pos += F::size;
    return v;
  }
  U256 u256() {
    need(32);
    auto v = u256_from_be(in.subspan(pos, 32));
    pos += 32;
    return v;
  }
};

Bytes encode_transfer(const TransferRecord& r) {
  Writer w;
  const auto& e = r.event;
  w.u8(static_cast<std::uint8_t>(e.kind));
  w.u8(e.token ? 1 : 0);
  w.fixed(e.token.value_or(Address{}));
  w.fixed(e.from);
  w.fixed(e.to);
  w.u256(e.amount);
  w.fixed(e.tx_hash);
  w.u64(e.block_number);
  w.u8(e.log_index ? 1 : 0);
  w.u32(e.log_index.value_or(0));
  w.fixed(r.initiator);
  w.u8(r.tx_to ? 1 : 0);
  w.fixed(r.tx_to.value_or(Address{}));
  w.u32(r.tx_index);
  return w.out;
}

TransferRecord decode_transfer(ByteView payload) {
  Reader rd{payload};
  TransferRecord r;
  auto& e = r.event;
  const auto kind = rd.u8();
  if (kind > 2) throw ParseError("bad transfer kind in history log");
  e.kind = static_cast<TransferKind>(kind);
  const bool has_token = rd.u8() != 0;
  const auto token = rd.fixed<Address>();
  if (has_token) e.token = token;
  e.from = rd.fixed<Address>();
  e.to = rd.fixed<Address>();
  e.amount = rd.u256();
  e.tx_hash = rd.fixed<Hash32>();
  e.block_number = rd.u64();
  const bool has_log = rd.u8() != 0;
  const auto log_index = rd.u32();
  if (has_log) e.log_index = log_index;
  r.initiator = rd.fixed<Address>();
  const bool has_to = rd.u8() != 0;
  const auto to = rd.fixed<Address>();
  if (has_to) r.tx_to = to;
  r.tx_index = rd.u32();
  return r;
}

Bytes encode_call(const CallRecord& c) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(c.kind));
  w.fixed(c.tx_hash);
  w.u64(c.block_number);
  w.u32(c.tx_index);
  w.fixed(c.owner);
  w.fixed(c.grantee);
  w.fixed(c.token);
  w.u256(c.amount);
  w.u8(c.approved ? 1 : 0);
  w.fixed(c.submitter);
  return w.out;
}

CallRecord decode_call(ByteView payload) {
  Reader rd{payload};
  CallRecord c;
  const auto kind = rd.u8();
  if (kind > 4) throw ParseError("bad call kind in history log");
  c.kind = static_cast<GrantKind>(kind);
  c.tx_hash = rd.fixed<Hash32>();
  c.block_number = rd.u64();
  c.tx_index = rd.u32();
  c.owner = rd.fixed<Address>();
  c.grantee = rd.fixed<Address>();
  c.token = rd.fixed<Address>();
  c.amount = rd.u256();
  c.approved = rd.u8() != 0;
  c.submitter = rd.fixed<Address>();
  return c;
}

void frame(Bytes& out, RecordType type, const Bytes& payload) {
  out.push_back(type);
  const auto n = static_cast<std::uint32_t>(payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), payload.begin(), payload.end());
}

}  // namespace

// ---------------------------------------------------------------------------

HistoryStore::HistoryStore(HistoryOptions options) : options_(options) {}

HistoryStore::~HistoryStore() {
  if (log_) {
    try {
      flush();
    } catch (...) {
    }
    std::fclose(log_);
  }
}

std::optional<SnapshotMeta> HistoryStore::read_snapshot(const fs::path& dir) {
  std::ifstream in(dir / "snapshot.json");
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    SnapshotMeta m;
    m.up_to_block = j.at("upToBlock").get<std::uint64_t>();
    m.event_count = j.at("eventCount").get<std::uint64_t>();
    m.checksum = std::stoull(j.at("checksum").get<std::string>(), nullptr, 16);
    m.log_bytes = j.at("logBytes").get<std::uint64_t>();
    return m;
  } catch (const std::exception& e) {
    throw ParseError("malformed snapshot.json: " + std::string(e.what()));
  }
}

std::unique_ptr<HistoryStore> HistoryStore::open(const fs::path& dir, HistoryOptions options) {
  fs::create_directories(dir);
  auto store = std::make_unique<HistoryStore>(options);
  store->dir_ = dir;
  const fs::path log_path = dir / "history.log";

  Bytes data;
  if (fs::exists(log_path)) {
    std::ifstream in(log_path, std::ios::binary);
    data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  const auto snapshot = read_snapshot(dir);
  if (snapshot) {
    if (snapshot->log_bytes > data.size())
      throw ValidationError("history.log is shorter than snapshot.json records");
    if (fnv1a(kFnvOffset, data.data(), snapshot->log_bytes) != snapshot->checksum)
      throw ValidationError("history.log checksum does not match snapshot.json");
  }

  std::vector<TransferRecord> transfers;
  std::vector<CallRecord> calls;
  std::size_t pos = 0, committed = 0;
  while (pos < data.size()) {
    if (data.size() - pos < 5) break;
    const auto type = data[pos];
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(data[pos + 1 + i]) << (8 * i);
    if (data.size() - pos - 5 < len) break;
    const ByteView payload(data.data() + pos + 5, len);
    pos += 5 + len;
    try {
      if (type == kTransfer) {
        transfers.push_back(decode_transfer(payload));
      } else if (type == kCall) {
        calls.push_back(decode_call(payload));
      } else if (type == kBlockEnd) {
        Reader rd{payload};
        const auto number = rd.u64();
        const auto timestamp = rd.u64();
        store->apply_block_locked(number, timestamp, transfers, calls);
        transfers.clear();
        calls.clear();
        committed = pos;
      } else {
        break;
      }
    } catch (const ParseError&) {
      break;
    }
  }
  if (snapshot && committed < snapshot->log_bytes)
    throw ValidationError("history.log is corrupt before the snapshot point");
  if (committed < data.size()) fs::resize_file(log_path, committed);

  store->log_ = std::fopen(log_path.string().c_str(), "ab");
  if (!store->log_) throw ConfigError("cannot open " + log_path.string() + " for append");
  store->log_bytes_ = committed;
  store->checksum_ = fnv1a(kFnvOffset, data.data(), committed);
  return store;
}

void HistoryStore::apply_block_locked(std::uint64_t number, std::uint64_t timestamp,
                                      const std::vector<TransferRecord>& transfers,
                                      const std::vector<CallRecord>& calls) {
  if (up_to_ && number != *up_to_ + 1)
    throw SequencingError("history is at block " + std::to_string(*up_to_) + "; cannot append block " +
                          std::to_string(number));
  for (const auto& r : transfers)
    if (r.event.block_number != number) throw SequencingError("transfer record from another block");
  for (const auto& c : calls)
    if (c.block_number != number) throw SequencingError("call record from another block");

  auto note_seen = [&](const Address& a) { first_seen_.try_emplace(a, number); };
  for (const auto& r : transfers) {
    const auto idx = static_cast<std::uint32_t>(events_.size());
    events_.push_back(r);
    const auto& e = r.event;
    touching_[e.from].push_back(idx);
    if (e.to != e.from) touching_[e.to].push_back(idx);
    auto& pair = directed_[PairKey{e.from, e.to}];
    if (pair.empty()) destinations_[e.from].push_back(e.to);
    pair.push_back(idx);
    note_seen(e.from);
    note_seen(e.to);
  }
  for (const auto& c : calls) {
    const auto idx = static_cast<std::uint32_t>(calls_.size());
    calls_.push_back(c);
    grants_[PairKey{c.owner, c.grantee}].push_back(idx);
    calls_by_owner_[c.owner].push_back(idx);
    note_seen(c.owner);
  }
  timestamps_[number] = timestamp;
  up_to_ = number;
}

void HistoryStore::append_block(std::uint64_t number, std::uint64_t timestamp,
                                const std::vector<TransferRecord>& transfers, const std::vector<CallRecord>& calls) {
  std::unique_lock lock(mutex_);
  apply_block_locked(number, timestamp, transfers, calls);
  if (!log_) return;
  Bytes buf;
  for (const auto& r : transfers) frame(buf, kTransfer, encode_transfer(r));
  for (const auto& c : calls) frame(buf, kCall, encode_call(c));
  Writer end;
  end.u64(number);
  end.u64(timestamp);
  frame(buf, kBlockEnd, end.out);
  if (std::fwrite(buf.data(), 1, buf.size(), log_) != buf.size()) throw ConfigError("cannot write history log");
  log_bytes_ += buf.size();
  checksum_ = fnv1a(checksum_, buf.data(), buf.size());
  if (++blocks_since_snapshot_ >= options_.snapshot_interval) write_snapshot_locked();
}

void HistoryStore::write_snapshot_locked() {
  if (!dir_ || !log_) return;
  std::fflush(log_);
  nlohmann::json j;
  j["upToBlock"] = up_to_.value_or(0);
  j["eventCount"] = events_.size() + calls_.size();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(checksum_));
  j["checksum"] = hex;
  j["logBytes"] = log_bytes_;
  const fs::path tmp = *dir_ / "snapshot.json.tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, *dir_ / "snapshot.json");
  blocks_since_snapshot_ = 0;
}

void HistoryStore::flush() {
  std::unique_lock lock(mutex_);
  if (log_ && up_to_) write_snapshot_locked();
}

std::optional<std::uint64_t> HistoryStore::up_to_block() const {
  std::shared_lock lock(mutex_);
  return up_to_;
}

std::uint64_t HistoryStore::event_count() const {
  std::shared_lock lock(mutex_);
  return events_.size();
}

std::uint64_t HistoryStore::call_count() const {
  std::shared_lock lock(mutex_);
  return calls_.size();
}

std::optional<std::uint64_t> HistoryStore::timestamp_of(std::uint64_t block) const {
  std::shared_lock lock(mutex_);
  auto it = timestamps_.find(block);
  if (it == timestamps_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t HistoryStore::window_start(std::uint64_t up_to) const {
  if (!options_.lookback_blocks || *options_.lookback_blocks == 0) return 0;
  return up_to >= *options_.lookback_blocks ? up_to - *options_.lookback_blocks + 1 : 0;
}

std::optional<CallRecord> HistoryStore::find_grant(const Address& owner, const Address& grantee, GrantKinds kinds,
                                                   std::uint64_t up_to) const {
  std::shared_lock lock(mutex_);
  auto it = grants_.find(PairKey{owner, grantee});
  if (it == grants_.end()) return std::nullopt;
  const auto start = window_start(up_to);
  for (auto idx = it->second.rbegin(); idx != it->second.rend(); ++idx) {
    const auto& c = calls_[*idx];
    if (c.block_number > up_to) continue;
    if (c.block_number < start) break;
    if (kinds.contains(c.kind) && !c.is_revoke()) return c;
  }
  return std::nullopt;
}

std::optional<TransferRecord> HistoryStore::find_prior_transfer_to(const Address& sender, const Address& dest,
                                                                   std::uint64_t up_to) const {
  std::shared_lock lock(mutex_);
  auto it = directed_.find(PairKey{sender, dest});
  if (it == directed_.end()) return std::nullopt;
  const auto start = window_start(up_to);
  for (auto idx : it->second) {
    const auto& r = events_[idx];
    if (r.event.block_number > up_to) break;
    if (r.event.block_number >= start) return r;
  }
  return std::nullopt;
}

std::optional<TransferRecord> HistoryStore::find_genuine_similar_transfer(const Address& sender,
                                                                          const Address& fake_dest,
                                                                          std::uint64_t up_to,
                                                                          const SimilarityConfig& cfg) const {
  std::shared_lock lock(mutex_);
  auto dests = destinations_.find(sender);
  if (dests == destinations_.end()) return std::nullopt;
  const auto start = window_start(up_to);
  const TransferRecord* best = nullptr;
  for (const auto& dest : dests->second) {
    if (!addresses_similar(dest, fake_dest, cfg)) continue;
    for (auto idx : directed_.at(PairKey{sender, dest})) {
      const auto& r = events_[idx];
      if (r.event.block_number > up_to) break;
      if (r.event.block_number < start || r.event.amount == 0) continue;
      if (!best || r.event.amount > best->event.amount ||
          (r.event.amount == best->event.amount && record_before(r, *best)))
        best = &r;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::vector<TransferRecord> HistoryStore::transfers_between(const Address& a, const Address& b,
                                                            std::uint64_t up_to) const {
  std::shared_lock lock(mutex_);
  std::vector<TransferRecord> out;
  const auto start = window_start(up_to);
  auto collect = [&](const Address& x, const Address& y) {
    auto it = directed_.find(PairKey{x, y});
    if (it == directed_.end()) return;
    for (auto idx : it->second) {
      const auto& r = events_[idx];
      if (r.event.block_number > up_to) break;
      if (r.event.block_number >= start) out.push_back(r);
    }
  };
  collect(a, b);
  if (a != b) collect(b, a);
  std::stable_sort(out.begin(), out.end(), record_before);
  return out;
}

std::vector<TransferRecord> HistoryStore::transfers_of(const Address& account, std::uint64_t from_block,
                                                       std::uint64_t to_block) const {
  std::shared_lock lock(mutex_);
  std::vector<TransferRecord> out;
  auto it = touching_.find(account);
  if (it == touching_.end()) return out;
  const auto& idxs = it->second;
  auto first = std::lower_bound(idxs.begin(), idxs.end(), from_block,
                                [&](std::uint32_t i, std::uint64_t b) { return events_[i].event.block_number < b; });
  for (; first != idxs.end(); ++first) {
    const auto& r = events_[*first];
    if (r.event.block_number > to_block) break;
    out.push_back(r);
  }
  return out;
}

std::vector<CallRecord> HistoryStore::calls_of(const Address& owner, std::uint64_t from_block,
                                               std::uint64_t to_block) const {
  std::shared_lock lock(mutex_);
  std::vector<CallRecord> out;
  auto it = calls_by_owner_.find(owner);
  if (it == calls_by_owner_.end()) return out;
  for (auto idx : it->second) {
    const auto& c = calls_[idx];
    if (c.block_number < from_block) continue;
    if (c.block_number > to_block) break;
    out.push_back(c);
  }
  return out;
}

std::optional<std::uint64_t> HistoryStore::first_seen(const Address& account) const {
  std::shared_lock lock(mutex_);
  auto it = first_seen_.find(account);
  if (it == first_seen_.end()) return std::nullopt;
  return it->second;
}

std::vector<TransferRecord> HistoryStore::all_transfers() const {
  std::shared_lock lock(mutex_);
  return events_;
}

std::vector<CallRecord> HistoryStore::all_calls() const {
  std::shared_lock lock(mutex_);
  return calls_;
}

}  // namespace phishscan
