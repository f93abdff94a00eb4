#pragma once

// Random histories over a small address pool with many look-alike pairs.

#include <random>

#include "oracles.hpp"
#include "phishscan/history.hpp"

namespace phishscan::test {

struct RandomHistory {
  struct Block {
    std::uint64_t number = 0;
    std::vector<TransferRecord> transfers;
    std::vector<CallRecord> calls;
  };
  std::vector<Address> pool;
  std::vector<Block> blocks;
  std::vector<TransferRecord> all_transfers;
  std::vector<CallRecord> all_calls;

  void load_into(HistoryStore& store) const {
    for (const auto& b : blocks) store.append_block(b.number, 1'600'000'000 + b.number * 12, b.transfers, b.calls);
  }
};

/// Addresses share one of a few prefixes and suffixes so similar pairs are common.
inline RandomHistory random_history(std::mt19937_64& rng, std::size_t pool_size = 12, std::size_t n_blocks = 30) {
  RandomHistory h;
  const std::uint8_t heads[] = {0xa7, 0xa7, 0x11};
  for (std::size_t i = 0; i < pool_size; ++i) {
    Address a;
    for (auto& b : a.bytes()) b = static_cast<std::uint8_t>(rng());
    a.bytes()[0] = heads[rng() % 3];
    a.bytes()[1] = static_cast<std::uint8_t>(0xb0 | (rng() % 2));
    a.bytes()[18] = 0x05;
    a.bytes()[19] = static_cast<std::uint8_t>(rng() % 2 ? 0x70 : 0x71);
    h.pool.push_back(a);
  }
  auto pick = [&] { return h.pool[rng() % h.pool.size()]; };
  const Address tokens[] = {Address{}, h.pool[0], h.pool[1]};
  std::uint64_t number = 1000 + rng() % 100;
  for (std::size_t bi = 0; bi < n_blocks; ++bi, ++number) {
    RandomHistory::Block b;
    b.number = number;
    const auto ntx = rng() % 5;
    for (std::uint32_t tx = 0; tx < ntx; ++tx) {
      Hash32 hash;
      for (auto& x : hash.bytes()) x = static_cast<std::uint8_t>(rng());
      const auto from = pick();
      if (rng() % 3 == 0) {
        CallRecord c;
        c.tx_hash = hash;
        c.block_number = number;
        c.tx_index = tx;
        c.kind = static_cast<GrantKind>(rng() % 5);
        c.owner = from;
        c.grantee = pick();
        c.token = tokens[1 + rng() % 2];
        c.amount = rng() % 3 == 0 ? 0 : rng() % 1000;
        c.approved = rng() % 3 != 0;
        c.submitter = from;
        b.calls.push_back(c);
      }
      const auto nlogs = rng() % 3;
      std::uint32_t log = 0;
      for (std::uint64_t k = 0; k <= nlogs; ++k) {
        TransferRecord r;
        const bool native = k == 0 && rng() % 2;
        if (k == 0 && !native && rng() % 2) continue;
        r.event.kind = native ? TransferKind::Native : TransferKind::Erc20;
        if (!native) r.event.token = tokens[1 + rng() % 2];
        r.event.from = rng() % 4 == 0 ? pick() : from;
        r.event.to = pick();
        r.event.amount = rng() % 4 == 0 ? 0 : rng() % 50;
        r.event.tx_hash = hash;
        r.event.block_number = number;
        if (!native) r.event.log_index = log++;
        r.initiator = from;
        r.tx_index = tx;
        b.transfers.push_back(r);
      }
    }
    h.all_transfers.insert(h.all_transfers.end(), b.transfers.begin(), b.transfers.end());
    h.all_calls.insert(h.all_calls.end(), b.calls.begin(), b.calls.end());
    h.blocks.push_back(std::move(b));
  }
  return h;
}

struct OracleTally {
  std::size_t queries = 0;
  std::size_t mismatches = 0;
};

/// Builds one random history and compares every query family against the linear scans.
inline OracleTally compare_with_oracles(std::mt19937_64& rng, std::size_t queries = 60) {
  const std::optional<std::uint64_t> lookback =
      rng() % 2 ? std::nullopt : std::optional<std::uint64_t>(5 + rng() % 40);
  HistoryOptions opts;
  opts.lookback_blocks = lookback;
  HistoryStore store(opts);
  const auto h = random_history(rng);
  h.load_into(store);
  OracleTally t;
  if (h.blocks.empty()) return t;
  const auto lo = h.blocks.front().number, hi = h.blocks.back().number;
  const SimilarityConfig sim{3, 4};
  for (std::size_t q = 0; q < queries; ++q) {
    const Address a = h.pool[rng() % h.pool.size()];
    const Address b = h.pool[rng() % h.pool.size()];
    const std::uint64_t up_to = lo + rng() % (hi - lo + 3);
    std::set<GrantKind> kinds;
    GrantKinds bits;
    for (int k = 0; k < 5; ++k)
      if (rng() % 2) {
        kinds.insert(static_cast<GrantKind>(k));
        bits.insert(static_cast<GrantKind>(k));
      }
    t.queries += 3;
    if (store.find_grant(a, b, bits, up_to) != oracle::find_grant(h.all_calls, a, b, kinds, up_to, lookback)) ++t.mismatches;
    if (store.find_prior_transfer_to(a, b, up_to) != oracle::find_prior_transfer_to(h.all_transfers, a, b, up_to, lookback))
      ++t.mismatches;
    if (store.find_genuine_similar_transfer(a, b, up_to, sim) !=
        oracle::find_genuine_similar(h.all_transfers, a, b, up_to, sim.prefix_nibbles, sim.suffix_nibbles, lookback))
      ++t.mismatches;
  }
  return t;
}

}  // namespace phishscan::test
