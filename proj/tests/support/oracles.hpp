#pragma once

// Brute-force reference implementations. They share no code with the library beyond plain data types.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phishscan/history.hpp"
#include "phishscan/model.hpp"

namespace phishscan::oracle {

/// Hex-digit comparison of two equal-length lowercase nibble strings.
inline bool similar_hex(const std::string& a, const std::string& b, unsigned prefix, unsigned suffix) {
  if (a.size() != b.size() || a == b) return false;
  if (prefix + suffix > a.size()) return false;
  for (unsigned i = 0; i < prefix; ++i)
    if (a[i] != b[i]) return false;
  for (unsigned i = 0; i < suffix; ++i)
    if (a[a.size() - 1 - i] != b[b.size() - 1 - i]) return false;
  return true;
}

inline std::string nibbles(const Address& a) { return a.hex().substr(2); }

inline bool chrono_less(const TransferRecord& a, const TransferRecord& b) {
  if (a.event.block_number != b.event.block_number) return a.event.block_number < b.event.block_number;
  if (a.tx_index != b.tx_index) return a.tx_index < b.tx_index;
  const auto la = a.event.log_index ? static_cast<long long>(*a.event.log_index) : -1;
  const auto lb = b.event.log_index ? static_cast<long long>(*b.event.log_index) : -1;
  return la < lb;
}

inline std::uint64_t window_start(std::uint64_t up_to, std::optional<std::uint64_t> lookback) {
  if (!lookback || *lookback == 0) return 0;
  return up_to + 1 > *lookback ? up_to + 1 - *lookback : 0;
}

/// The latest non-revoking grant among `calls` (given in append order).
inline std::optional<CallRecord> find_grant(const std::vector<CallRecord>& calls, const Address& owner,
                                            const Address& grantee, const std::set<GrantKind>& kinds,
                                            std::uint64_t up_to, std::optional<std::uint64_t> lookback) {
  std::optional<CallRecord> best;
  const auto start = window_start(up_to, lookback);
  for (const auto& c : calls) {
    if (c.owner != owner || c.grantee != grantee || !kinds.contains(c.kind)) continue;
    if (c.block_number > up_to || c.block_number < start) continue;
    const bool revoke = c.kind == GrantKind::SetApprovalForAll ? !c.approved
                        : c.kind == GrantKind::IncreaseAllowance ? false
                                                                 : c.amount == 0;
    if (revoke) continue;
    if (!best || c.block_number > best->block_number ||
        (c.block_number == best->block_number && c.tx_index >= best->tx_index))
      best = c;
  }
  return best;
}

inline std::optional<TransferRecord> find_prior_transfer_to(const std::vector<TransferRecord>& log, const Address& sender,
                                                            const Address& dest, std::uint64_t up_to,
                                                            std::optional<std::uint64_t> lookback) {
  std::optional<TransferRecord> best;
  const auto start = window_start(up_to, lookback);
  for (const auto& r : log) {
    if (r.event.from != sender || r.event.to != dest) continue;
    if (r.event.block_number > up_to || r.event.block_number < start) continue;
    if (!best || chrono_less(r, *best)) best = r;
  }
  return best;
}

/// Highest amount, then earliest, over transfers from `sender` to any similar-but-distinct address.
inline std::optional<TransferRecord> find_genuine_similar(const std::vector<TransferRecord>& log, const Address& sender,
                                                          const Address& fake, std::uint64_t up_to, unsigned prefix,
                                                          unsigned suffix, std::optional<std::uint64_t> lookback) {
  std::optional<TransferRecord> best;
  const auto start = window_start(up_to, lookback);
  for (const auto& r : log) {
    if (r.event.from != sender || r.event.amount == 0) continue;
    if (r.event.block_number > up_to || r.event.block_number < start) continue;
    if (!similar_hex(nibbles(r.event.to), nibbles(fake), prefix, suffix)) continue;
    if (!best || r.event.amount > best->event.amount || (r.event.amount == best->event.amount && chrono_less(r, *best)))
      best = r;
  }
  return best;
}

struct OrgEdge {
  Address src, dst;
  double usd;
};

enum class Role { Cashier, Aggregator, Depositor, Unknown };

struct OrgResult {
  std::map<Address, Role> roles;
  std::set<std::set<Address>> partition;  // each set: cashiers and aggregators of one organization
};

/// Enumerates every path of at most `rounds` kept edges out of each cashier by depth-first search,
/// never stepping onto another cashier or continuing past an exchange address.
inline OrgResult discover(const std::set<Address>& cashiers, const std::vector<OrgEdge>& edges, const std::set<Address>& cex,
                          double min_usd, unsigned fan_in, unsigned rounds) {
  std::map<Address, std::vector<Address>> out;
  for (const auto& e : edges)
    if (e.usd >= min_usd) out[e.src].push_back(e.dst);
  std::map<Address, std::set<Address>> reached_by;
  for (const auto& c : cashiers) {
    std::vector<std::pair<Address, unsigned>> stack{{c, 0}};
    while (!stack.empty()) {
      auto [u, d] = stack.back();
      stack.pop_back();
      if (d == rounds) continue;
      if (u != c && cex.contains(u)) continue;
      for (const auto& v : out[u]) {
        if (cashiers.contains(v)) continue;
        reached_by[v].insert(c);
        stack.push_back({v, d + 1});
      }
    }
  }
  OrgResult r;
  for (const auto& c : cashiers) r.roles[c] = Role::Cashier;
  for (const auto& [node, from] : reached_by)
    r.roles[node] = cex.contains(node) ? Role::Depositor : from.size() >= fan_in ? Role::Aggregator : Role::Unknown;

  // Components of the cashier/aggregator incidence graph by repeated flooding.
  std::set<Address> seen;
  for (const auto& c : cashiers) {
    if (seen.contains(c)) continue;
    std::set<Address> comp{c};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& [node, from] : reached_by) {
        if (r.roles[node] != Role::Aggregator) continue;
        bool touches = comp.contains(node);
        for (const auto& x : from) touches = touches || comp.contains(x);
        if (!touches) continue;
        for (const auto& x : from) grew = comp.insert(x).second || grew;
        grew = comp.insert(node).second || grew;
      }
    }
    seen.insert(comp.begin(), comp.end());
    r.partition.insert(comp);
  }
  return r;
}

}  // namespace phishscan::oracle
