#pragma once

// Planted cash-out graphs: a few organizations of cashiers feeding aggregators that deposit at
// exchanges, plus low-value noise edges and a few unrelated hops.

#include <random>

#include "oracles.hpp"
#include "phishscan/flow.hpp"
#include "scene.hpp"

namespace phishscan::test {

struct PlantedOrgs {
  std::vector<Verdict> verdicts;
  std::vector<FlowEdge> edges;
  ReferenceData ref;
  std::vector<std::set<Address>> orgs;  // planted cashiers and aggregators per organization
  std::set<Address> cashiers, aggregators, depositors;
  std::size_t node_count = 0;
};

inline PlantedOrgs plant_orgs(std::mt19937_64& rng, unsigned n_orgs = 3) {
  PlantedOrgs p;
  unsigned serial = 0;
  auto node = [&](const std::string& tag) {
    ++p.node_count;
    return named("org-graph:" + tag + ":" + std::to_string(rng()) + ":" + std::to_string(serial++));
  };
  auto usd = [&](std::uint64_t lo, std::uint64_t hi) { return Decimal::from_integer(lo + rng() % (hi - lo + 1)); };
  std::vector<Address> all;
  std::vector<Address> cex;
  for (int i = 0; i < 4; ++i) {
    cex.push_back(node("cex"));
    p.ref.registry.cex.insert(cex.back());
    p.depositors.insert(cex.back());
    all.push_back(cex.back());
  }
  std::uint64_t tx = 0;
  for (unsigned o = 0; o < n_orgs; ++o) {
    std::set<Address> members;
    const unsigned n_cashiers = 3 + rng() % 6;
    const unsigned n_aggs = 1 + rng() % 2;
    std::vector<Address> cashiers, aggs;
    for (unsigned i = 0; i < n_cashiers; ++i) cashiers.push_back(node("cashier"));
    for (unsigned i = 0; i < n_aggs; ++i) aggs.push_back(node("agg"));
    for (const auto& c : cashiers) {
      Verdict v;
      v.tx_hash = hash_of("org-graph-tx" + std::to_string(tx++) + ":" + std::to_string(rng()));
      v.block_number = 100 + tx;
      v.category = Category::IcePhishing;
      v.sub_category = SubCategory::Approve;
      v.victim = node("victim");
      v.scammer = {c};
      AssetLeg leg;
      leg.kind = TransferKind::Native;
      leg.from = v.victim;
      leg.to = c;
      leg.amount = 1;
      v.assets = {leg};
      v.evidence = {{"I-A", {}}};
      v.loss_usd = Usd::parse(std::to_string(100 + rng() % 100000) + "." + std::to_string(10 + rng() % 90));
      p.verdicts.push_back(v);
      p.cashiers.insert(c);
      members.insert(c);
      all.push_back(c);
    }
    // Each aggregator hears from at least three cashiers (the first from all), directly or via a relay.
    for (const auto& a : aggs) {
      std::vector<Address> feeders = cashiers;
      std::shuffle(feeders.begin(), feeders.end(), rng);
      if (a != aggs.front()) feeders.resize(3 + rng() % (feeders.size() - 2));
      for (const auto& c : feeders) {
        if (rng() % 4 == 0) {
          const Address relay = node("relay");
          all.push_back(relay);
          p.edges.push_back({c, relay, usd(150, 90000), 1, 2});
          p.edges.push_back({relay, a, usd(150, 90000), 2, 3});
        } else {
          p.edges.push_back({c, a, usd(100, 90000), 1, 2});
        }
      }
      p.edges.push_back({a, cex[rng() % cex.size()], usd(1000, 500000), 3, 4});
      p.aggregators.insert(a);
      members.insert(a);
      all.push_back(a);
    }
    // One-off cashier cash-outs to an exchange or an unrelated wallet.
    for (const auto& c : cashiers)
      if (rng() % 3 == 0) p.edges.push_back({c, rng() % 2 ? cex[rng() % cex.size()] : node("wallet"), usd(100, 5000), 2, 2});
    p.orgs.push_back(members);
  }
  std::set<std::pair<Address, Address>> used;
  for (const auto& e : p.edges) used.insert({e.src, e.dst});
  for (int i = 0; i < 40; ++i) {
    const Address a = all[rng() % all.size()], b = all[rng() % all.size()];
    if (a == b || !used.insert({a, b}).second) continue;
    p.edges.push_back({a, b, Decimal::parse(std::to_string(rng() % 100) + "." + std::to_string(rng() % 100 / 10)), 5, 5});
  }
  std::sort(p.edges.begin(), p.edges.end(), [](const FlowEdge& x, const FlowEdge& y) {
    return std::tie(x.src, x.dst) < std::tie(y.src, y.dst);
  });
  // Merge duplicate (src, dst) pairs as build_flow_edges would.
  std::vector<FlowEdge> merged;
  for (const auto& e : p.edges) {
    if (!merged.empty() && merged.back().src == e.src && merged.back().dst == e.dst) {
      merged.back().total_usd = Decimal::from_scaled(merged.back().total_usd.scaled() + e.total_usd.scaled());
      merged.back().first_block = std::min(merged.back().first_block, e.first_block);
      merged.back().last_block = std::max(merged.back().last_block, e.last_block);
    } else {
      merged.push_back(e);
    }
  }
  p.edges = std::move(merged);
  return p;
}

inline oracle::OrgResult oracle_orgs(const PlantedOrgs& p, const FlowConfig& cfg) {
  std::vector<oracle::OrgEdge> edges;
  for (const auto& e : p.edges) edges.push_back({e.src, e.dst, std::stod(e.total_usd.str())});
  std::set<Address> cex(p.ref.registry.cex.begin(), p.ref.registry.cex.end());
  return oracle::discover(p.cashiers, edges, cex, std::stod(cfg.min_edge_usd.str()), cfg.aggregator_fan_in, cfg.rounds);
}

inline oracle::Role oracle_role(FlowRole r) {
  switch (r) {
    case FlowRole::Cashier: return oracle::Role::Cashier;
    case FlowRole::Aggregator: return oracle::Role::Aggregator;
    case FlowRole::Depositor: return oracle::Role::Depositor;
    case FlowRole::Unknown: return oracle::Role::Unknown;
  }
  return oracle::Role::Unknown;
}

/// Partition (cashiers plus aggregators per organization) of a discovery result.
inline std::set<std::set<Address>> partition_of(const OrgDiscovery& d) {
  std::set<std::set<Address>> out;
  for (const auto& o : d.organizations) {
    std::set<Address> s = o.cashiers;
    s.insert(o.aggregators.begin(), o.aggregators.end());
    out.insert(s);
  }
  return out;
}

}  // namespace phishscan::test
