#include "phishscan/flow.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace phishscan {

namespace {

Decimal value_or_zero(const TransferRecord& r, const ReferenceData& ref) {
  try {
    return leg_usd(leg_from(r.event), r.event.block_number, ref.prices, ref.floors);
  } catch (const UnpriceableError&) {
    return Decimal{};
  }
}

struct EdgeAcc {
  BigInt usd = 0;
  std::uint64_t first = 0, last = 0;
};

}  // namespace

std::vector<FlowEdge> build_flow_edges(const std::vector<TransferRecord>& stream, const ReferenceData& ref) {
  const auto& reg = ref.registry;
  std::map<std::pair<Address, Address>, EdgeAcc> acc;
  auto add = [&](const Address& src, const Address& dst, const Decimal& usd, std::uint64_t block) {
    if (src == dst) return;
    auto [it, fresh] = acc.try_emplace({src, dst});
    if (fresh) it->second.first = block;
    it->second.usd += usd.scaled();
    it->second.first = std::min(it->second.first, block);
    it->second.last = std::max(it->second.last, block);
  };

  std::size_t i = 0;
  while (i < stream.size()) {
    std::size_t j = i;
    while (j < stream.size() && stream[j].event.tx_hash == stream[i].event.tx_hash) ++j;
    // One transaction's transfers: [i, j).
    std::vector<const TransferRecord*> inputs, outputs;
    for (std::size_t k = i; k < j; ++k) {
      const auto& e = stream[k].event;
      const bool from_dex = reg.is_dex(e.from), to_dex = reg.is_dex(e.to);
      if (to_dex && !from_dex) inputs.push_back(&stream[k]);
      else if (from_dex && !to_dex) outputs.push_back(&stream[k]);
      else if (!from_dex && !to_dex) add(e.from, e.to, value_or_zero(stream[k], ref), e.block_number);
    }
    if (!inputs.empty()) {
      const auto& payer = inputs.front()->event;
      for (const auto* out : outputs) {
        if (out->event.token == payer.token) continue;
        add(payer.from, out->event.to, value_or_zero(*out, ref), out->event.block_number);
      }
    }
    i = j;
  }

  std::vector<FlowEdge> edges;
  edges.reserve(acc.size());
  for (const auto& [key, a] : acc)
    edges.push_back(FlowEdge{key.first, key.second, Decimal::from_scaled(a.usd), a.first, a.last});
  return edges;
}

std::string edges_csv(const std::vector<FlowEdge>& edges) {
  std::string out = "src,dst,usd,firstBlock,lastBlock\n";
  for (const auto& e : edges)
    out += e.src.hex() + "," + e.dst.hex() + "," + Usd::round_from(e.total_usd).str() + "," +
           std::to_string(e.first_block) + "," + std::to_string(e.last_block) + "\n";
  return out;
}

std::string_view to_string(FlowRole r) noexcept {
  switch (r) {
    case FlowRole::Cashier: return "cashier";
    case FlowRole::Aggregator: return "aggregator";
    case FlowRole::Depositor: return "depositor";
    case FlowRole::Unknown: return "unknown";
  }
  return "?";
}

Address verdict_cashier(const Verdict& v) {
  for (const auto& s : v.scammer)
    for (const auto& a : v.assets)
      if (a.to == s) return s;
  if (v.scammer.empty()) throw ValidationError("verdict without scammer: " + v.tx_hash.hex());
  return v.scammer.front();
}

namespace {

struct UnionFind {
  std::map<Address, Address> parent;
  Address find(const Address& a) {
    auto it = parent.find(a);
    if (it == parent.end()) {
      parent[a] = a;
      return a;
    }
    if (it->second == a) return a;
    const Address root = find(it->second);
    parent[a] = root;
    return root;
  }
  void unite(const Address& a, const Address& b) {
    const Address ra = find(a), rb = find(b);
    if (ra == rb) return;
    // The lower address becomes the root, which is also the organization id.
    if (ra < rb)
      parent[rb] = ra;
    else
      parent[ra] = rb;
  }
};

}  // namespace

OrgDiscovery discover_orgs(const std::vector<Verdict>& verdicts, const std::vector<FlowEdge>& edges,
                           const ReferenceData& ref, const FlowConfig& cfg) {
  OrgDiscovery out;
  if (verdicts.empty()) return out;

  std::set<Address> cashiers;
  for (const auto& v : verdicts) {
    bool any = false;
    for (const auto& s : v.scammer)
      for (const auto& a : v.assets)
        if (a.to == s) {
          cashiers.insert(s);
          any = true;
        }
    if (!any) cashiers.insert(verdict_cashier(v));
  }

  std::map<Address, std::vector<std::pair<Address, const FlowEdge*>>> adj;
  for (const auto& e : edges) {
    if (e.total_usd < cfg.min_edge_usd) continue;
    out.kept_edges.push_back(e);
  }
  for (const auto& e : out.kept_edges) adj[e.src].push_back({e.dst, &e});

  // origins[d] = cashiers with a path of at most `rounds` kept edges to d whose intermediate
  // nodes are neither cashiers nor exchange deposit addresses.
  std::map<Address, std::set<Address>> origins;
  std::map<Address, unsigned> depth;
  std::map<Address, std::set<Address>> layer;
  for (const auto& c : cashiers) {
    layer[c] = {c};
    depth[c] = 0;
  }
  for (unsigned r = 1; r <= cfg.rounds; ++r) {
    std::map<Address, std::set<Address>> next;
    for (const auto& [u, from] : layer) {
      auto it = adj.find(u);
      if (it == adj.end()) continue;
      for (const auto& [d, edge] : it->second) {
        if (cashiers.contains(d)) continue;
        next[d].insert(from.begin(), from.end());
      }
    }
    layer.clear();
    for (auto& [d, from] : next) {
      depth.try_emplace(d, r);
      origins[d].insert(from.begin(), from.end());
      if (!ref.registry.is_cex(d)) layer[d] = std::move(from);
    }
  }

  for (const auto& c : cashiers) out.roles[c] = FlowRole::Cashier;
  for (const auto& [d, from] : origins) {
    if (ref.registry.is_cex(d)) out.roles[d] = FlowRole::Depositor;
    else if (from.size() >= cfg.aggregator_fan_in) out.roles[d] = FlowRole::Aggregator;
    else out.roles[d] = FlowRole::Unknown;
  }

  UnionFind uf;
  for (const auto& c : cashiers) uf.find(c);
  for (const auto& [d, role] : out.roles) {
    if (role != FlowRole::Aggregator) continue;
    const auto& from = origins[d];
    for (const auto& c : from) uf.unite(*from.begin(), c);
  }

  std::map<Address, Organization> orgs;  // keyed by root cashier
  for (const auto& c : cashiers) {
    auto& org = orgs[uf.find(c)];
    org.cashiers.insert(c);
  }
  for (const auto& [d, role] : out.roles)
    if (role == FlowRole::Aggregator) orgs[uf.find(*origins[d].begin())].aggregators.insert(d);

  // Depositors join the organization sending them the most USD.
  for (const auto& [d, role] : out.roles) {
    if (role != FlowRole::Depositor) continue;
    std::map<Address, BigInt> weight;
    for (const auto& e : out.kept_edges) {
      if (e.dst != d) continue;
      auto dp = depth.find(e.src);
      if (dp == depth.end() || dp->second >= cfg.rounds || ref.registry.is_cex(e.src)) continue;
      std::set<Address> roots;
      if (cashiers.contains(e.src)) roots.insert(uf.find(e.src));
      else
        for (const auto& c : origins[e.src]) roots.insert(uf.find(c));
      for (const auto& r : roots) weight[r] += e.total_usd.scaled();
    }
    if (weight.empty()) continue;
    auto best = weight.begin();
    for (auto it = weight.begin(); it != weight.end(); ++it)
      if (it->second > best->second) best = it;
    orgs[best->first].depositors.insert(d);
  }

  for (const auto& v : verdicts) {
    auto& org = orgs[uf.find(verdict_cashier(v))];
    if (v.loss_usd) org.total_profit_usd += *v.loss_usd;
    ++org.verdict_count;
  }
  for (auto& [root, org] : orgs) {
    org.id = root.hex();
    out.organizations.push_back(std::move(org));
  }
  std::stable_sort(out.organizations.begin(), out.organizations.end(), [](const Organization& a, const Organization& b) {
    if (a.total_profit_usd != b.total_profit_usd) return a.total_profit_usd > b.total_profit_usd;
    return a.id < b.id;
  });
  return out;
}

namespace {

// Shares in hundredths of a percent that sum to exactly 10000 (largest remainder).
std::vector<BigInt> share_basis_points(const std::vector<Organization>& orgs) {
  std::vector<BigInt> out(orgs.size(), 0);
  if (orgs.empty()) return out;
  BigInt total = 0;
  for (const auto& o : orgs) total += o.total_profit_usd.cents();
  std::vector<BigInt> weights;
  for (const auto& o : orgs) weights.push_back(total == 0 ? BigInt(1) : o.total_profit_usd.cents());
  if (total == 0) total = orgs.size();
  std::vector<std::pair<BigInt, std::size_t>> remainders;
  BigInt assigned = 0;
  for (std::size_t i = 0; i < orgs.size(); ++i) {
    const BigInt scaled = weights[i] * 10000;
    out[i] = scaled / total;
    assigned += out[i];
    remainders.push_back({scaled % total, i});
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < 10000 && k < remainders.size(); ++k, ++assigned) out[remainders[k].second] += 1;
  return out;
}

std::string basis_points_text(const BigInt& bp) {
  const auto v = bp.convert_to<std::uint64_t>();
  const auto frac = v % 100;
  return std::to_string(v / 100) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
}

}  // namespace

std::string organizations_json(const std::vector<Organization>& orgs) {
  const auto shares = share_basis_points(orgs);
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < orgs.size(); ++i) {
    const auto& o = orgs[i];
    auto list = [](const std::set<Address>& s) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& x : s) a.push_back(x.hex());
      return a;
    };
    arr.push_back({{"rank", i + 1},
                   {"id", o.id},
                   {"cashiers", list(o.cashiers)},
                   {"aggregators", list(o.aggregators)},
                   {"depositors", list(o.depositors)},
                   {"totalProfitUsd", o.total_profit_usd.str()},
                   {"sharePercent", basis_points_text(shares[i])},
                   {"verdictCount", o.verdict_count}});
  }
  return arr.dump(2);
}

std::vector<StolenNft> stolen_nfts(const std::vector<Verdict>& verdicts) {
  std::vector<StolenNft> out;
  for (const auto& v : verdicts) {
    if (v.category != Category::NftOrder && v.sub_category != SubCategory::SetApproveForAll) continue;
    for (const auto& a : v.assets)
      if (a.kind == TransferKind::Erc721 && a.token) out.push_back({*a.token, a.amount, a.to, v.block_number, v.tx_index});
  }
  return out;
}

NftSaleTable track_nft_sales(const std::vector<StolenNft>& stolen, const std::vector<TransferRecord>& stream,
                             const LabelRegistry& registry) {
  NftSaleTable table;
  std::map<std::pair<Address, U256>, std::vector<const TransferRecord*>> moves;
  for (const auto& r : stream)
    if (r.event.kind == TransferKind::Erc721 && r.event.token) moves[{*r.event.token, r.event.amount}].push_back(&r);

  for (const auto& s : stolen) {
    bool sold = false;
    auto it = moves.find({s.collection, s.token_id});
    if (it != moves.end()) {
      Address holder = s.thief;
      for (const auto* r : it->second) {
        const auto& e = r->event;
        if (e.block_number < s.block_number || (e.block_number == s.block_number && r->tx_index <= s.tx_index)) continue;
        if (e.from != holder) continue;
        const MarketEntry* market = r->tx_to ? registry.nft_market(*r->tx_to) : nullptr;
        if (market) {
          ++table.by_market[market->market][holder == s.thief ? "cashier" : "fund aggregator"];
          sold = true;
          break;
        }
        holder = e.to;
      }
    }
    if (!sold) ++table.held;
  }
  return table;
}

std::string utc_date(std::uint64_t unix_seconds) {
  // Civil-from-days, proleptic Gregorian calendar.
  std::int64_t z = static_cast<std::int64_t>(unix_seconds / 86400) + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(m <= 2 ? y + 1 : y), m, d);
  return buf;
}

GasSummary poisoning_gas_total(const std::vector<AttackRecord>& records) {
  GasSummary g;
  for (const auto& r : records) {
    const BigInt wei = BigInt(r.gas_used) * BigInt(r.effective_gas_price_wei);
    g.total_wei += wei;
    g.per_day_wei[utc_date(r.timestamp)] += wei;
  }
  return g;
}

}  // namespace phishscan
