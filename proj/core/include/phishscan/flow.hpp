#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phishscan/history.hpp"
#include "phishscan/reference.hpp"
#include "phishscan/rules.hpp"
#include "phishscan/valuation.hpp"

namespace phishscan {

struct FlowEdge {
  Address src;
  Address dst;
  Decimal total_usd;
  std::uint64_t first_block = 0;
  std::uint64_t last_block = 0;
  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

/// Aggregates the transfer stream into per-(src,dst) USD edges. Swaps through a DEX router are
/// collapsed into one edge from the payer to the recipient of the router's output, valued at the output.
/// Unpriceable legs contribute 0. Sorted by (src, dst).
std::vector<FlowEdge> build_flow_edges(const std::vector<TransferRecord>& stream, const ReferenceData& ref);

std::string edges_csv(const std::vector<FlowEdge>& edges);

struct FlowConfig {
  Decimal min_edge_usd = Decimal::from_integer(100);
  unsigned aggregator_fan_in = 3;
  unsigned rounds = 3;
};

struct Organization {
  std::string id;  // lowest cashier address
  std::set<Address> cashiers;
  std::set<Address> aggregators;
  std::set<Address> depositors;
  Usd total_profit_usd;
  std::size_t verdict_count = 0;

  friend bool operator==(const Organization&, const Organization&) = default;
};

enum class FlowRole : std::uint8_t { Cashier, Aggregator, Depositor, Unknown };
std::string_view to_string(FlowRole r) noexcept;

struct OrgDiscovery {
  std::vector<Organization> organizations;   // ranked by profit, then id
  std::map<Address, FlowRole> roles;         // every labelled node, including unknowns
  std::vector<FlowEdge> kept_edges;          // edges at or above the pruning threshold
};

/// The address a verdict's profit is credited to: the first scammer receiving one of its assets.
Address verdict_cashier(const Verdict& v);

/// Cashiers are scammers that received stolen assets; expansion follows pruned edges for
/// `rounds` rounds, labelling CEX destinations depositors and destinations fed by at least
/// `aggregator_fan_in` distinct cashiers aggregators. Organizations are connected components of
/// cashiers and their aggregators.
OrgDiscovery discover_orgs(const std::vector<Verdict>& verdicts, const std::vector<FlowEdge>& edges,
                           const ReferenceData& ref, const FlowConfig& cfg);

/// Organizations JSON, including profit share percentages.
std::string organizations_json(const std::vector<Organization>& orgs);

struct StolenNft {
  Address collection;
  U256 token_id = 0;
  Address thief;
  std::uint64_t block_number = 0;
  std::uint32_t tx_index = 0;
};

/// NFTs moved to scammers by NftOrder and setApprovalForAll verdicts.
std::vector<StolenNft> stolen_nfts(const std::vector<Verdict>& verdicts);

struct NftSaleTable {
  std::map<std::string, std::map<std::string, std::uint64_t>> by_market;  // market -> role -> count
  std::uint64_t held = 0;
};

/// Follows each NFT after its theft. A transfer out of the current holder inside a transaction sent
/// to a known market contract is a sale: by the cashier if the thief sold it, otherwise by a fund aggregator.
NftSaleTable track_nft_sales(const std::vector<StolenNft>& stolen, const std::vector<TransferRecord>& stream,
                             const LabelRegistry& registry);

struct GasSummary {
  BigInt total_wei = 0;
  std::map<std::string, BigInt> per_day_wei;  // UTC date "YYYY-MM-DD"
  [[nodiscard]] std::string total_eth() const { return format_eth(total_wei); }
};

GasSummary poisoning_gas_total(const std::vector<AttackRecord>& records);

/// UTC calendar date of a unix timestamp.
std::string utc_date(std::uint64_t unix_seconds);

}  // namespace phishscan
