#pragma once

#include <optional>

#include "phishscan/model.hpp"
#include "phishscan/reference.hpp"

namespace phishscan {

struct LossResult {
  std::optional<Usd> usd;  // absent when no leg could be priced
  bool partial = false;    // some legs were unpriceable
  std::size_t unpriceable_legs = 0;
};

/// Exact USD value of one asset leg at `block`: fungible legs via the price oracle, NFTs via the
/// collection floor price, falling back to the leg's payment quote. Throws UnpriceableError.
Decimal leg_usd(const AssetLeg& leg, std::uint64_t block, const PriceOracle& prices, const FloorOracle& floors);

/// Sum over the verdict's legs at the verdict block, rounded half-up to cents once.
LossResult loss_usd(const Verdict& v, const PriceOracle& prices, const FloorOracle& floors);

}  // namespace phishscan
