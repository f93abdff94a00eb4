#include "phishscan/valuation.hpp"

namespace phishscan {

Decimal leg_usd(const AssetLeg& leg, std::uint64_t block, const PriceOracle& prices, const FloorOracle& floors) {
  switch (leg.kind) {
    case TransferKind::Native:
      return usd_value_exact(leg.amount, 18, prices.native_price_usd(block));
    case TransferKind::Erc20:
      return usd_value_exact(leg.amount, prices.decimals_of(leg.token), prices.price_usd(*leg.token, block));
    case TransferKind::Erc721:
      try {
        return floors.floor_price_usd(*leg.token, block);
      } catch (const UnpriceableError&) {
        if (!leg.quote) throw;
        return usd_value_exact(leg.quote->amount, prices.decimals_of(leg.quote->token),
                               prices.price_of(leg.quote->token, block));
      }
  }
  throw UnpriceableError("unknown leg kind");
}

LossResult loss_usd(const Verdict& v, const PriceOracle& prices, const FloorOracle& floors) {
  LossResult out;
  BigInt total = 0;
  bool any = false;
  for (const auto& leg : v.assets) {
    try {
      total += leg_usd(leg, v.block_number, prices, floors).scaled();
      any = true;
    } catch (const UnpriceableError&) {
      ++out.unpriceable_legs;
    }
  }
  out.partial = any && out.unpriceable_legs > 0;
  if (any) out.usd = Usd::round_from(Decimal::from_scaled(total));
  return out;
}

}  // namespace phishscan
