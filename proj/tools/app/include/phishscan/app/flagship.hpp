#pragma once

#include <filesystem>

#include "phishscan/types.hpp"

namespace phishscan::app {

/// Transaction hashes of the two well-known incidents written by write_flagship_fixtures.
struct FlagshipTxs {
  Hash32 blur_free_order;     // 5 ETH listing sold with 100% fees to the buyer
  Hash32 genuine_deposit;     // 10M USDT to the real deposit address
  Hash32 forged_transfer;     // 10M fake USDT "from" the exchange to the look-alike
  Hash32 mistaken_transfer;   // 20M USDT to the look-alike
  Hash32 benign_transfer;
  Address blur_victim;
  Address blur_scammer;
  Address exchange_wallet;
  Address genuine_address;
  Address lookalike_address;
};

/// Fixture directory at ETH = 2000 USD.
FlagshipTxs write_flagship_fixtures(const std::filesystem::path& dir);

}  // namespace phishscan::app
