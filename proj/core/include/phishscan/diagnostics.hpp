#pragma once

#include <cstdint>

namespace phishscan {

/// Soft-failure tallies. Accumulated per transaction, merged in block order.
struct Diagnostics {
  std::uint64_t malformed_logs = 0;
  std::uint64_t decode_errors = 0;
  std::uint64_t balance_unavailable = 0;
  std::uint64_t unpriceable_legs = 0;

  Diagnostics& operator+=(const Diagnostics& o) {
    malformed_logs += o.malformed_logs;
    decode_errors += o.decode_errors;
    balance_unavailable += o.balance_unavailable;
    unpriceable_legs += o.unpriceable_legs;
    return *this;
  }
  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

}  // namespace phishscan
