#pragma once

#include <string_view>

#include "phishscan/types.hpp"

namespace phishscan {

/// Original Keccak-256 (pre-FIPS padding) as used by the EVM.
Hash32 keccak256(ByteView data);
Hash32 keccak256(std::string_view text);

/// First four bytes of keccak256 of a canonical function signature.
Selector selector_for(std::string_view signature);

}  // namespace phishscan
