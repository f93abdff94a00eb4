#pragma once

#include "phishscan/types.hpp"

namespace phishscan {

struct SimilarityConfig {
  unsigned prefix_nibbles = 3;
  unsigned suffix_nibbles = 4;

  /// Throws ConfigError unless 1 <= prefix + suffix <= 40.
  void validate() const;
  friend bool operator==(const SimilarityConfig&, const SimilarityConfig&) = default;
};

/// Leading hex digits shared by two addresses (0..40).
unsigned common_prefix_nibbles(const Address& a, const Address& b) noexcept;
/// Trailing hex digits shared by two addresses (0..40).
unsigned common_suffix_nibbles(const Address& a, const Address& b) noexcept;

/// Similarity over packed big-endian nibble strings of any byte width (addresses are 20 bytes).
/// Inputs of different widths are never similar.
bool packed_similar(ByteView a, ByteView b, const SimilarityConfig& cfg) noexcept;

/// Distinct addresses whose hex forms agree on the configured leading and trailing nibbles.
bool addresses_similar(const Address& a, const Address& b, const SimilarityConfig& cfg) noexcept;

}  // namespace phishscan
