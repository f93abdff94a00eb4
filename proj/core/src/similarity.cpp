#include "phishscan/similarity.hpp"

#include <algorithm>

namespace phishscan {

void SimilarityConfig::validate() const {
  const unsigned total = prefix_nibbles + suffix_nibbles;
  if (total < 1 || total > 40 || prefix_nibbles > 40 || suffix_nibbles > 40)
    throw ConfigError("similarity prefix + suffix nibbles must be within 1..40");
}

namespace {

inline unsigned nibble(ByteView a, std::size_t i) noexcept {
  const auto byte = a[i / 2];
  return (i % 2 == 0) ? byte >> 4 : byte & 0xf;
}

}  // namespace

unsigned common_prefix_nibbles(const Address& a, const Address& b) noexcept {
  unsigned n = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto x = a.bytes()[i] ^ b.bytes()[i];
    if (x == 0) {
      n += 2;
      continue;
    }
    return n + ((x & 0xf0) == 0 ? 1 : 0);
  }
  return n;
}

unsigned common_suffix_nibbles(const Address& a, const Address& b) noexcept {
  unsigned n = 0;
  for (std::size_t i = 20; i-- > 0;) {
    const auto x = a.bytes()[i] ^ b.bytes()[i];
    if (x == 0) {
      n += 2;
      continue;
    }
    return n + ((x & 0x0f) == 0 ? 1 : 0);
  }
  return n;
}

bool packed_similar(ByteView a, ByteView b, const SimilarityConfig& cfg) noexcept {
  if (a.size() != b.size()) return false;
  if (std::equal(a.begin(), a.end(), b.begin())) return false;
  const std::size_t width = a.size() * 2;
  if (cfg.prefix_nibbles > width || cfg.suffix_nibbles > width) return false;
  for (std::size_t i = 0; i < cfg.prefix_nibbles; ++i)
    if (nibble(a, i) != nibble(b, i)) return false;
  for (std::size_t i = 0; i < cfg.suffix_nibbles; ++i)
    if (nibble(a, width - 1 - i) != nibble(b, width - 1 - i)) return false;
  return true;
}

bool addresses_similar(const Address& a, const Address& b, const SimilarityConfig& cfg) noexcept {
  return packed_similar(a.view(), b.view(), cfg);
}

}  // namespace phishscan
