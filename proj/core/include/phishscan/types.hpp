#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "phishscan/errors.hpp"

namespace phishscan {

/// Unsigned 256-bit integer with wrap-free arithmetic for exact amounts.
using U256 = boost::multiprecision::uint256_t;
/// Arbitrary precision signed integer, used for intermediate products.
using BigInt = boost::multiprecision::cpp_int;

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Parses hex text (optional 0x prefix, any case). Throws ParseError.
Bytes parse_hex(std::string_view text);
std::string to_hex(ByteView bytes, bool prefix = true);

/// Fixed-size byte identifier (addresses, hashes, selectors).
template <std::size_t N, typename Tag>
class FixedBytes {
public:
  static constexpr std::size_t size = N;

  constexpr FixedBytes() = default;
  explicit constexpr FixedBytes(const std::array<std::uint8_t, N>& raw) : bytes_(raw) {}

  static FixedBytes from_span(ByteView view);
  /// Requires exactly 0x + 2N hex characters.
  static FixedBytes from_hex(std::string_view text);

  [[nodiscard]] const std::array<std::uint8_t, N>& bytes() const noexcept { return bytes_; }
  [[nodiscard]] std::array<std::uint8_t, N>& bytes() noexcept { return bytes_; }
  [[nodiscard]] ByteView view() const noexcept { return {bytes_.data(), N}; }
  [[nodiscard]] std::string hex() const { return to_hex(view()); }
  [[nodiscard]] bool is_zero() const noexcept {
    for (auto b : bytes_)
      if (b != 0) return false;
    return true;
  }

  friend constexpr auto operator<=>(const FixedBytes&, const FixedBytes&) = default;

private:
  std::array<std::uint8_t, N> bytes_{};
};

struct AddressTag {};
struct Hash32Tag {};
struct SelectorTag {};

/// 20-byte account identifier. Rendered as lowercase 0x-hex.
using Address = FixedBytes<20, AddressTag>;
using Hash32 = FixedBytes<32, Hash32Tag>;
using Selector = FixedBytes<4, SelectorTag>;

/// Accepts "0x" + 40 hex characters in any case.
Address normalize_address(std::string_view hex_text);

/// Decimal rendering of a U256.
std::string to_dec(const U256& value);
/// Accepts decimal digits or 0x-prefixed hex. Throws ParseError on overflow.
U256 parse_u256(std::string_view text);

/// Big-endian 32-byte word as U256.
U256 u256_from_be(ByteView word);
std::array<std::uint8_t, 32> u256_to_be(const U256& value);

/// Address encoded in the low 20 bytes of a 32-byte word.
Address address_from_word(ByteView word);

struct FixedBytesHash {
  template <std::size_t N, typename Tag>
  std::size_t operator()(const FixedBytes<N, Tag>& v) const noexcept {
    // FNV-1a over the raw bytes; identifiers are already uniformly random.
    std::uint64_t h = 1469598103934665603ull;
    for (auto b : v.bytes()) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

template <std::size_t N, typename Tag>
FixedBytes<N, Tag> FixedBytes<N, Tag>::from_span(ByteView view) {
  if (view.size() != N)
    throw ParseError("expected " + std::to_string(N) + " bytes, got " + std::to_string(view.size()));
  FixedBytes out;
  for (std::size_t i = 0; i < N; ++i) out.bytes_[i] = view[i];
  return out;
}

template <std::size_t N, typename Tag>
FixedBytes<N, Tag> FixedBytes<N, Tag>::from_hex(std::string_view text) {
  if (text.size() != 2 + 2 * N || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
    throw ParseError("expected 0x-prefixed " + std::to_string(2 * N) + " hex chars: '" + std::string(text) + "'");
  return from_span(parse_hex(text));
}

}  // namespace phishscan

template <std::size_t N, typename Tag>
struct std::hash<phishscan::FixedBytes<N, Tag>> {
  std::size_t operator()(const phishscan::FixedBytes<N, Tag>& v) const noexcept {
    return phishscan::FixedBytesHash{}(v);
  }
};
