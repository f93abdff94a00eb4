#include "phishscan/types.hpp"

#include <algorithm>

namespace phishscan {

namespace {

int hex_digit(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view strip_prefix(std::string_view text) {
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text.remove_prefix(2);
  return text;
}

}  // namespace

Bytes parse_hex(std::string_view text) {
  text = strip_prefix(text);
  if (text.size() % 2 != 0) throw ParseError("odd-length hex string");
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_digit(text[2 * i]);
    const int lo = hex_digit(text[2 * i + 1]);
    if (hi < 0 || lo < 0) throw ParseError("non-hex character in '" + std::string(text.substr(0, 16)) + "...'");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string to_hex(ByteView bytes, bool prefix) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2 + 2);
  if (prefix) out += "0x";
  for (auto b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xf];
  }
  return out;
}

Address normalize_address(std::string_view hex_text) { return Address::from_hex(hex_text); }

std::string to_dec(const U256& value) { return value.str(); }

U256 parse_u256(std::string_view text) {
  if (text.empty()) throw ParseError("empty integer");
  U256 out = 0;
  static const U256 kMax = ~U256(0);
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    auto digits = text.substr(2);
    if (digits.size() > 64) {
      const auto first = digits.find_first_not_of('0');
      if (first == std::string_view::npos) return 0;
      digits = digits.substr(first);
      if (digits.size() > 64) throw ParseError("hex integer exceeds 256 bits");
    }
    for (char c : digits) {
      const int d = hex_digit(c);
      if (d < 0) throw ParseError("bad hex integer '" + std::string(text) + "'");
      out = (out << 4) | U256(d);
    }
    return out;
  }
  for (char c : text) {
    if (c < '0' || c > '9') throw ParseError("bad decimal integer '" + std::string(text) + "'");
    const U256 d = static_cast<unsigned>(c - '0');
    if (out > (kMax - d) / 10) throw ParseError("decimal integer exceeds 256 bits");
    out = out * 10 + d;
  }
  return out;
}

U256 u256_from_be(ByteView word) {
  U256 out = 0;
  for (auto b : word) out = (out << 8) | U256(b);
  return out;
}

std::array<std::uint8_t, 32> u256_to_be(const U256& value) {
  std::array<std::uint8_t, 32> out{};
  U256 v = value;
  for (int i = 31; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return out;
}

Address address_from_word(ByteView word) {
  if (word.size() != 32) throw DecodeError("address word must be 32 bytes");
  return Address::from_span(word.subspan(12, 20));
}

}  // namespace phishscan
