#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "phishscan/similarity.hpp"

using namespace phishscan;

namespace {

const Address kGenuine = normalize_address("0xa7B4BAC8f0f9692e56750aEFB5f6cB5516E90570");
const Address kFake = normalize_address("0xa7Bf48749D2E4aA29e3209879956b9bAa9E90570");

std::string toy_hex(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

std::array<std::uint8_t, 8> toy_bytes(std::uint64_t v) {
  std::array<std::uint8_t, 8> b{};
  for (int i = 7; i >= 0; --i, v >>= 8) b[i] = static_cast<std::uint8_t>(v);
  return b;
}

}  // namespace

TEST(Similarity, LookalikeDepositPair) {
  const SimilarityConfig cfg;
  EXPECT_TRUE(addresses_similar(kGenuine, kFake, cfg));
  EXPECT_EQ(common_prefix_nibbles(kGenuine, kFake), 3u);
  EXPECT_EQ(common_suffix_nibbles(kGenuine, kFake), 6u);
  EXPECT_FALSE(addresses_similar(kGenuine, kFake, {4, 4}));
}

TEST(Similarity, IrreflexiveAndSymmetric) {
  std::mt19937_64 rng(3);
  const SimilarityConfig cfg{1, 1};
  for (int i = 0; i < 5000; ++i) {
    Address a, b;
    for (auto& x : a.bytes()) x = static_cast<std::uint8_t>(rng());
    b = a;
    EXPECT_FALSE(addresses_similar(a, b, cfg));
    b.bytes()[rng() % 20] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    EXPECT_EQ(addresses_similar(a, b, cfg), addresses_similar(b, a, cfg));
    EXPECT_EQ(addresses_similar(a, b, cfg), oracle::similar_hex(oracle::nibbles(a), oracle::nibbles(b), 1, 1));
  }
}

TEST(Similarity, CommonNibbleCounts) {
  const Address a = normalize_address("0x1234000000000000000000000000000000005678");
  const Address b = normalize_address("0x1235000000000000000000000000000000004678");
  EXPECT_EQ(common_prefix_nibbles(a, b), 3u);
  EXPECT_EQ(common_suffix_nibbles(a, b), 3u);
  EXPECT_EQ(common_prefix_nibbles(a, a), 40u);
  EXPECT_EQ(common_suffix_nibbles(a, a), 40u);
}

TEST(Similarity, PackedWidthMismatch) {
  const std::uint8_t a[] = {0x12, 0x34};
  const std::uint8_t b[] = {0x12, 0x34, 0x34};
  EXPECT_FALSE(packed_similar(ByteView(a), ByteView(b), {1, 1}));
}

TEST(Similarity, RandomToyPairsAgreeWithOracle) {
  std::mt19937_64 rng(17);
  const SimilarityConfig configs[] = {{3, 4}, {1, 1}, {2, 0}, {0, 3}, {8, 8}, {16, 0}};
  for (const auto& cfg : configs) {
    for (int i = 0; i < 20000; ++i) {
      const std::uint64_t x = rng();
      // Bias toward near matches so both outcomes are exercised.
      const std::uint64_t y = (rng() % 2) ? (x ^ (rng() & 0x0000ffffffff0000ull)) : rng();
      const auto bx = toy_bytes(x), by = toy_bytes(y);
      ASSERT_EQ(packed_similar(ByteView(bx), ByteView(by), cfg),
                oracle::similar_hex(toy_hex(x), toy_hex(y), cfg.prefix_nibbles, cfg.suffix_nibbles))
          << toy_hex(x) << " " << toy_hex(y);
    }
  }
}

TEST(SimilarityConfig, Validation) {
  EXPECT_NO_THROW(SimilarityConfig{}.validate());
  EXPECT_NO_THROW((SimilarityConfig{40, 0}.validate()));
  EXPECT_THROW((SimilarityConfig{0, 0}.validate()), ConfigError);
  EXPECT_THROW((SimilarityConfig{30, 11}.validate()), ConfigError);
}
