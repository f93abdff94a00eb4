#include <gtest/gtest.h>

#include <random>

#include "phishscan/model.hpp"

using namespace phishscan;

namespace {

Address random_address(std::mt19937_64& rng) {
  Address a;
  for (auto& b : a.bytes()) b = static_cast<std::uint8_t>(rng());
  return a;
}

Hash32 random_hash(std::mt19937_64& rng) {
  Hash32 h;
  for (auto& b : h.bytes()) b = static_cast<std::uint8_t>(rng());
  return h;
}

U256 random_u256(std::mt19937_64& rng) {
  U256 v = 0;
  const int words = static_cast<int>(rng() % 5);
  for (int i = 0; i < words; ++i) v = (v << 64) | U256(rng());
  return v;
}

Verdict random_verdict(std::mt19937_64& rng) {
  Verdict v;
  v.tx_hash = random_hash(rng);
  v.block_number = rng() % 20'000'000;
  v.timestamp = 1'600'000'000 + rng() % 100'000'000;
  v.tx_index = static_cast<std::uint32_t>(rng() % 300);
  v.sub_category = kAllSubCategories[rng() % 11];
  v.category = category_of(v.sub_category);
  for (int i = 0, n = 1 + static_cast<int>(rng() % 3); i < n; ++i) v.scammer.push_back(random_address(rng));
  v.victim = random_address(rng);
  Evidence e{std::string(rule_id(v.sub_category)), {}};
  for (int i = 0, n = static_cast<int>(rng() % 3); i < n; ++i) e.supporting_tx_hashes.push_back(random_hash(rng));
  v.evidence.push_back(e);
  for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
    AssetLeg leg;
    leg.kind = static_cast<TransferKind>(rng() % 3);
    if (leg.kind != TransferKind::Native) leg.token = random_address(rng);
    leg.from = random_address(rng);
    leg.to = random_address(rng);
    leg.amount = random_u256(rng);
    if (rng() % 3 == 0) leg.quote = AssetQuote{rng() % 2 ? std::optional<Address>(random_address(rng)) : std::nullopt, random_u256(rng)};
    v.assets.push_back(leg);
  }
  if (rng() % 2) v.detail["reasons"] = "fees=100%";
  if (rng() % 2) v.detail["spender"] = random_address(rng).hex();
  if (rng() % 4) v.loss_usd = Usd::from_cents(BigInt(rng() % 1'000'000'000'000ull));
  v.loss_partial = rng() % 5 == 0;
  return v;
}

}  // namespace

TEST(Verdict, EncodeDecodeRoundTrip) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 3000; ++i) {
    const Verdict v = random_verdict(rng);
    const std::string line = encode_verdict(v);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(decode_verdict(line), v) << line;
  }
}

TEST(Verdict, JsonUsesHexAndDecimalStrings) {
  std::mt19937_64 rng(3);
  Verdict v = random_verdict(rng);
  v.loss_usd = Usd::parse("10000");
  const std::string line = encode_verdict(v);
  EXPECT_NE(line.find("\"lossUsd\":\"10000.00\""), std::string::npos);
  EXPECT_NE(line.find("\"txHash\":\"" + v.tx_hash.hex() + "\""), std::string::npos);
  EXPECT_NE(line.find("\"subCategory\":\"" + std::string(to_string(v.sub_category)) + "\""), std::string::npos);
}

TEST(Verdict, ValidateRejectsInconsistentCategory) {
  std::mt19937_64 rng(5);
  Verdict v = random_verdict(rng);
  v.sub_category = SubCategory::ZeroValue;
  v.category = Category::IcePhishing;
  EXPECT_THROW(validate(v), ValidationError);
  v.category = Category::AddressPoisoning;
  EXPECT_NO_THROW(validate(v));
  v.evidence.clear();
  EXPECT_THROW(validate(v), ValidationError);
}

TEST(Verdict, DecodeRejectsMismatchedCategory) {
  std::mt19937_64 rng(6);
  Verdict v = random_verdict(rng);
  v.sub_category = SubCategory::ZeroValue;
  v.category = Category::AddressPoisoning;
  std::string line = encode_verdict(v);
  const auto at = line.find("\"AddressPoisoning\"");
  ASSERT_NE(at, std::string::npos);
  line.replace(at, std::string("\"AddressPoisoning\"").size(), "\"IcePhishing\"");
  EXPECT_ANY_THROW(decode_verdict(line));
  EXPECT_ANY_THROW(decode_verdict("{not json"));
}

TEST(Verdict, RuleIdsAreStable) {
  const std::vector<std::string> ids = {"I-A", "I-B", "I-C", "II-A", "II-B", "II-C",
                                        "III-A", "III-B", "III-C", "IV-A", "IV-B"};
  for (std::size_t i = 0; i < 11; ++i) {
    EXPECT_EQ(rule_id(kAllSubCategories[i]), ids[i]);
    EXPECT_EQ(sub_category_from_rule_id(ids[i]), kAllSubCategories[i]);
    EXPECT_EQ(parse_sub_category(to_string(kAllSubCategories[i])), kAllSubCategories[i]);
  }
  EXPECT_EQ(to_string(SubCategory::SetApproveForAll), "SetApproveForAll");
}

TEST(Verdict, CanonicalOrder) {
  std::mt19937_64 rng(8);
  Verdict a = random_verdict(rng), b = a;
  a.block_number = 5;
  b.block_number = 6;
  EXPECT_TRUE(verdict_less(a, b));
  b.block_number = 5;
  a.tx_index = b.tx_index;
  a.sub_category = SubCategory::Approve;
  a.category = Category::IcePhishing;
  b.sub_category = SubCategory::ZeroValue;
  b.category = Category::AddressPoisoning;
  EXPECT_TRUE(verdict_less(a, b));
  EXPECT_FALSE(verdict_less(b, a));
}

TEST(Transaction, ValidateInvariants) {
  Transaction tx;
  tx.to = Address{};
  EXPECT_NO_THROW(validate(tx));
  tx.status = TxStatus::Failure;
  tx.logs.push_back(Log{});
  EXPECT_THROW(validate(tx), ValidationError);
  tx.status = TxStatus::Success;
  tx.logs[0].topics.resize(5);
  EXPECT_THROW(validate(tx), ValidationError);
}
