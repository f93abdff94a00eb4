#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "phishscan/reference.hpp"
#include "scene.hpp"

using namespace phishscan;
using phishscan::test::TempDir;

namespace {

void put(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const std::string kUsdt = "0xdac17f958d2ee523a2206206994597c13d831ec7";
const std::string kWeth = "0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2";

void minimal_registry(const std::filesystem::path& d) {
  put(d / "authorized.csv", "address,label\n0x1111111254eeb25477b68fb85ed929f73a960582,1inch\n");
  put(d / "cex.csv", "address,exchange\n");
  put(d / "markets.csv", "address,market,adapter\n0x000000000000ad05ccc4f10045630fb830b95127,Blur,blur1\n");
  put(d / "tokens.csv", "symbol,address,decimals\nUSDT," + kUsdt + ",6\nWETH," + kWeth + ",18\n");
  put(d / "selectors.csv", "selector,class,name\n0x4e71d92d,Airdrop,claim\n0x5fba79f5,Wallet,SecurityUpdate\n");
}

}  // namespace

TEST(Registry, LoadsSelectorClasses) {
  TempDir d;
  minimal_registry(d.path());
  const auto reg = load_registry_dir(d.path());
  EXPECT_TRUE(reg.airdrop_selectors.contains(Selector::from_hex("0x4e71d92d")));
  EXPECT_TRUE(reg.wallet_selectors.contains(Selector::from_hex("0x5fba79f5")));
  EXPECT_TRUE(reg.is_authorized(normalize_address("0x1111111254EEB25477B68FB85ED929F73A960582")));
  ASSERT_NE(reg.nft_market(normalize_address("0x000000000000ad05ccc4f10045630fb830b95127")), nullptr);
  EXPECT_EQ(reg.canonical_tokens.at("USDT").decimals, 6u);
}

TEST(Registry, EmptyFilesGiveEmptyValidRegistry) {
  TempDir d;
  for (const auto& [f, h] : std::vector<std::pair<std::string, std::string>>{
           {"authorized.csv", "address\n"}, {"cex.csv", "address\n"}, {"markets.csv", "address,market,adapter\n"},
           {"tokens.csv", "symbol,address,decimals\n"}, {"selectors.csv", "selector,class,name\n"}})
    put(d / f, h);
  const auto reg = load_registry_dir(d.path());
  EXPECT_TRUE(reg.authorized.empty());
  EXPECT_TRUE(reg.airdrop_selectors.empty());
  EXPECT_TRUE(reg.markets.empty());
}

TEST(Registry, SelectorInBothClassesRejected) {
  TempDir d;
  minimal_registry(d.path());
  put(d / "selectors.csv", "selector,class,name\n0x4e71d92d,Airdrop,claim\n0x4e71d92d,Wallet,claim\n");
  EXPECT_THROW(load_registry_dir(d.path()), ValidationError);
}

TEST(Registry, MissingFileIsConfigError) {
  TempDir d;
  minimal_registry(d.path());
  std::filesystem::remove(d / "cex.csv");
  EXPECT_THROW(load_registry_dir(d.path()), ConfigError);
  EXPECT_THROW(load_registry_dir(d / "nope"), ConfigError);
}

TEST(Registry, DuplicatesDeduplicatedAndLoadIdempotent) {
  TempDir d;
  minimal_registry(d.path());
  put(d / "cex.csv", "address\n0x28c6c06298d514db089934071355e5743bf21d60\n0x28C6c06298d514Db089934071355E5743bf21d60\n");
  const auto a = load_registry_dir(d.path());
  const auto b = load_registry_dir(d.path());
  EXPECT_EQ(a.cex.size(), 1u);
  EXPECT_EQ(a, b);
}

TEST(Registry, DecimalsAboveLimitRejected) {
  TempDir d;
  minimal_registry(d.path());
  put(d / "tokens.csv", "symbol,address,decimals\nUSDT," + kUsdt + ",37\n");
  EXPECT_THROW(load_registry_dir(d.path()), ValidationError);
}

TEST(Registry, FakeTokenBySymbolCollision) {
  TempDir d;
  minimal_registry(d.path());
  put(d / "symbols.csv", "address,symbol,decimals\n0x3333333333333333333333333333333333333333,USDT,6\n"
                         "0x4444444444444444444444444444444444444444,PEPE,18\n");
  const auto reg = load_registry_dir(d.path());
  EXPECT_TRUE(reg.is_fake_token(normalize_address("0x3333333333333333333333333333333333333333")));
  EXPECT_FALSE(reg.is_fake_token(normalize_address("0x4444444444444444444444444444444444444444")));
  EXPECT_FALSE(reg.is_fake_token(normalize_address(kUsdt)));
}

class Prices : public ::testing::Test {
protected:
  void SetUp() override {
    minimal_registry(dir.path());
    reg = load_registry_dir(dir.path());
  }
  TempDir dir;
  LabelRegistry reg;
};

TEST_F(Prices, AtOrBeforeLookup) {
  PriceOracle p(reg);
  put(dir / "prices.csv", "token,block,usd\nUSDT,100,1.00\nWETH,90,1800\nWETH,105,1900\n");
  p.load(dir / "prices.csv");
  EXPECT_EQ(p.price_usd(normalize_address(kUsdt), 100), Decimal::parse("1"));
  EXPECT_EQ(p.price_usd(normalize_address(kWeth), 100), Decimal::parse("1800"));
  EXPECT_EQ(p.price_usd(normalize_address(kWeth), 105), Decimal::parse("1900"));
  EXPECT_THROW((void)p.price_usd(normalize_address(kWeth), 89), UnpriceableError);
}

TEST_F(Prices, UnsupportedTokenUnpriceable) {
  PriceOracle p(reg);
  p.add_point("USDT", 1, Decimal::parse("1"));
  EXPECT_THROW((void)p.price_usd(normalize_address("0x6982508145454ce325ddbe47a25d4ec3d2311933"), 10), UnpriceableError);
  EXPECT_FALSE(p.is_priceable(normalize_address("0x6982508145454ce325ddbe47a25d4ec3d2311933")));
}

TEST_F(Prices, NativeUsesEthSeries) {
  PriceOracle p(reg);
  p.add_point("ETH", 10, Decimal::parse("2000"));
  EXPECT_EQ(p.native_price_usd(10), Decimal::parse("2000"));
  EXPECT_EQ(p.price_of(std::nullopt, 11), Decimal::parse("2000"));
  EXPECT_EQ(p.decimals_of(std::nullopt), 18u);
}

TEST(PointSeries, MatchesLinearScanOracle) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    PointSeries s;
    std::vector<std::pair<std::uint64_t, Decimal>> raw;
    for (int i = 0, n = static_cast<int>(rng() % 20); i < n; ++i) {
      const std::uint64_t b = rng() % 100;
      const Decimal v = Decimal::from_integer(static_cast<long long>(rng() % 10'000));
      s.add(b, v);
      raw.emplace_back(b, v);
    }
    for (std::uint64_t q = 0; q < 110; ++q) {
      std::optional<Decimal> expect;
      std::optional<std::uint64_t> at;
      for (const auto& [b, v] : raw)
        if (b <= q && (!at || b >= *at)) {
          at = b;
          expect = v;
        }
      EXPECT_EQ(s.at(q), expect) << "query " << q;
    }
  }
}

TEST(PointSeries, LaterPointNeverChangesEarlierQueries) {
  PointSeries s;
  s.add(10, Decimal::parse("1"));
  s.add(20, Decimal::parse("2"));
  const auto before = s.at(15);
  s.add(30, Decimal::parse("3"));
  EXPECT_EQ(s.at(15), before);
  EXPECT_EQ(s.at(30), Decimal::parse("3"));
}

TEST(Floors, AtOrBeforeAndUnknown) {
  FloorOracle f;
  const Address bayc = normalize_address("0xbc4ca0eda7647a8ab7c2061c2e118a18a936f13d");
  f.add_point(bayc, 100, Decimal::parse("50000"));
  f.add_point(bayc, 200, Decimal::parse("40000"));
  EXPECT_EQ(f.floor_price_usd(bayc, 150), Decimal::parse("50000"));
  EXPECT_EQ(f.floor_price_usd(bayc, 200), Decimal::parse("40000"));
  EXPECT_THROW((void)f.floor_price_usd(bayc, 99), UnpriceableError);
  EXPECT_THROW((void)f.floor_price_usd(Address{}, 150), UnpriceableError);
}

TEST(Sources, MembershipOnly) {
  TempDir d;
  put(d / "verified.csv", "address\n0x5555555555555555555555555555555555555555\n");
  SourceOracle s;
  s.load(d / "verified.csv");
  EXPECT_TRUE(s.is_verified_source(normalize_address("0x5555555555555555555555555555555555555555")));
  EXPECT_FALSE(s.is_verified_source(normalize_address("0x6666666666666666666666666666666666666666")));
}

TEST(Snapshot, ReplaceSwapsAtomically) {
  auto first = std::make_shared<ReferenceData>();
  ReferenceSnapshot snap(first);
  auto next = std::make_shared<ReferenceData>();
  next->sources.add(Address{});
  snap.replace(next);
  EXPECT_TRUE(snap.current()->sources.is_verified_source(Address{}));
  EXPECT_EQ(first.use_count(), 1);
}
