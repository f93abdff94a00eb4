#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include "phishscan/app/commands.hpp"
#include "phishscan/app/report.hpp"
#include "phishscan/app/thread_pool.hpp"
#include "scene.hpp"

using namespace phishscan;
using namespace phishscan::app;
using namespace phishscan::test;

namespace {

std::vector<Verdict> random_verdicts(std::mt19937_64& rng, std::size_t n) {
  std::vector<Verdict> out;
  for (std::size_t i = 0; i < n; ++i) {
    Verdict v;
    v.tx_hash = hash_of("rv" + std::to_string(i) + ":" + std::to_string(rng()));
    v.block_number = 100 + i;
    v.timestamp = 1'700'000'000 + (rng() % 10) * 86400 + rng() % 86400;
    v.sub_category = kAllSubCategories[rng() % std::size(kAllSubCategories)];
    v.category = category_of(v.sub_category);
    v.victim = named("victim" + std::to_string(i));
    v.scammer = {named("scammer" + std::to_string(rng() % 5))};
    v.evidence = {{std::string(rule_id(v.sub_category)), {v.tx_hash}}};
    if (rng() % 5) v.loss_usd = Usd::from_cents(rng() % 100'000'000);
    out.push_back(v);
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Report, AggregatesEqualRecomputedSums) {
  std::mt19937_64 rng(12);
  const auto verdicts = random_verdicts(rng, 400);
  const auto t = summarize(verdicts);
  std::map<SubCategory, std::pair<std::uint64_t, BigInt>> expect;
  BigInt total = 0;
  std::uint64_t unpriced = 0;
  for (const auto& v : verdicts) {
    auto& e = expect[v.sub_category];
    ++e.first;
    if (v.loss_usd) {
      e.second += v.loss_usd->cents();
      total += v.loss_usd->cents();
    } else {
      ++unpriced;
    }
  }
  for (auto s : kAllSubCategories) {
    EXPECT_EQ(t.by_sub_category.at(s).count, expect[s].first);
    EXPECT_EQ(t.by_sub_category.at(s).loss.cents(), expect[s].second);
  }
  for (auto c : kAllCategories) {
    std::uint64_t n = 0;
    BigInt cents = 0;
    for (const auto& [s, e] : expect)
      if (category_of(s) == c) {
        n += e.first;
        cents += e.second;
      }
    EXPECT_EQ(t.by_category.at(c).count, n);
    EXPECT_EQ(t.by_category.at(c).loss.cents(), cents);
  }
  EXPECT_EQ(t.total.count, verdicts.size());
  EXPECT_EQ(t.total.loss.cents(), total);
  EXPECT_EQ(t.total.unpriced, unpriced);

  std::uint64_t daily_count = 0;
  BigInt daily_cents = 0;
  for (const auto& [day, cell] : daily_losses(verdicts)) {
    daily_count += cell.count;
    daily_cents += cell.loss.cents();
  }
  EXPECT_EQ(daily_count, verdicts.size());
  EXPECT_EQ(daily_cents, total);
}

TEST(Report, CategoriesCsvMatchesRecount) {
  std::mt19937_64 rng(13);
  TempDir d("report");
  const auto verdicts = random_verdicts(rng, 120);
  write_verdicts(d / "v.jsonl", verdicts);
  std::ostringstream out;
  ReportOptions o;
  o.verdicts = d / "v.jsonl";
  o.out_dir = d / "out";
  ASSERT_EQ(cmd_report(o, out), 0);
  const auto rows = read_csv(d / "out" / "categories.csv");
  ASSERT_EQ(rows.size(), std::size(kAllSubCategories) + 2);
  BigInt cents = 0;
  std::uint64_t count = 0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    count += std::stoull(rows[i][3]);
    cents += Usd::parse(rows[i][4]).cents();
  }
  EXPECT_EQ(std::to_string(count), rows.back()[3]);
  EXPECT_EQ(Usd::from_cents(cents).str(), rows.back()[4]);
}

TEST(Report, RemediationThirds) {
  TempDir d("remed");
  std::mt19937_64 rng(1);
  auto verdicts = random_verdicts(rng, 3);
  write_verdicts(d / "v.jsonl", verdicts);
  {
    std::ofstream r(run_paths(d / "v.jsonl").remediation);
    const Remediation kinds[] = {Remediation::Revoke, Remediation::AssetTransfer, Remediation::None};
    for (int i = 0; i < 3; ++i)
      r << encode_remediation({verdicts[i].tx_hash, verdicts[i].victim, SubCategory::Approve, kinds[i]}) << '\n';
  }
  std::ostringstream out;
  ReportOptions o;
  o.verdicts = d / "v.jsonl";
  o.out_dir = d / "out";
  ASSERT_EQ(cmd_report(o, out), 0);
  const auto rows = read_csv(d / "out" / "remediation.csv");
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], "1");
    EXPECT_NEAR(std::stod(rows[i][2]), 33.3, 0.05);
  }
}

TEST(Report, PercentText) {
  EXPECT_EQ(percent_text(1, 3), "33.33");
  EXPECT_EQ(percent_text(2, 3), "66.67");
  EXPECT_EQ(percent_text(0, 0), "0.00");
  EXPECT_EQ(percent_text(5, 5), "100.00");
}

TEST(Report, GrantShareCountsDistinctGrants) {
  Verdict a;
  a.category = Category::IcePhishing;
  a.detail = {{"grantKind", "approve"}, {"grantTx", "0x01"}};
  Verdict b = a;
  Verdict c = a;
  c.detail = {{"grantKind", "permit2"}, {"grantTx", "0x02"}};
  const auto g = grant_share({a, b, c}, GrantTotals{10, 4});
  EXPECT_EQ(g.phishing_approves, 1u);
  EXPECT_EQ(g.phishing_permits, 1u);
  EXPECT_EQ(g.approve_calls, 10u);
}

TEST(Report, ManifestRoundTrip) {
  RunManifest m;
  m.config_hash = "abc123";
  m.input_source = "fixtures";
  m.from = 5;
  m.to = 99;
  for (auto c : kAllCategories) m.verdict_count[std::string(to_string(c))] = static_cast<std::uint64_t>(c) * 3;
  m.elapsed_ms = {{"fetch", 1.5}, {"detect", 22.25}};
  m.diagnostics.decode_errors = 4;
  m.diagnostics.malformed_logs = 1;
  m.grants = {7, 2};
  m.attack_count = 11;
  const auto back = decode_manifest(encode_manifest(m));
  EXPECT_EQ(back.config_hash, m.config_hash);
  EXPECT_EQ(back.input_source, m.input_source);
  EXPECT_EQ(back.from, m.from);
  EXPECT_EQ(back.to, m.to);
  EXPECT_EQ(back.verdict_count, m.verdict_count);
  EXPECT_EQ(back.elapsed_ms, m.elapsed_ms);
  EXPECT_EQ(back.diagnostics, m.diagnostics);
  EXPECT_EQ(back.grants.approve_calls, 7u);
  EXPECT_EQ(back.attack_count, 11u);
  EXPECT_THROW(decode_manifest("[1,2"), ParseError);
}

TEST(Report, VerdictFileRoundTrip) {
  std::mt19937_64 rng(3);
  TempDir d("vf");
  const auto verdicts = random_verdicts(rng, 50);
  write_verdicts(d / "v.jsonl", verdicts);
  EXPECT_EQ(read_verdicts(d / "v.jsonl"), verdicts);
}

TEST(Report, NftSalesRoundTrip) {
  NftSaleTable t;
  t.by_market["Blur"]["cashier"] = 3;
  t.by_market["OpenSea"]["fund aggregator"] = 1;
  t.held = 9;
  const auto back = decode_nft_sales(encode_nft_sales(t));
  EXPECT_EQ(back.by_market, t.by_market);
  EXPECT_EQ(back.held, 9u);
}

TEST(ThreadPool, CoversEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 4u}) {
    ThreadPool pool(threads);
    EXPECT_EQ(pool.size(), threads);
    for (std::size_t n : {0u, 1u, 7u, 1000u}) {
      std::vector<std::atomic<int>> hits(n);
      pool.parallel_for(n, [&](std::size_t i) { ++hits[i]; });
      for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
  }
}

TEST(ThreadPool, RethrowsAfterFinishing) {
  ThreadPool pool(3);
  std::atomic<int> ran{0};
  EXPECT_THROW(pool.parallel_for(50,
                                 [&](std::size_t i) {
                                   ++ran;
                                   if (i == 10) throw std::runtime_error("boom");
                                 }),
               std::runtime_error);
  EXPECT_EQ(ran.load(), 50);
  pool.parallel_for(5, [&](std::size_t) { ++ran; });
  EXPECT_EQ(ran.load(), 55);
  EXPECT_GE(resolve_threads(0), 1u);
  EXPECT_EQ(resolve_threads(3), 3u);
}

TEST(Verdicts, ThreadCountDoesNotChangeOutput) {
  std::string first;
  for (unsigned threads : {1u, 3u}) {
    Scene s;
    const auto usdc = s.usdc();
    for (int i = 0; i < 20; ++i) {
      const Address v = named("v" + std::to_string(i)), sc = named("sc" + std::to_string(i % 4));
      s.fb.hold(usdc, v, BigInt(1000));
      const auto b = s.block();
      s.send(b, "g" + std::to_string(i), v, usdc, token_call("approve", {phishscan::abi::make_address(sc), phishscan::abi::make_uint(1000)}),
             {approval_log(usdc, v, sc, 1000)});
      s.send(s.block(), "d" + std::to_string(i), sc, usdc,
             token_call("transferFrom", {phishscan::abi::make_address(v), phishscan::abi::make_address(sc), phishscan::abi::make_uint(1000)}),
             {erc20_transfer_log(usdc, v, sc, 1000)});
    }
    std::string text;
    for (const auto& v : s.run({}, threads).verdicts) text += encode_verdict(v) + "\n";
    if (first.empty()) first = text;
    EXPECT_EQ(text, first);
    EXPECT_FALSE(text.empty());
  }
}
