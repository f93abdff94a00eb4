#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "phishscan/app/commands.hpp"
#include "phishscan/app/report.hpp"
#include "scene.hpp"
#include "scoring.hpp"

using namespace phishscan;
using namespace phishscan::app;
using namespace phishscan::test;

namespace {

// One full-size corpus shared by the suite.
class Corpus : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("corpus");
    CorpusOptions o;
    summary_ = generate_corpus(o, corpus());
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::filesystem::path corpus() { return *dir_ / "fixtures"; }
  static std::filesystem::path scratch() { return dir_->path(); }

  static int detect(const std::filesystem::path& out, unsigned threads) {
    DetectOptions o;
    o.source.fixtures = corpus();
    o.out = out;
    o.threads = threads;
    o.quiet = true;
    std::ostringstream sink;
    return cmd_detect(o, sink);
  }

  static TempDir* dir_;
  static CorpusSummary summary_;
};

TempDir* Corpus::dir_ = nullptr;
CorpusSummary Corpus::summary_;

}  // namespace

TEST_F(Corpus, ShapeMatchesOptions) {
  const auto labels = read_labels(corpus() / "labels.csv");
  std::map<std::string, std::size_t> per_rule;
  std::size_t negatives = 0;
  for (const auto& l : labels) {
    if (l.kind == "positive") ++per_rule[l.label];
    if (l.kind == "negative") ++negatives;
  }
  ASSERT_EQ(per_rule.size(), 11u);
  for (const auto& [rule, n] : per_rule) EXPECT_EQ(n, 200u) << rule;
  EXPECT_EQ(negatives, 2000u);
  EXPECT_EQ(summary_.positives, 2200u);
}

TEST_F(Corpus, DetectionIsExact) {
  const auto out = scratch() / "t1" / "verdicts.jsonl";
  ASSERT_EQ(detect(out, 1), 0);
  const auto labels = read_labels(corpus() / "labels.csv");
  const auto s = score_verdicts(labels, read_verdicts(out));
  std::string misses;
  for (const auto& m : s.misses) misses += m + "\n";
  EXPECT_EQ(s.fp, 0u) << misses;
  EXPECT_EQ(s.fn, 0u) << misses;
  EXPECT_EQ(s.tp, 2200u);

  const auto a = score_attacks(labels, read_attacks(run_paths(out).attacks));
  EXPECT_EQ(a.fp, 0u);
  EXPECT_EQ(a.fn, 0u);

  const auto m = decode_manifest(read_file(run_paths(out).manifest));
  EXPECT_EQ(m.input_source, "fixtures");
  std::uint64_t total = 0;
  for (const auto& [cat, n] : m.verdict_count) total += n;
  EXPECT_EQ(total, 2200u);
  EXPECT_EQ(m.verdict_count.size(), 4u);
  EXPECT_EQ(m.attack_count, a.tp);
}

TEST_F(Corpus, ThreadCountDoesNotChangeBytes) {
  const auto one = scratch() / "d1" / "v.jsonl", four = scratch() / "d4" / "v.jsonl";
  ASSERT_EQ(detect(one, 1), 0);
  ASSERT_EQ(detect(four, 4), 0);
  EXPECT_EQ(read_file(one), read_file(four));
  EXPECT_EQ(read_file(run_paths(one).attacks), read_file(run_paths(four).attacks));
  EXPECT_EQ(read_file(run_paths(one).remediation), read_file(run_paths(four).remediation));
  ASSERT_EQ(detect(one, 1), 0);
  EXPECT_EQ(read_file(one), read_file(four));
}

TEST_F(Corpus, ReportMatchesVerdicts) {
  const auto out = scratch() / "r" / "v.jsonl";
  ASSERT_EQ(detect(out, 1), 0);
  ReportOptions o;
  o.verdicts = out;
  o.out_dir = scratch() / "r" / "json";
  o.format = "json";
  std::ostringstream sink;
  ASSERT_EQ(cmd_report(o, sink), 0);
  const auto j = nlohmann::json::parse(read_file(o.out_dir / "report.json"));
  const auto verdicts = read_verdicts(out);
  const auto t = summarize(verdicts);
  BigInt cents = 0;
  std::uint64_t count = 0;
  for (const auto& row : j.at("categories")) {
    const auto sub = parse_sub_category(row.at("subCategory").get<std::string>());
    EXPECT_EQ(row.at("count").get<std::uint64_t>(), t.by_sub_category.at(sub).count);
    count += row.at("count").get<std::uint64_t>();
    cents += Usd::parse(row.at("lossUsd").get<std::string>()).cents();
  }
  EXPECT_EQ(count, verdicts.size());
  EXPECT_EQ(Usd::from_cents(cents).str(), j.at("total").at("lossUsd").get<std::string>());
  std::uint64_t daily = 0;
  for (const auto& row : j.at("dailyLoss")) daily += row.at("count").get<std::uint64_t>();
  EXPECT_EQ(daily, verdicts.size());
  std::uint64_t remediation = 0;
  for (const auto& r : j.at("remediation")) remediation += r.at("count").get<std::uint64_t>();
  EXPECT_EQ(remediation, read_remediations(run_paths(out).remediation).size());
  EXPECT_GT(remediation, 0u);
}

TEST_F(Corpus, OrganizationsPartitionScammers) {
  const auto out = scratch() / "o" / "v.jsonl";
  ASSERT_EQ(detect(out, 1), 0);
  OrgsOptions o;
  o.verdicts = out;
  o.fixtures = corpus();
  o.out = scratch() / "o" / "orgs.json";
  std::ostringstream sink;
  ASSERT_EQ(cmd_orgs(o, sink), 0);
  const auto j = nlohmann::json::parse(read_file(*o.out));
  ASSERT_FALSE(j.empty());
  std::set<std::string> seen;
  double share = 0;
  for (const auto& org : j) {
    for (const char* key : {"cashiers", "aggregators", "depositors"})
      for (const auto& a : org.at(key)) EXPECT_TRUE(seen.insert(a.get<std::string>()).second);
    share += std::stod(org.at("sharePercent").get<std::string>());
  }
  EXPECT_NEAR(share, 100.0, 0.1);
}

TEST(CorpusGeneration, SameSeedSameBytes) {
  TempDir d("regen");
  CorpusOptions o;
  o.per_subcat = 20;
  o.benign = 100;
  o.seed = 99;
  generate_corpus(o, d / "a");
  generate_corpus(o, d / "b");
  std::string why;
  EXPECT_TRUE(same_tree(d / "a", d / "b", &why)) << why;
  o.seed = 100;
  generate_corpus(o, d / "c");
  EXPECT_FALSE(same_tree(d / "a", d / "c"));
}

TEST(CorpusGeneration, ZeroPerSubcategoryIsBenignOnly) {
  TempDir d("benign");
  CorpusOptions o;
  o.per_subcat = 0;
  o.benign = 150;
  const auto s = generate_corpus(o, d / "c");
  EXPECT_EQ(s.positives, 0u);
  for (const auto& l : read_labels(d / "c" / "labels.csv")) EXPECT_NE(l.kind, "positive");
  DetectOptions det;
  det.source.fixtures = d / "c";
  det.out = d / "v.jsonl";
  det.quiet = true;
  std::ostringstream sink;
  ASSERT_EQ(cmd_detect(det, sink), 0);
  EXPECT_TRUE(read_verdicts(det.out).empty());
}

TEST(CorpusGeneration, FixedShapeForBenchmarks) {
  TempDir d("shape");
  CorpusOptions o;
  o.per_subcat = 5;
  o.benign = 50;
  o.fill_blocks = 12;
  o.block_size = 40;
  const auto s = generate_corpus(o, d / "c");
  EXPECT_EQ(s.blocks, 12u);
  EXPECT_EQ(s.transactions, 12u * 40u);
}
