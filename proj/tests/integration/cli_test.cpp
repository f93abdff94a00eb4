#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "phishscan/app/flagship.hpp"
#include "phishscan/app/report.hpp"
#include "scene.hpp"

using namespace phishscan;
using namespace phishscan::app;
using namespace phishscan::test;

namespace {

class Cli : public ::testing::Test {
protected:
  std::string q(const std::filesystem::path& p) const { return "'" + p.string() + "'"; }
  CliResult run(const std::string& args) { return run_cli(args, dir_.path()); }

  TempDir dir_{"cli"};
};

}  // namespace

TEST_F(Cli, IncidentFixturesThroughTheBinary) {
  auto gen = run("gen-corpus --incidents --out " + q(dir_ / "inc"));
  ASSERT_EQ(gen.exit_code, 0) << gen.output;
  EXPECT_NE(gen.output.find("free order"), std::string::npos);

  auto det = run("detect --fixtures " + q(dir_ / "inc") + " --out " + q(dir_ / "v.jsonl"));
  ASSERT_EQ(det.exit_code, 0) << det.output;
  EXPECT_NE(det.output.find("2 verdicts"), std::string::npos) << det.output;
  const auto verdicts = read_verdicts(dir_ / "v.jsonl");
  ASSERT_EQ(verdicts.size(), 2u);

  auto rep = run("report " + q(dir_ / "v.jsonl") + " --format csv --out-dir " + q(dir_ / "rep"));
  ASSERT_EQ(rep.exit_code, 0) << rep.output;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "rep" / "categories.csv"));
}

TEST_F(Cli, EmptyRangeSucceedsWithNoVerdicts) {
  write_flagship_fixtures(dir_ / "inc");
  auto r = run("detect --fixtures " + q(dir_ / "inc") + " --from 18000003 --to 18000002 --out " + q(dir_ / "e.jsonl"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(read_verdicts(dir_ / "e.jsonl").empty());
  EXPECT_TRUE(std::filesystem::exists(run_paths(dir_ / "e.jsonl").manifest));
}

TEST_F(Cli, UnknownTransactionIsNotFound) {
  write_flagship_fixtures(dir_ / "inc");
  auto r = run("classify-tx 0x" + std::string(64, 'a') + " --fixtures " + q(dir_ / "inc"));
  EXPECT_EQ(r.exit_code, 4) << r.output;
}

TEST_F(Cli, UnreachableRpcIsExitTwo) {
  write_flagship_fixtures(dir_ / "inc");
  auto r = run("detect --rpc http://127.0.0.1:1 --rpc-timeout 2 --registry-dir " + q(dir_ / "inc" / "registry") +
               " --out " + q(dir_ / "u.jsonl"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST_F(Cli, BadInputIsExitThree) {
  write_flagship_fixtures(dir_ / "inc");
  {
    std::ofstream cfg(dir_ / "bad.json");
    cfg << "{\"icePhishing\": ";
  }
  auto r = run("detect --fixtures " + q(dir_ / "inc") + " --config " + q(dir_ / "bad.json") + " --out " + q(dir_ / "b.jsonl"));
  EXPECT_EQ(r.exit_code, 3) << r.output;
  EXPECT_EQ(run("detect --out " + q(dir_ / "b.jsonl")).exit_code, 3);
  EXPECT_EQ(run("classify-tx 0x12 --fixtures " + q(dir_ / "inc")).exit_code, 3);
  EXPECT_EQ(run("detect --fixtures " + q(dir_ / "missing")).exit_code, 3);
  EXPECT_EQ(run("report --format xml " + q(dir_ / "b.jsonl")).exit_code, 3);
}

TEST_F(Cli, BenignOnlyCorpus) {
  auto gen = run("gen-corpus --per-subcat 0 --benign 40 --seed 5 --out " + q(dir_ / "c"));
  ASSERT_EQ(gen.exit_code, 0) << gen.output;
  EXPECT_NE(gen.output.find("0 positive"), std::string::npos) << gen.output;
  auto det = run("detect --quiet --fixtures " + q(dir_ / "c") + " --out " + q(dir_ / "v.jsonl"));
  ASSERT_EQ(det.exit_code, 0) << det.output;
  EXPECT_TRUE(read_verdicts(dir_ / "v.jsonl").empty());
}

TEST_F(Cli, BenchWritesJsonReport) {
  ASSERT_EQ(run("gen-corpus --per-subcat 2 --benign 20 --blocks 6 --block-size 30 --out " + q(dir_ / "c")).exit_code, 0);
  auto r = run("bench --fixtures " + q(dir_ / "c") + " --json " + q(dir_ / "bench.json"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto j = nlohmann::json::parse(read_file(dir_ / "bench.json"));
  EXPECT_EQ(j.at("blocks").get<std::size_t>(), 6u);
  EXPECT_EQ(j.at("transactions").get<std::size_t>(), 180u);
  EXPECT_LE(j.at("avgMs").get<double>(), j.at("maxMs").get<double>());
  EXPECT_EQ(run("bench --fixtures " + q(dir_ / "c") + " --budget-ms 0").exit_code, 1);
}

TEST_F(Cli, OrgsOnSingleVerdict) {
  write_flagship_fixtures(dir_ / "inc");
  ASSERT_EQ(run("detect --quiet --fixtures " + q(dir_ / "inc") + " --out " + q(dir_ / "v.jsonl")).exit_code, 0);
  auto verdicts = read_verdicts(dir_ / "v.jsonl");
  verdicts.resize(1);
  write_verdicts(dir_ / "one.jsonl", verdicts);
  auto r = run("orgs " + q(dir_ / "one.jsonl") + " --fixtures " + q(dir_ / "inc") + " --out " + q(dir_ / "orgs.json"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto j = nlohmann::json::parse(read_file(dir_ / "orgs.json"));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0].at("sharePercent").get<std::string>(), "100.00");
  EXPECT_EQ(j[0].at("cashiers").size(), 1u);
}
