#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "phishscan/app/commands.hpp"
#include "phishscan/app/flagship.hpp"
#include "phishscan/app/report.hpp"
#include "scene.hpp"

using namespace phishscan;
using namespace phishscan::app;
using namespace phishscan::test;

namespace {

class Incidents : public ::testing::Test {
protected:
  void SetUp() override {
    txs_ = write_flagship_fixtures(dir_ / "fixtures");
    DetectOptions o;
    o.source.fixtures = dir_ / "fixtures";
    o.out = dir_ / "verdicts.jsonl";
    o.quiet = true;
    std::ostringstream sink;
    ASSERT_EQ(cmd_detect(o, sink), 0);
    verdicts_ = read_verdicts(o.out);
  }

  const Verdict* verdict_for(const Hash32& h) const {
    for (const auto& v : verdicts_)
      if (v.tx_hash == h) return &v;
    return nullptr;
  }

  std::string classify(const Hash32& h) {
    ClassifyOptions o;
    o.source.fixtures = dir_ / "fixtures";
    o.tx_hash = h.hex();
    std::ostringstream out;
    EXPECT_EQ(cmd_classify_tx(o, out), 0);
    return out.str();
  }

  TempDir dir_{"incidents"};
  FlagshipTxs txs_;
  std::vector<Verdict> verdicts_;
};

}  // namespace

TEST_F(Incidents, FreeBuyOrderLosesTenThousand) {
  const auto* v = verdict_for(txs_.blur_free_order);
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->sub_category, SubCategory::FreeBuyOrder);
  EXPECT_EQ(v->victim, txs_.blur_victim);
  ASSERT_FALSE(v->scammer.empty());
  EXPECT_EQ(v->scammer.front(), txs_.blur_scammer);
  ASSERT_TRUE(v->loss_usd);
  EXPECT_EQ(v->loss_usd->str(), "10000.00");
  EXPECT_FALSE(v->loss_partial);
}

TEST_F(Incidents, LookalikeTransferLosesTwentyMillion) {
  const auto* v = verdict_for(txs_.mistaken_transfer);
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->sub_category, SubCategory::FakeToken);
  EXPECT_EQ(v->victim, txs_.exchange_wallet);
  ASSERT_FALSE(v->scammer.empty());
  EXPECT_EQ(v->scammer.front(), txs_.lookalike_address);
  ASSERT_TRUE(v->loss_usd);
  EXPECT_EQ(v->loss_usd->str(), "20000000.00");
  EXPECT_EQ(v->detail.at("genuineTx"), txs_.genuine_deposit.hex());
  EXPECT_EQ(v->detail.at("plantedTx"), txs_.forged_transfer.hex());
}

TEST_F(Incidents, OnlyTheTwoIncidentsAreVerdicts) {
  EXPECT_EQ(verdicts_.size(), 2u);
  EXPECT_EQ(verdict_for(txs_.benign_transfer), nullptr);
  EXPECT_EQ(verdict_for(txs_.genuine_deposit), nullptr);
  EXPECT_EQ(verdict_for(txs_.forged_transfer), nullptr);
  const auto attacks = read_attacks(run_paths(dir_ / "verdicts.jsonl").attacks);
  ASSERT_EQ(attacks.size(), 1u);
  EXPECT_EQ(attacks[0].tx_hash, txs_.forged_transfer);
}

TEST_F(Incidents, ClassifyExplainsEachIncident) {
  const auto blur = classify(txs_.blur_free_order);
  EXPECT_NE(blur.find("II-C FreeBuyOrder"), std::string::npos) << blur;
  EXPECT_NE(blur.find("loss: 10000.00 USD"), std::string::npos) << blur;

  const auto poison = classify(txs_.mistaken_transfer);
  EXPECT_NE(poison.find("FakeToken"), std::string::npos) << poison;
  EXPECT_NE(poison.find("planted record: " + txs_.forged_transfer.hex()), std::string::npos) << poison;
  EXPECT_NE(poison.find("genuine similar transfer: " + txs_.genuine_deposit.hex()), std::string::npos) << poison;
  EXPECT_NE(poison.find("loss: 20000000.00 USD"), std::string::npos) << poison;

  EXPECT_NE(classify(txs_.benign_transfer).find("no verdict"), std::string::npos);
}
