#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>

#include "phishscan/abi.hpp"
#include "phishscan/app/fixture_builder.hpp"
#include "phishscan/ingest.hpp"
#include "phishscan/keccak.hpp"
#include "scene.hpp"

using namespace phishscan;
using namespace phishscan::app;
using phishscan::test::named;
using phishscan::test::TempDir;

namespace {

Hash32 word(const Address& a) {
  Hash32 h;
  std::copy(a.bytes().begin(), a.bytes().end(), h.bytes().begin() + 12);
  return h;
}

Transaction base_tx() {
  Transaction tx;
  tx.hash = keccak256(std::string_view("tx"));
  tx.from = named("sender");
  tx.to = named("receiver");
  tx.block_number = 17'000'000;
  return tx;
}

}  // namespace

TEST(ExtractTransfers, NativeValueOnly) {
  Transaction tx = base_tx();
  tx.value_wei = U256("1000000000000000000");
  const auto ev = extract_transfers(tx);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, TransferKind::Native);
  EXPECT_FALSE(ev[0].token);
  EXPECT_FALSE(ev[0].log_index);
  EXPECT_EQ(ev[0].amount, tx.value_wei);
  EXPECT_EQ(ev[0].to, *tx.to);
}

TEST(ExtractTransfers, ZeroValueErc20Transfer) {
  Transaction tx = base_tx();
  const Address token = named("token");
  tx.logs.push_back(erc20_transfer_log(token, named("victim"), named("fake"), 0));
  const auto ev = extract_transfers(tx);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, TransferKind::Erc20);
  EXPECT_EQ(ev[0].token, token);
  EXPECT_EQ(ev[0].amount, 0);
  EXPECT_EQ(ev[0].from, named("victim"));
  EXPECT_EQ(ev[0].log_index, 0u);
}

TEST(ExtractTransfers, FourTopicLogIsErc721) {
  Transaction tx = base_tx();
  Log log;
  log.emitter = named("collection");
  // Topic constant checked against the independently hashed value.
  log.topics = {Hash32::from_hex("0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef"), word(named("a")),
                word(named("b")), Hash32(u256_to_be(U256(777)))};
  tx.logs.push_back(log);
  const auto ev = extract_transfers(tx);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, TransferKind::Erc721);
  EXPECT_EQ(ev[0].amount, 777);
}

TEST(ExtractTransfers, MalformedLogSkippedAndTallied) {
  Transaction tx = base_tx();
  Log bad = erc20_transfer_log(named("token"), named("a"), named("b"), 5);
  bad.data.resize(31);
  tx.logs.push_back(bad);
  Log three_topics_no_data = erc20_transfer_log(named("token"), named("a"), named("b"), 5);
  three_topics_no_data.topics.resize(2);
  tx.logs.push_back(three_topics_no_data);
  tx.logs.push_back(erc20_transfer_log(named("token"), named("a"), named("b"), 9));
  Diagnostics d;
  const auto ev = extract_transfers(tx, &d);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].amount, 9);
  EXPECT_EQ(ev[0].log_index, 2u);
  EXPECT_EQ(d.malformed_logs, 2u);
}

TEST(ExtractTransfers, FailedTransactionYieldsNothing) {
  Transaction tx = base_tx();
  tx.value_wei = 5;
  tx.status = TxStatus::Failure;
  EXPECT_TRUE(extract_transfers(tx).empty());
}

TEST(ExtractTransfers, Erc1155FoldedIntoErc721) {
  Transaction tx = base_tx();
  Log single;
  single.emitter = named("multi");
  single.topics = {transfer_single_topic(), word(named("op")), word(named("a")), word(named("b"))};
  single.data = phishscan::abi::encode({phishscan::abi::parse_type("uint256"), phishscan::abi::parse_type("uint256")}, {phishscan::abi::make_uint(3), phishscan::abi::make_uint(40)});
  Log batch;
  batch.emitter = named("multi");
  batch.topics = {transfer_batch_topic(), word(named("op")), word(named("a")), word(named("c"))};
  batch.data = phishscan::abi::encode({phishscan::abi::parse_type("uint256[]"), phishscan::abi::parse_type("uint256[]")},
                           {phishscan::abi::make_list({phishscan::abi::make_uint(1), phishscan::abi::make_uint(2)}),
                            phishscan::abi::make_list({phishscan::abi::make_uint(10), phishscan::abi::make_uint(20)})});
  tx.logs = {single, batch};
  const auto ev = extract_transfers(tx);
  ASSERT_EQ(ev.size(), 3u);
  for (const auto& e : ev) EXPECT_EQ(e.kind, TransferKind::Erc721);
  EXPECT_EQ(ev[0].amount, 3);
  EXPECT_EQ(ev[0].to, named("b"));
  EXPECT_EQ(ev[1].amount, 1);
  EXPECT_EQ(ev[2].amount, 2);
  EXPECT_EQ(ev[2].to, named("c"));
}

TEST(ExtractTransfers, PureFunctionOfInput) {
  Transaction tx = base_tx();
  tx.value_wei = 3;
  tx.logs.push_back(erc20_transfer_log(named("token"), named("a"), named("b"), 5));
  EXPECT_EQ(extract_transfers(tx), extract_transfers(Transaction(tx)));
}

TEST(BlockJson, RoundTrip) {
  Block b;
  b.number = 17'000'000;
  b.timestamp = 1'681'000'000;
  Transaction t = base_tx();
  t.value_wei = U256("123456789012345678901234567890");
  t.input = {0x4e, 0x71, 0xd9, 0x2d};
  t.gas_used = 21000;
  t.effective_gas_price_wei = 30'000'000'000ull;
  t.logs.push_back(erc20_transfer_log(named("token"), named("a"), named("b"), 5));
  b.transactions.push_back(t);
  Transaction creation = base_tx();
  creation.hash = keccak256(std::string_view("create"));
  creation.to.reset();
  creation.status = TxStatus::Failure;
  creation.tx_index = 1;
  b.transactions.push_back(creation);
  for (auto& tx : b.transactions) tx.block_number = b.number;
  const Block back = parse_block_json(encode_block_json(b));
  EXPECT_EQ(back, b);
}

class Fixtures : public ::testing::Test {
protected:
  TempDir dir;
  void write(const std::string& name, const std::string& text) { std::ofstream(dir / name) << text; }
};

TEST_F(Fixtures, BlockWithTwoTransactions) {
  FixtureBuilder fb(17'000'000);
  const auto b = fb.add_block();
  for (int i = 0; i < 2; ++i) {
    Transaction t = base_tx();
    t.hash = keccak256(std::string_view(i ? "one" : "two"));
    fb.add_tx(b, t);
  }
  fb.add_block();
  fb.write(dir.path());
  auto src = FixtureSource::open(dir.path());
  const Block blk = ingest_block(*src, 17'000'000);
  EXPECT_EQ(blk.transactions.size(), 2u);
  EXPECT_EQ(blk.transactions[1].tx_index, 1u);
  EXPECT_TRUE(ingest_block(*src, 17'000'001).transactions.empty());
  EXPECT_THROW(ingest_block(*src, 17'000'002), NotFoundError);
  EXPECT_EQ(src->block_range(), (std::pair<std::uint64_t, std::uint64_t>{17'000'000, 17'000'001}));
  EXPECT_EQ(src->block_of_tx(keccak256(std::string_view("one"))), 17'000'000u);
  EXPECT_FALSE(src->block_of_tx(Hash32{}));
}

TEST_F(Fixtures, BalancesAtOrBefore) {
  write("blocks.jsonl", "");
  const std::string usdt = "0xdac17f958d2ee523a2206206994597c13d831ec7";
  const Address victim = named("victim");
  write("balances.csv", "token,holder,block,amount\n" + usdt + "," + victim.hex() + ",100,500000000\n," + victim.hex() +
                            ",100,7000000000000000000\n" + usdt + "," + victim.hex() + ",120,0\n");
  auto src = FixtureSource::open(dir.path());
  const Address t = normalize_address(usdt);
  EXPECT_EQ(src->balance_of({t, victim, 100}), 500'000'000);
  EXPECT_EQ(src->balance_of({t, victim, 119}), 500'000'000);
  EXPECT_EQ(src->balance_of({t, victim, 120}), 0);
  EXPECT_EQ(src->balance_of({std::nullopt, victim, 110}), U256("7000000000000000000"));
  EXPECT_EQ(src->balance_of({t, named("stranger"), 110}), 0);
}

TEST_F(Fixtures, MalformedBlockLineIsParseError) {
  write("blocks.jsonl", "{\"number\":1,\"timestamp\":2,\"txs\":[{\"hash\":\"0x12\"}]}\n");
  EXPECT_THROW(FixtureSource::open(dir.path()), ParseError);
}

TEST_F(Fixtures, MissingDirectoryIsNotFound) {
  EXPECT_ANY_THROW(FixtureSource::open(dir / "nothing"));
}

// Incoming minus outgoing per holder over a block range equals the balance delta the builder simulated.
TEST_F(Fixtures, TransferSumsMatchBalanceDeltas) {
  std::mt19937_64 rng(17);
  FixtureBuilder fb(500);
  const Address token = named("sum-token");
  std::vector<Address> holders;
  for (int i = 0; i < 8; ++i) holders.push_back(named("holder" + std::to_string(i)));
  std::map<Address, BigInt> bal;
  for (const auto& h : holders) {
    fb.hold(token, h, 1'000'000);
    bal[h] = 1'000'000;
  }
  int n = 0;
  for (int b = 0; b < 20; ++b) {
    const auto num = fb.add_block();
    for (int k = 0; k < 5; ++k) {
      const auto& from = holders[rng() % holders.size()];
      const auto& to = holders[rng() % holders.size()];
      const U256 amount = rng() % 1000;
      if (bal[from] < BigInt(amount)) continue;
      Transaction t;
      t.hash = keccak256(std::string_view("sum" + std::to_string(n++)));
      t.from = from;
      t.to = token;
      t.logs.push_back(erc20_transfer_log(token, from, to, amount));
      fb.add_tx(num, t);
      bal[from] -= BigInt(amount);
      bal[to] += BigInt(amount);
    }
  }
  fb.write(dir.path());
  auto src = FixtureSource::open(dir.path());
  std::map<Address, BigInt> flow;
  for (std::uint64_t b = 500; b < 520; ++b)
    for (const auto& tx : src->block(b).transactions)
      for (const auto& e : extract_transfers(tx)) {
        flow[e.to] += BigInt(e.amount);
        flow[e.from] -= BigInt(e.amount);
      }
  for (const auto& h : holders) {
    const BigInt start = BigInt(src->balance_of({token, h, 500}));
    const BigInt end = BigInt(src->balance_of({token, h, 520}));
    EXPECT_EQ(end - start, flow[h]) << h.hex();
    EXPECT_EQ(end, bal[h]);
  }
}
