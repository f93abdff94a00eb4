#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "phishscan/app/commands.hpp"
#include "phishscan/app/corpus.hpp"
#include "phishscan/app/fixture_builder.hpp"
#include "phishscan/app/pipeline.hpp"
#include "phishscan/decoder.hpp"
#include "phishscan/history.hpp"
#include "phishscan/keccak.hpp"
#include "phishscan/similarity.hpp"

using namespace phishscan;

namespace {

Address random_address(std::mt19937_64& rng) {
  Address a;
  for (auto& b : a.bytes()) b = static_cast<std::uint8_t>(rng());
  return a;
}

void BM_Keccak64(benchmark::State& state) {
  const Bytes data(64, 0xab);
  for (auto _ : state) benchmark::DoNotOptimize(keccak256(ByteView(data)));
  state.SetBytesProcessed(state.iterations() * 64);
}
BENCHMARK(BM_Keccak64);

void BM_AddressSimilar(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<Address> pool;
  for (int i = 0; i < 1024; ++i) pool.push_back(random_address(rng));
  const SimilarityConfig cfg;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(addresses_similar(pool[i & 1023], pool[(i * 7 + 3) & 1023], cfg));
    ++i;
  }
}
BENCHMARK(BM_AddressSimilar);

void BM_DecodeApprove(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Decoder decoder;
  const LabelRegistry registry;
  Transaction tx;
  tx.from = random_address(rng);
  tx.to = random_address(rng);
  tx.input = app::token_call("approve", {abi::make_address(random_address(rng)), abi::make_uint(U256(1) << 200)});
  for (auto _ : state) benchmark::DoNotOptimize(decoder.decode_token_call(tx, registry));
}
BENCHMARK(BM_DecodeApprove);

// Look-alike lookup against a sender with `range(0)` distinct past destinations.
void BM_GenuineSimilarLookup(benchmark::State& state) {
  std::mt19937_64 rng(3);
  HistoryStore store;
  const Address sender = random_address(rng), token = random_address(rng);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<TransferRecord> transfers;
  for (std::size_t i = 0; i < n; ++i) {
    TransferRecord r;
    r.event.kind = TransferKind::Erc20;
    r.event.token = token;
    r.event.from = sender;
    r.event.to = random_address(rng);
    r.event.amount = 1 + rng() % 1000;
    r.event.block_number = 1;
    r.event.log_index = static_cast<std::uint32_t>(i);
    r.initiator = sender;
    transfers.push_back(r);
  }
  store.append_block(1, 1'700'000'000, transfers, {});
  const SimilarityConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(store.find_genuine_similar_transfer(sender, random_address(rng), 1, cfg));
}
BENCHMARK(BM_GenuineSimilarLookup)->Arg(16)->Arg(256)->Arg(4096);

// End-to-end detection of one 150-transaction block, history warm from the preceding blocks.
void BM_DetectBlocks(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "phishscan-bench-corpus";
  app::CorpusOptions c;
  c.per_subcat = 10;
  c.benign = 100;
  c.fill_blocks = 20;
  c.block_size = 150;
  app::generate_corpus(c, dir);
  app::SourceOptions src;
  src.fixtures = dir;
  auto env = app::open_environment(src);
  const RuleConfig cfg;
  for (auto _ : state) {
    HistoryStore history;
    app::Pipeline pipeline(*env.chain, env.ref, env.decoder, cfg, history, static_cast<unsigned>(state.range(0)));
    benchmark::DoNotOptimize(pipeline.run(app::RunRange{env.range->first, env.range->second, std::nullopt}));
  }
  state.SetItemsProcessed(state.iterations() * 20);
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_DetectBlocks)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
