#include <CLI11.hpp>

#include <iostream>

#include "phishscan/app/commands.hpp"

using namespace phishscan;
using namespace phishscan::app;

namespace {

void add_source_flags(CLI::App* cmd, SourceOptions& s) {
  cmd->add_option("--rpc", s.rpc, "JSON-RPC endpoint URL (env PHISHSCAN_RPC_URL)");
  cmd->add_option("--fixtures", s.fixtures, "fixture directory with blocks.jsonl");
  cmd->add_option("--registry-dir", s.registry_dir, "label registry directory (env PHISHSCAN_REGISTRY_DIR)");
  cmd->add_option("--abi-dir", s.abi_dir, "marketplace ABI directory");
  cmd->add_option("--rpc-timeout", s.rpc_timeout_seconds, "RPC timeout in seconds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phishscan: rule-based detection of payload-transaction phishing on EVM chains"};
  app.require_subcommand(1);

  DetectOptions detect;
  auto* d = app.add_subcommand("detect", "scan a block range and write a verdict stream");
  add_source_flags(d, detect.source);
  d->add_option("--from", detect.from, "first block");
  d->add_option("--to", detect.to, "last block");
  d->add_option("--config", detect.config, "rule configuration JSON");
  d->add_option("--out", detect.out, "verdict file (newline JSON)");
  d->add_option("--threads", detect.threads, "worker threads (0 = all cores)");
  d->add_option("--history-dir", detect.history_dir, "persistent history directory");
  d->add_option("--lookback", detect.lookback, "history window in blocks");
  d->add_flag("--quiet", detect.quiet, "suppress the summary table");

  ClassifyOptions classify;
  auto* c = app.add_subcommand("classify-tx", "explain the verdicts of one transaction");
  add_source_flags(c, classify.source);
  c->add_option("hash", classify.tx_hash, "transaction hash")->required();
  c->add_option("--from", classify.from, "first block replayed into history");
  c->add_option("--config", classify.config, "rule configuration JSON");
  c->add_option("--threads", classify.threads, "worker threads");
  c->add_option("--lookback", classify.lookback, "history window in blocks");

  OrgsOptions orgs;
  auto* o = app.add_subcommand("orgs", "discover scammer organizations from a verdict file");
  o->add_option("verdicts", orgs.verdicts, "verdict file")->required();
  o->add_option("--fixtures", orgs.fixtures, "fixture directory supplying the transfer stream");
  o->add_option("--history-dir", orgs.history_dir, "history directory supplying the transfer stream");
  o->add_option("--registry-dir", orgs.registry_dir, "label registry directory");
  o->add_option("--out", orgs.out, "organizations JSON file");
  o->add_option("--edges-csv", orgs.edges_csv, "write kept flow edges as CSV");
  std::string min_edge = "100";
  o->add_option("--min-edge-usd", min_edge, "prune edges below this USD total");
  o->add_option("--fan-in", orgs.flow.aggregator_fan_in, "cashiers needed to label an aggregator");
  o->add_option("--rounds", orgs.flow.rounds, "expansion rounds");

  ReportOptions report;
  auto* r = app.add_subcommand("report", "emit tables and series derived from a verdict file");
  r->add_option("verdicts", report.verdicts, "verdict file")->required();
  r->add_option("--out-dir", report.out_dir, "output directory");
  r->add_option("--format", report.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  GenCorpusOptions gen;
  auto* g = app.add_subcommand("gen-corpus", "synthesize a labelled fixture corpus");
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--per-subcat", gen.corpus.per_subcat, "positives per sub-category");
  g->add_option("--benign", gen.corpus.benign, "benign and near-miss probes");
  g->add_option("--seed", gen.corpus.seed, "generator seed");
  g->add_option("--blocks", gen.corpus.fill_blocks, "fixed block count, padded with plain transfers");
  g->add_option("--block-size", gen.corpus.block_size, "transactions per block with --blocks");
  g->add_flag("--incidents", gen.incidents, "write the free-order and look-alike incident fixtures");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "measure per-block detection latency over fixtures");
  add_source_flags(b, bench.source);
  b->add_option("--threads", bench.threads, "worker threads");
  b->add_option("--json", bench.json_out, "write the report as JSON");
  b->add_option("--budget-ms", bench.budget_ms, "average per-block budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  return guarded(
      [&]() -> int {
        if (*d) return cmd_detect(detect, std::cout);
        if (*c) return cmd_classify_tx(classify, std::cout);
        if (*o) {
          orgs.flow.min_edge_usd = Decimal::parse(min_edge);
          return cmd_orgs(orgs, std::cout);
        }
        if (*r) return cmd_report(report, std::cout);
        if (*g) return cmd_gen_corpus(gen, std::cout);
        if (*b) return cmd_bench(bench, std::cout);
        return kBadInput;
      },
      std::cerr);
}
