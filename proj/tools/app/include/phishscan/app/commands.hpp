#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "phishscan/app/corpus.hpp"
#include "phishscan/flow.hpp"
#include "phishscan/ingest.hpp"
#include "phishscan/reference.hpp"
#include "phishscan/rules.hpp"

namespace phishscan::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kUnreachable = 2, kBadInput = 3, kNotFound = 4 };

/// Runs `body`, mapping library errors to exit codes and printing them to `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

struct SourceOptions {
  std::optional<std::string> rpc;
  std::optional<std::filesystem::path> fixtures;
  std::optional<std::filesystem::path> registry_dir;
  std::optional<std::filesystem::path> abi_dir;
  int rpc_timeout_seconds = 30;
};

/// Fills rpc and registry_dir from PHISHSCAN_RPC_URL / PHISHSCAN_REGISTRY_DIR when the flags are absent.
void apply_environment(SourceOptions& src);

/// An opened source with its reference data and decoder.
struct Environment {
  std::unique_ptr<ChainSource> chain;
  bool fixtures = false;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> range;
  ReferenceData ref;
  Decoder decoder;
};
Environment open_environment(const SourceOptions& src);

RuleConfig load_rule_config(const std::optional<std::filesystem::path>& path);

struct DetectOptions {
  SourceOptions source;
  std::optional<std::uint64_t> from;
  std::optional<std::uint64_t> to;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = "verdicts.jsonl";
  unsigned threads = 0;
  std::optional<std::filesystem::path> history_dir;
  std::optional<std::uint64_t> lookback;
  bool quiet = false;
};
int cmd_detect(const DetectOptions& o, std::ostream& out);

struct ClassifyOptions {
  SourceOptions source;
  std::string tx_hash;
  std::optional<std::uint64_t> from;
  std::optional<std::filesystem::path> config;
  unsigned threads = 0;
  std::optional<std::uint64_t> lookback;
};
int cmd_classify_tx(const ClassifyOptions& o, std::ostream& out);

struct OrgsOptions {
  std::filesystem::path verdicts;
  std::optional<std::filesystem::path> fixtures;
  std::optional<std::filesystem::path> history_dir;
  std::optional<std::filesystem::path> registry_dir;
  FlowConfig flow;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> edges_csv;
};
int cmd_orgs(const OrgsOptions& o, std::ostream& out);

struct ReportOptions {
  std::filesystem::path verdicts;
  std::filesystem::path out_dir = "report";
  std::string format = "csv";
};
int cmd_report(const ReportOptions& o, std::ostream& out);

struct GenCorpusOptions {
  std::filesystem::path out;
  CorpusOptions corpus;
  bool incidents = false;  // write the two incident fixtures instead
};
int cmd_gen_corpus(const GenCorpusOptions& o, std::ostream& out);

struct BenchOptions {
  SourceOptions source;
  unsigned threads = 0;
  std::optional<std::filesystem::path> json_out;
  double budget_ms = 12'000;
};

struct BenchReport {
  std::size_t blocks = 0;
  std::size_t transactions = 0;
  double avg_ms = 0;
  double median_ms = 0;
  double max_ms = 0;
};
BenchReport run_bench(const BenchOptions& o);
int cmd_bench(const BenchOptions& o, std::ostream& out);

}  // namespace phishscan::app
