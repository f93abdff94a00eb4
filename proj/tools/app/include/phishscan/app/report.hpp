#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phishscan/app/pipeline.hpp"
#include "phishscan/flow.hpp"
#include "phishscan/model.hpp"
#include "phishscan/rules.hpp"

namespace phishscan::app {

/// Sidecar files that sit next to a verdict stream `<stem>.jsonl`.
struct RunPaths {
  std::filesystem::path verdicts;
  std::filesystem::path manifest;
  std::filesystem::path attacks;
  std::filesystem::path remediation;
  std::filesystem::path nft_sales;
};
RunPaths run_paths(const std::filesystem::path& verdict_file);

struct RunManifest {
  std::string config_hash;
  std::string input_source;  // rpc | fixtures
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  std::map<std::string, std::uint64_t> verdict_count;  // every category, zero included
  std::map<std::string, double> elapsed_ms;            // per stage
  Diagnostics diagnostics;
  GrantTotals grants;
  std::uint64_t attack_count = 0;
};
std::string encode_manifest(const RunManifest& m);
RunManifest decode_manifest(std::string_view text);

std::vector<Verdict> read_verdicts(const std::filesystem::path& path);
void write_verdicts(const std::filesystem::path& path, const std::vector<Verdict>& verdicts);
std::vector<AttackRecord> read_attacks(const std::filesystem::path& path);
std::vector<RemediationRecord> read_remediations(const std::filesystem::path& path);

struct LossCell {
  std::uint64_t count = 0;
  Usd loss;
  std::uint64_t unpriced = 0;  // verdicts without a USD value
  friend bool operator==(const LossCell&, const LossCell&) = default;
};

/// Per-category and per-sub-category counts and USD sums, plus the grand total.
struct CategoryTable {
  std::map<Category, LossCell> by_category;
  std::map<SubCategory, LossCell> by_sub_category;
  LossCell total;
};
CategoryTable summarize(const std::vector<Verdict>& verdicts);
std::string format_category_table(const CategoryTable& t);

/// Per UTC day: verdict count and loss.
std::map<std::string, LossCell> daily_losses(const std::vector<Verdict>& verdicts);

struct GrantShare {
  std::uint64_t phishing_approves = 0;
  std::uint64_t phishing_permits = 0;
  std::uint64_t approve_calls = 0;
  std::uint64_t permit_calls = 0;
};
/// Distinct grant transactions behind approve- and permit-based ice phishing.
GrantShare grant_share(const std::vector<Verdict>& verdicts, const GrantTotals& totals);

std::string percent_text(std::uint64_t part, std::uint64_t whole);

std::string encode_nft_sales(const NftSaleTable& t);
NftSaleTable decode_nft_sales(std::string_view text);

/// Writes the report series into `dir` as CSV files or one report.json.
void write_report(const std::filesystem::path& verdict_file, const std::filesystem::path& dir, const std::string& format);

}  // namespace phishscan::app
