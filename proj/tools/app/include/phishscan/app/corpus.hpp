#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phishscan/types.hpp"

namespace phishscan::app {

struct CorpusOptions {
  std::uint64_t per_subcat = 200;
  std::uint64_t benign = 2000;
  std::uint64_t seed = 7;
  /// Fixed-shape mode: exactly this many blocks of block_size transactions, padded with plain transfers.
  std::optional<std::uint64_t> fill_blocks;
  std::uint64_t block_size = 150;
};

/// One row of labels.csv. kind is positive (label = rule id), negative (a near-miss or benign probe),
/// support (setup traffic), attack (a poisoning transfer; label = poison kind) or filler.
struct LabelRow {
  Hash32 tx_hash;
  std::string kind;
  std::string label;
  std::string scenario;
};

struct CorpusSummary {
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  std::uint64_t support = 0;
  std::uint64_t attacks = 0;
  std::uint64_t fillers = 0;
  std::uint64_t blocks = 0;
  std::uint64_t transactions = 0;
  std::uint64_t first_block = 0;
};

/// Writes a labelled fixture directory. Identical options give a byte-identical directory.
CorpusSummary generate_corpus(const CorpusOptions& options, const std::filesystem::path& out);

std::vector<LabelRow> read_labels(const std::filesystem::path& labels_csv);

}  // namespace phishscan::app
