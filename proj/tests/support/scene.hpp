#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "phishscan/app/fixture_builder.hpp"
#include "phishscan/app/pipeline.hpp"
#include "phishscan/keccak.hpp"

namespace phishscan {

// Readable gtest failure output.
inline void PrintTo(const Address& a, std::ostream* os) { *os << a.hex(); }
inline void PrintTo(const Hash32& h, std::ostream* os) { *os << h.hex(); }

}  // namespace phishscan

namespace phishscan::test {

inline U256 pow10(unsigned n) {
  U256 v = 1;
  for (unsigned i = 0; i < n; ++i) v *= 10;
  return v;
}

inline Address named(std::string_view label) {
  const Hash32 h = keccak256(label);
  return Address::from_span(ByteView(h.bytes()).subspan(12, 20));
}

inline Hash32 hash_of(std::string_view label) { return keccak256(label); }

/// Scratch directory removed on destruction.
class TempDir {
public:
  explicit TempDir(std::string_view tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// Small hand-built chain on top of FixtureBuilder with mainnet tokens, the scam selector table and
/// ETH = 2000 USD, USDT/USDC/DAI = 1 USD.
class Scene {
public:
  explicit Scene(std::uint64_t first_block = 100);

  app::FixtureBuilder fb;
  ReferenceData ref;

  Address usdt() const { return app::mainnet_token("USDT").address; }
  Address usdc() const { return app::mainnet_token("USDC").address; }
  Address weth() const { return app::mainnet_token("WETH").address; }

  std::uint64_t block() { return fb.add_block(); }
  Transaction& send(std::uint64_t block, std::string_view label, const Address& from, const std::optional<Address>& to,
                    Bytes input = {}, std::vector<Log> logs = {}, const U256& value = 0);

  /// Writes the fixtures, then detects over every block.
  app::RunResult run(const RuleConfig& cfg = {}, unsigned threads = 1);
  /// Directory written by the last run().
  [[nodiscard]] const std::filesystem::path& dir() const { return dir_.path(); }

  std::vector<Verdict> verdicts_for(const app::RunResult& r, std::string_view label) const;
  std::unique_ptr<FixtureSource> source;
  std::unique_ptr<HistoryStore> history;

private:
  TempDir dir_;
};

}  // namespace phishscan::test
