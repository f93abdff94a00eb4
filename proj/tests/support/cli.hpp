#pragma once

// Runs the phishscan binary and captures its exit status and output.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace phishscan::test {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline CliResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
  const auto log = scratch / "cli-output.txt";
  const std::string cmd = std::string("'") + PHISHSCAN_BINARY + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_file(log);
  return r;
}

/// True when both trees hold the same relative paths with byte-identical contents.
inline bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b, std::string* why = nullptr) {
  namespace fs = std::filesystem;
  auto listing = [](const fs::path& root) {
    std::map<std::string, fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = e.path();
    return files;
  };
  const auto fa = listing(a), fb = listing(b);
  if (fa.size() != fb.size()) {
    if (why) *why = "file counts differ";
    return false;
  }
  for (const auto& [rel, path] : fa) {
    auto it = fb.find(rel);
    if (it == fb.end() || read_file(path) != read_file(it->second)) {
      if (why) *why = rel;
      return false;
    }
  }
  return true;
}

}  // namespace phishscan::test
