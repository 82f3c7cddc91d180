#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wikicite/dump_reader.hpp"

namespace wikicite {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInputFormat = 2,
  kExitInsufficientData = 3,
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string dump_path;  // "-" reads standard input
  std::string registry_path;
  std::optional<std::string> jcr_path;
  NamespaceSet namespaces = std::set<int>{0};
  std::filesystem::path output_dir;
  std::string sweep_range;  // empty: 2..number of joined journals
  std::size_t label_budget = 100;
  std::size_t jobs = 1;
};

/// Sweep syntax: comma-separated items, each "N", "A..B" or "A..B:STEP".
/// "all" or empty expands to 2..max_n. Entries must be strictly increasing
/// and >= 2; throws UsageError otherwise.
std::vector<std::size_t> parse_sweep(const std::string& spec, std::size_t max_n);

/// "all" or a comma-separated list of namespace ids.
NamespaceSet parse_namespaces(const std::string& spec);

/// Entry point of the `wikicite` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wikicite
