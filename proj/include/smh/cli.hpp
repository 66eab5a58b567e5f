#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "smh/exact.hpp"
#include "smh/generator.hpp"
#include "smh/merge.hpp"

namespace smh {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitParse = 3,        // unreadable or malformed input file
  kExitInfeasible = 4,   // terminals cannot be connected / input does not fit
  kExitCapacity = 5,     // result produced, but a DP fell back on its budget
  kExitTimeout = 6,      // time limit hit; best incumbent reported
  kExitRefused = 7,      // oracle above its terminal cap
  kExitInvalid = 8,      // validate-td found violations
};

enum class OutputFormat { kTable, kCsv, kJson };

/// Parses "table", "csv" or "json"; throws std::invalid_argument.
OutputFormat parse_format(const std::string& name);

struct RunOptions {
  GeneratorConfig generator;
  MergeConfig merge;
  int oracle_cap = kDefaultOracleCap;
  std::optional<double> time_limit;  // seconds, whole run
  std::optional<OutputFormat> format;  // command default when empty
  /// Include wall times in CSV/JSON output. Off by default so that
  /// machine output is reproducible byte for byte.
  bool timings = false;

  /// Seeds both phases from one user seed.
  void set_seed(std::uint64_t seed);
};

struct BenchOptions {
  std::string directory;
  std::optional<std::string> best_known_file;
  int jobs = 1;
  /// Leave out instances whose pool already reaches the best-known value.
  bool drop_solved = false;
};

// Each command writes its result to `out`, diagnostics to `err`, and
// returns an ExitCode.

/// Generate a pool, merge it, report.
int cmd_solve(const std::string& stp_path, const RunOptions& options, std::ostream& out, std::ostream& err);
/// Generate a pool and write it in pool text format.
int cmd_generate(const std::string& stp_path, const RunOptions& options, std::ostream& out, std::ostream& err);
/// Merge a pool file produced by `generate` or an external generator.
int cmd_merge(const std::string& stp_path, const std::string& pool_path, const RunOptions& options,
              std::ostream& out, std::ostream& err);
/// Exact solve by Dreyfus-Wagner, refusing above options.oracle_cap terminals.
int cmd_oracle(const std::string& stp_path, const RunOptions& options, std::ostream& out, std::ostream& err);
/// Check a PACE .td file against the instance graph.
int cmd_validate_td(const std::string& stp_path, const std::string& td_path, std::ostream& out, std::ostream& err);
/// Run the pipeline on every .stp file of a directory, one row per instance.
int cmd_bench(const BenchOptions& bench, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace smh
