#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smh/graph.hpp"

namespace smh {

/// Exact rational percentage num/den (den > 0).
struct Percent {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// Two decimals, rounded half away from zero, e.g. "0.44" or "-1.25".
  std::string fixed2() const;

  friend bool operator==(const Percent& a, const Percent& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
};

/// 100 * (value - best_known) / best_known, or nothing without a best-known
/// value. Negative means the run beat the best-known value.
std::optional<Percent> compute_gap(Weight value, std::optional<Weight> best_known);

/// 100 * (gap_before - gap_after) / gap_before, defined when gap_before > 0.
/// From raw values this is 100 * (before - after) / (before - best_known).
std::optional<Percent> improvement(Weight before, Weight after, std::optional<Weight> best_known);

/// One row of the benchmark table. Derived columns are functions of the
/// stored fields so that they can never drift apart.
struct BenchRecord {
  std::string instance;
  std::size_t terminals = 0;
  std::size_t edges = 0;
  std::optional<Weight> best_known;
  Weight grasp_value = 0;  // best pool tree
  Weight smh_value = 0;    // merge result
  double grasp_time = 0.0;  // generation seconds
  double smh_time = 0.0;    // merge seconds, generation excluded
  std::size_t trees_used = 0;
  bool degraded = false;  // capacity fallback or time limit

  std::optional<Percent> grasp_gap() const { return compute_gap(grasp_value, best_known); }
  std::optional<Percent> smh_gap() const { return compute_gap(smh_value, best_known); }
  std::optional<Percent> impr() const { return improvement(grasp_value, smh_value, best_known); }
  /// smh_time / grasp_time, or nothing if generation took no measurable time.
  std::optional<double> rel_time() const;
  bool new_best() const { return best_known && smh_value < *best_known; }

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline constexpr const char* kBenchCsvHeader =
    "instance,terminals,edges,best_known,grasp_value,smh_value,grasp_gap,smh_gap,improvement,"
    "grasp_time,smh_time,rel_time,trees_used,new_best,degraded";

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> rows);

/// Parses write_bench_csv output. Derived columns are recomputed and must
/// match the text; a mismatch throws ParseError.
std::vector<BenchRecord> read_bench_csv(std::istream& in);

struct BenchSummary {
  std::size_t instances = 0;
  std::size_t with_best_known = 0;
  std::optional<double> mean_grasp_gap;  // over rows with a best-known value
  std::optional<double> mean_smh_gap;
  std::optional<double> mean_rel_time;
  double mean_trees_used = 0.0;
  std::size_t grasp_best = 0;  // rows reaching the best-known value
  std::size_t smh_best = 0;
  std::size_t improved = 0;  // smh_value < grasp_value
};

BenchSummary summarize(std::span<const BenchRecord> rows);

/// Fixed-width table with the usual gap / time / improvement / #trees
/// columns, followed by the summary lines.
void write_bench_table(std::ostream& out, std::span<const BenchRecord> rows);

/// Best-known side file: one `name,value` per line, '#' comments allowed.
std::vector<std::pair<std::string, Weight>> read_best_known(std::istream& in);

}  // namespace smh
