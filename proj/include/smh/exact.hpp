#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "smh/deadline.hpp"
#include "smh/graph.hpp"
#include "smh/nice.hpp"
#include "smh/treewidth.hpp"

namespace smh {

/// Largest bag the partition DP accepts (4-bit block labels per slot).
inline constexpr int kMaxDpBagSize = 15;

struct DpOptions {
  /// Cap on table entries kept alive across all nodes.
  std::size_t max_entries = std::size_t{1} << 26;
  Deadline deadline;
  /// Weight of some feasible tree of the instance. States that cannot lead
  /// to a tree of at most this weight are dropped; the result is still
  /// optimal. A value below the optimum makes the solve infeasible.
  std::optional<Weight> upper_bound;
};

struct DpStats {
  std::vector<std::size_t> table_sizes;  // per nice node
  std::size_t total_entries = 0;
  int width = 0;  // nice decomposition width

  /// CSV with columns node,kind,bag_size,entries.
  void write_csv(std::ostream& out, const NiceDecomposition& nice) const;
};

/// Minimum Steiner tree of `instance` by dynamic programming over `nice`.
///
/// A state is a subset of the current bag that belongs to the partial
/// tree, together with the partition of that subset into the connected
/// components formed so far. Weights must be nonnegative: cycles created at
/// join nodes are never cheaper than a tree, so states need not track
/// acyclicity. The anchor of `nice` must be a terminal.
///
/// Throws CapacityError when a bag exceeds kMaxDpBagSize or the tables
/// outgrow `options.max_entries`, TimeoutError when the deadline passes.
SteinerSolution dp_solve(const SteinerInstance& instance, const NiceDecomposition& nice,
                         const DpOptions& options = {}, DpStats* stats = nullptr);

/// GreedyDegree order, induced decomposition, nice form anchored at
/// `anchor` (default: smallest terminal), then dp_solve.
SteinerSolution solve_with_decomposition(const SteinerInstance& instance,
                                         TieBreak tie = TieBreak::kLowestId,
                                         Vertex anchor = kNoVertex, const DpOptions& options = {});

/// Bell number B(n) for n <= 25.
std::uint64_t bell_number(int n);

/// Upper bound on DP states for a bag of `bag_size` vertices:
/// sum over subsets of the Bell number of the subset size.
std::uint64_t state_bound(int bag_size);

inline constexpr int kDefaultOracleCap = 12;

/// Exact Steiner tree by dynamic programming over terminal subsets
/// (Dreyfus-Wagner, with Dijkstra-based extension). Throws RefusedError if
/// the instance has more than `terminal_cap` terminals.
SteinerSolution dreyfus_wagner(const SteinerInstance& instance, int terminal_cap = kDefaultOracleCap);

}  // namespace smh
