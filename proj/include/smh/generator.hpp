#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "smh/deadline.hpp"
#include "smh/graph.hpp"
#include "smh/random.hpp"

namespace smh {

struct GeneratorConfig {
  int pool_size = 16;
  int iterations_per_run = 8;
  /// Edge weights are scaled by (1 + u), u uniform in [0, strength).
  double perturbation_strength = 0.2;
  std::uint64_t seed = 0;
  /// Worker threads; the pool does not depend on this.
  int threads = 1;
  /// Runs not yet started when the deadline passes are skipped. The first
  /// run always completes at least one iteration.
  Deadline deadline;

  /// Throws std::invalid_argument on out-of-range fields.
  void check() const;
};

struct Provenance {
  int run = 0;
  int iteration = 0;
  std::uint64_t seed = 0;  // derived seed of the run

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Distinct valid trees for one instance, in generation order.
struct SolutionPool {
  std::vector<SteinerSolution> solutions;
  std::vector<Provenance> provenance;  // parallel to solutions

  std::size_t size() const { return solutions.size(); }
  bool empty() const { return solutions.empty(); }
  /// Index of the lightest tree (first on ties). Pool must be nonempty.
  std::size_t best_index() const;

  /// Appends unless an identical edge set is already present.
  bool add(SteinerSolution solution, Provenance origin);

  friend bool operator==(const SolutionPool&, const SolutionPool&) = default;
};

/// Shortest-path heuristic: grow a tree from `start`, each time attaching
/// the nearest unconnected terminal under `weights` (indexed like
/// instance.graph().edges()). Equidistant terminals are chosen at random.
/// The result is pruned and weighed with the original weights.
SteinerSolution sph_construct(const SteinerInstance& instance, std::span<const double> weights, Vertex start,
                              Rng& rng);

/// First-improvement search over Steiner-vertex insertions and removals.
/// A vertex set is scored by the pruned minimum spanning tree of the
/// subgraph it induces. Never returns a heavier tree.
SteinerSolution local_search(const SteinerInstance& instance, SteinerSolution tree, Rng& rng);

/// Independent multistart runs with per-run derived seeds; each run keeps
/// its best tree and duplicates are dropped. Deterministic in
/// (instance, cfg) unless the deadline cuts runs short.
SolutionPool generate_pool(const SteinerInstance& instance, const GeneratorConfig& cfg);

/// Text format with 1-based file ids:
///   pool <solutions>
///   solution <i> weight <w> edges <k> run <r> iter <t> seed <s>
///   <u> <v> <w>            (k lines)
void write_pool(std::ostream& out, const SteinerInstance& instance, const SolutionPool& pool);

/// Reads a pool written by write_pool or an external generator. Each tree
/// is checked against the instance (edges present, weights equal,
/// terminals spanned) and pruned. Throws ParseError on malformed text and
/// InconsistencyError on trees that do not fit the instance.
SolutionPool read_pool(std::istream& in, const SteinerInstance& instance);

}  // namespace smh
