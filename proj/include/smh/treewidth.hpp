#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "smh/graph.hpp"

namespace smh {

/// Which vertex wins among several of minimum degree.
enum class TieBreak { kLowestId, kHighestId };

/// Vertex permutation and the largest degree seen at elimination time.
struct EliminationOrder {
  std::vector<Vertex> sequence;
  int width = 0;

  friend bool operator==(const EliminationOrder&, const EliminationOrder&) = default;
};

/// Minimum-degree elimination: repeatedly pick a vertex of minimum degree,
/// turn its neighbourhood into a clique, and delete it.
EliminationOrder greedy_degree(const WeightedGraph& g, TieBreak tie = TieBreak::kLowestId);

/// Outcome of a width-capped greedy elimination.
struct WidthCheck {
  /// True iff every elimination had degree <= the cap.
  bool within = false;
  /// Width of the full order when `within`; otherwise the first degree
  /// that broke the cap.
  int width = 0;
  /// Complete order when `within`, empty otherwise.
  EliminationOrder order;
};

/// Same elimination as greedy_degree, aborting at the first elimination of
/// degree greater than `max_width`.
WidthCheck greedy_degree_width_max_m(const WeightedGraph& g, int max_width,
                                     TieBreak tie = TieBreak::kLowestId);

/// Replays `sequence` on `g` and returns the maximum elimination degree.
/// Throws InconsistencyError if it is not a permutation of the vertices.
int elimination_width(const WeightedGraph& g, const std::vector<Vertex>& sequence);

struct TreeDecomposition {
  std::vector<std::vector<Vertex>> bags;       // each ascending
  std::vector<std::pair<int, int>> tree_edges;  // node index pairs
  int width = 0;                                // largest bag size - 1 (0 without bags)

  static int width_of(const std::vector<std::vector<Vertex>>& bags);
};

/// Decomposition induced by an elimination order: one node per vertex v
/// with bag {v} plus its later neighbours in the fill-in graph, attached to
/// the node of the earliest-eliminated of those neighbours.
TreeDecomposition decomposition_from_order(const WeightedGraph& g, const EliminationOrder& order);

enum class ViolationKind {
  kNotATree,
  kForeignVertex,      // bag holds a non-member vertex
  kUncoveredVertex,    // condition 1
  kUncoveredEdge,      // condition 2
  kDisconnectedVertex, // condition 3
  kWidthMismatch,
};

struct Violation {
  ViolationKind kind;
  std::string message;
  Vertex u = kNoVertex;
  Vertex v = kNoVertex;
};

/// All violations of the tree-decomposition conditions and of the stored
/// width. Empty means valid.
std::vector<Violation> validate(const WeightedGraph& g, const TreeDecomposition& td);

/// PACE `.td` text: `s td <bags> <width+1> <vertices>`, `b i v...`, `i j`.
/// Vertex ids are written 1-based.
void write_td(std::ostream& out, const WeightedGraph& g, const TreeDecomposition& td);
/// Width is taken from the `s` line so that validate() can check it.
TreeDecomposition read_td(std::istream& in);

}  // namespace smh
