#pragma once

#include <array>
#include <string>
#include <vector>

#include "smh/graph.hpp"
#include "smh/treewidth.hpp"

namespace smh {

enum class NiceKind { kLeaf, kIntroduceVertex, kIntroduceEdge, kForget, kJoin };

const char* to_string(NiceKind kind);

struct NiceNode {
  NiceKind kind = NiceKind::kLeaf;
  std::vector<Vertex> bag;  // ascending
  /// Introduced or forgotten vertex; first endpoint for kIntroduceEdge.
  Vertex vertex = kNoVertex;
  /// Second endpoint for kIntroduceEdge.
  Vertex other = kNoVertex;
  Weight weight = 0;
  std::array<int, 2> children{-1, -1};
};

/// Rooted binary refinement of a tree decomposition in which a fixed
/// anchor vertex sits in every bag.
///
/// Nodes are stored children-first, so a forward sweep visits every child
/// before its parent and the root is the last node.
struct NiceDecomposition {
  std::vector<NiceNode> nodes;
  Vertex anchor = kNoVertex;

  int root() const { return static_cast<int>(nodes.size()) - 1; }
  int width() const;
  /// Plain tree decomposition with the same bags and parent links.
  TreeDecomposition as_tree_decomposition() const;
};

/// Adds `anchor` to every bag, roots the tree at a bag holding it, and
/// expands it into leaf / introduce-vertex / introduce-edge / forget /
/// binary join nodes. Each edge of `g` is introduced exactly once, at the
/// decomposition node closest to the root whose bag holds both endpoints.
/// Requires a valid decomposition of `g` and anchor in V(g).
NiceDecomposition make_nice(const WeightedGraph& g, const TreeDecomposition& td, Vertex anchor);

/// All violations of the nice-decomposition invariants, including the
/// underlying tree-decomposition conditions. Empty means valid.
std::vector<std::string> validate_nice(const WeightedGraph& g, const NiceDecomposition& nice);

}  // namespace smh
