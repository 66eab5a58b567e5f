#include <algorithm>
#include <array>
#include <bit>
#include <ostream>
#include <optional>
#include <stdexcept>

#include "smh/error.hpp"
#include "smh/exact.hpp"

namespace smh {
namespace {

// A state key packs one 4-bit label per bag slot: 0 = slot not in the
// partial solution, otherwise 1 + block index with blocks numbered by
// first occurrence.
using Key = std::uint64_t;
using Labels = std::array<std::uint8_t, kMaxDpBagSize>;
constexpr int kLabelBits = 4;
constexpr std::uint32_t kNone = 0xffffffffu;

struct Entry {
  Key key;
  Weight value;
  std::uint32_t left;   // entry index in the (first) child table
  std::uint32_t right;  // entry index in the second child table (joins)
  bool edge_taken;      // introduce-edge nodes only
};

void decode(Key key, int size, Labels& lab) {
  for (int i = 0; i < size; ++i) lab[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((key >> (kLabelBits * i)) & 0xf);
}

Key canonical(const Labels& lab, int size) {
  std::array<std::uint8_t, 16> remap{};
  std::uint8_t next = 0;
  Key key = 0;
  for (int i = 0; i < size; ++i) {
    const std::uint8_t l = lab[static_cast<std::size_t>(i)];
    if (l == 0) continue;
    if (remap[l] == 0) remap[l] = ++next;
    key |= static_cast<Key>(remap[l]) << (kLabelBits * i);
  }
  return key;
}

Key occupancy(Key key) {
  // Collapse each nonzero nibble to 0xf.
  Key m = key | (key >> 1);
  m |= m >> 2;
  m &= 0x1111111111111111ull;
  return m * 0xf;
}

// Open-addressing map from state key to entry index, reused from node to
// node. Keys never equal kEmpty because at most 60 of the 64 bits are used.
class KeyIndex {
 public:
  static constexpr Key kEmpty = ~Key{0};

  /// Empties the map and sizes it for about `expected` keys.
  void reset(std::size_t expected) {
    resize(std::bit_ceil(std::max<std::size_t>(16, 2 * expected)));
  }

  /// Returns (slot value reference, inserted).
  std::pair<std::uint32_t*, bool> try_emplace(Key key, std::uint32_t value) {
    if ((size_ + 1) * 2 > capacity_) grow();
    std::size_t i = bucket(key);
    while (keys_[i] != kEmpty) {
      if (keys_[i] == key) return {&values_[i], false};
      i = (i + 1) & mask_;
    }
    keys_[i] = key;
    values_[i] = value;
    ++size_;
    return {&values_[i], true};
  }

 private:
  std::size_t bucket(Key key) const { return static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ull) >> shift_); }

  void resize(std::size_t capacity) {
    if (keys_.size() < capacity) {
      keys_.resize(capacity);
      values_.resize(capacity);
    }
    std::fill_n(keys_.begin(), capacity, kEmpty);
    capacity_ = capacity;
    mask_ = capacity - 1;
    shift_ = 64 - std::countr_zero(capacity);
    size_ = 0;
  }

  void grow() {
    std::vector<std::pair<Key, std::uint32_t>> live;
    live.reserve(size_);
    for (std::size_t j = 0; j < capacity_; ++j) {
      if (keys_[j] != kEmpty) live.emplace_back(keys_[j], values_[j]);
    }
    resize(capacity_ * 2);
    for (const auto& [key, value] : live) try_emplace(key, value);
  }

  std::vector<Key> keys_;
  std::vector<std::uint32_t> values_;
  std::size_t capacity_ = 0;
  std::size_t size_ = 0;
  std::size_t mask_ = 0;
  int shift_ = 64;
};

class Table {
 public:
  Table(KeyIndex& index, std::size_t expected, Weight limit) : index_(&index), limit_(limit) {
    index.reset(expected);
    entries_.reserve(expected);
  }

  void relax(Key key, Weight value, std::uint32_t left, std::uint32_t right, bool edge_taken) {
    if (value > limit_) return;
    auto [slot, inserted] = index_->try_emplace(key, static_cast<std::uint32_t>(entries_.size()));
    if (inserted) {
      entries_.push_back({key, value, left, right, edge_taken});
    } else if (value < entries_[*slot].value) {
      entries_[*slot] = {key, value, left, right, edge_taken};
    }
  }

  void seal() { index_ = nullptr; }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  KeyIndex* index_;
  Weight limit_;
};

// Finest common coarsening of two partitions of the same slot set, by
// union-find over the left block labels.
Key join_key(Key left, Key right, int size) {
  std::array<std::uint8_t, 16> parent = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  auto find = [&](std::uint8_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::array<std::uint8_t, 16> seen{};  // right label -> some left label
  for (int s = 0; s < size; ++s) {
    const auto l = static_cast<std::uint8_t>((left >> (kLabelBits * s)) & 0xf);
    if (l == 0) continue;
    const auto r = static_cast<std::uint8_t>((right >> (kLabelBits * s)) & 0xf);
    if (seen[r] == 0) {
      seen[r] = l;
    } else {
      const auto a = find(l);
      const auto b = find(seen[r]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::array<std::uint8_t, 16> remap{};
  std::uint8_t next = 0;
  Key key = 0;
  for (int s = 0; s < size; ++s) {
    const auto l = static_cast<std::uint8_t>((left >> (kLabelBits * s)) & 0xf);
    if (l == 0) continue;
    const auto root = find(l);
    if (remap[root] == 0) remap[root] = ++next;
    key |= static_cast<Key>(remap[root]) << (kLabelBits * s);
  }
  return key;
}

// Largest partial weight worth keeping at each node. Every terminal outside
// a node's subtree still needs an incident edge introduced elsewhere; an
// edge between two terminals may serve both, so it counts half.
std::vector<Weight> value_limits(const SteinerInstance& instance, const NiceDecomposition& nice,
                                 std::optional<Weight> upper_bound) {
  std::vector<Weight> limits(nice.nodes.size(), kUnreachable);
  if (!upper_bound) return limits;
  const auto& g = instance.graph();
  std::vector<Weight> need(static_cast<std::size_t>(g.id_bound()), 0);  // doubled
  Weight outside = 0;
  if (instance.terminals().size() > 1) {
    for (Vertex t : instance.terminals()) {
      Weight best = kUnreachable;
      for (const Arc& a : g.neighbors(t)) best = std::min(best, instance.is_terminal(a.to) ? a.w : 2 * a.w);
      need[static_cast<std::size_t>(t)] = best == kUnreachable ? 0 : best;
      outside += need[static_cast<std::size_t>(t)];
    }
  }
  std::vector<Weight> forgotten(nice.nodes.size(), 0);
  for (std::size_t i = 0; i < nice.nodes.size(); ++i) {
    const NiceNode& node = nice.nodes[i];
    for (int c : node.children) {
      if (c >= 0) forgotten[i] += forgotten[static_cast<std::size_t>(c)];
    }
    if (node.kind == NiceKind::kForget) forgotten[i] += need[static_cast<std::size_t>(node.vertex)];
    Weight inside = forgotten[i];
    for (Vertex v : node.bag) inside += need[static_cast<std::size_t>(v)];
    limits[i] = (2 * *upper_bound - (outside - inside)) / 2;
  }
  return limits;
}

int slot_of(const std::vector<Vertex>& bag, Vertex v) {
  return static_cast<int>(std::lower_bound(bag.begin(), bag.end(), v) - bag.begin());
}

}  // namespace

namespace {

constexpr std::array<std::uint64_t, 26> kBell = [] {
  // Bell triangle.
  std::array<std::uint64_t, 26> bell{};
  std::array<std::uint64_t, 27> row{1};
  std::array<std::uint64_t, 27> next{};
  for (std::size_t n = 0; n < bell.size(); ++n) {
    bell[n] = row[0];
    next[0] = row[n];
    for (std::size_t j = 0; j <= n; ++j) next[j + 1] = next[j] + row[j];
    row = next;
  }
  return bell;
}();

}  // namespace

std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) throw std::out_of_range("bell_number argument");
  return kBell[static_cast<std::size_t>(n)];
}

std::uint64_t state_bound(int bag_size) {
  // sum_j C(s, j) * B(j)  ==  B(s + 1)
  return bell_number(bag_size + 1);
}

void DpStats::write_csv(std::ostream& out, const NiceDecomposition& nice) const {
  out << "node,kind,bag_size,entries\n";
  for (std::size_t i = 0; i < table_sizes.size() && i < nice.nodes.size(); ++i) {
    out << i << "," << to_string(nice.nodes[i].kind) << "," << nice.nodes[i].bag.size() << ","
        << table_sizes[i] << "\n";
  }
}

SteinerSolution dp_solve(const SteinerInstance& instance, const NiceDecomposition& nice,
                         const DpOptions& options, DpStats* stats) {
  if (nice.nodes.empty()) throw InconsistencyError("empty nice decomposition");
  if (!instance.graph().has_vertex(nice.anchor) || !instance.is_terminal(nice.anchor)) {
    throw InconsistencyError("nice decomposition anchor must be a terminal");
  }
  const int width = nice.width();
  if (width + 1 > kMaxDpBagSize) {
    throw CapacityError("bag size " + std::to_string(width + 1) + " exceeds the DP limit of " +
                        std::to_string(kMaxDpBagSize));
  }

  std::vector<Table> tables;
  tables.reserve(nice.nodes.size());
  const auto limits = value_limits(instance, nice, options.upper_bound);
  std::size_t total = 0;
  Labels lab{};
  Labels tmp{};
  KeyIndex index;
  std::vector<std::pair<Key, std::uint32_t>> groups;  // join partners by occupancy

  for (std::size_t i = 0; i < nice.nodes.size(); ++i) {
    if (options.deadline.expired()) throw TimeoutError("deadline expired during the DP");
    const NiceNode& node = nice.nodes[i];
    const int size = static_cast<int>(node.bag.size());
    std::size_t expected = 1;
    if (node.children[0] >= 0) expected = tables[static_cast<std::size_t>(node.children[0])].size();
    if (node.kind == NiceKind::kIntroduceVertex || node.kind == NiceKind::kIntroduceEdge) expected *= 2;
    if (node.kind == NiceKind::kJoin) {
      expected = std::max(expected, tables[static_cast<std::size_t>(node.children[1])].size());
    }
    Table& out = tables.emplace_back(index, std::min<std::size_t>(expected, state_bound(size)), limits[i]);

    switch (node.kind) {
      case NiceKind::kLeaf:
        out.relax(Key{1}, 0, kNone, kNone, false);
        break;

      case NiceKind::kIntroduceVertex: {
        const auto& child = tables[static_cast<std::size_t>(node.children[0])].entries();
        const int slot = slot_of(node.bag, node.vertex);
        const bool terminal = instance.is_terminal(node.vertex);
        for (std::uint32_t idx = 0; idx < child.size(); ++idx) {
          const Entry& e = child[idx];
          decode(e.key, size - 1, tmp);
          for (int s = 0, c = 0; s < size; ++s) {
            if (s != slot) lab[static_cast<std::size_t>(s)] = tmp[static_cast<std::size_t>(c++)];
          }
          if (!terminal) {
            lab[static_cast<std::size_t>(slot)] = 0;
            out.relax(canonical(lab, size), e.value, idx, kNone, false);
          }
          lab[static_cast<std::size_t>(slot)] = 0xf;  // fresh singleton block
          out.relax(canonical(lab, size), e.value, idx, kNone, false);
        }
        break;
      }

      case NiceKind::kForget: {
        const auto& childnode = nice.nodes[static_cast<std::size_t>(node.children[0])];
        const auto& child = tables[static_cast<std::size_t>(node.children[0])].entries();
        const int slot = slot_of(childnode.bag, node.vertex);
        for (std::uint32_t idx = 0; idx < child.size(); ++idx) {
          const Entry& e = child[idx];
          decode(e.key, size + 1, tmp);
          const std::uint8_t mine = tmp[static_cast<std::size_t>(slot)];
          if (mine != 0) {
            bool attached = false;
            for (int s = 0; s <= size && !attached; ++s) {
              attached = s != slot && tmp[static_cast<std::size_t>(s)] == mine;
            }
            if (!attached) continue;  // its component could never reach the anchor
          }
          for (int s = 0, c = 0; s <= size; ++s) {
            if (s != slot) lab[static_cast<std::size_t>(c++)] = tmp[static_cast<std::size_t>(s)];
          }
          out.relax(canonical(lab, size), e.value, idx, kNone, false);
        }
        break;
      }

      case NiceKind::kIntroduceEdge: {
        const auto& child = tables[static_cast<std::size_t>(node.children[0])].entries();
        const auto a = static_cast<std::size_t>(slot_of(node.bag, node.vertex));
        const auto b = static_cast<std::size_t>(slot_of(node.bag, node.other));
        for (std::uint32_t idx = 0; idx < child.size(); ++idx) {
          const Entry& e = child[idx];
          out.relax(e.key, e.value, idx, kNone, false);
          decode(e.key, size, lab);
          const std::uint8_t la = lab[a];
          const std::uint8_t lb = lab[b];
          if (la == 0 || lb == 0 || la == lb) continue;
          for (int s = 0; s < size; ++s) {
            if (lab[static_cast<std::size_t>(s)] == lb) lab[static_cast<std::size_t>(s)] = la;
          }
          out.relax(canonical(lab, size), e.value + node.weight, idx, kNone, true);
        }
        break;
      }

      case NiceKind::kJoin: {
        const auto& left = tables[static_cast<std::size_t>(node.children[0])].entries();
        const auto& right = tables[static_cast<std::size_t>(node.children[1])].entries();
        // Partners share the occupied slots. Groups are sorted by value so
        // the scan stops once the sum passes the node's limit.
        groups.clear();
        for (std::uint32_t idx = 0; idx < right.size(); ++idx) groups.emplace_back(occupancy(right[idx].key), idx);
        std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first < b.first;
          if (right[a.second].value != right[b.second].value) return right[a.second].value < right[b.second].value;
          return a.second < b.second;
        });
        for (std::uint32_t li = 0; li < left.size(); ++li) {
          const Entry& le = left[li];
          const Key mask = occupancy(le.key);
          auto it = std::lower_bound(groups.begin(), groups.end(), mask,
                                     [](const auto& g, Key m) { return g.first < m; });
          if (it == groups.end() || it->first != mask) continue;
          for (; it != groups.end() && it->first == mask; ++it) {
            const std::uint32_t ri = it->second;
            const Weight value = le.value + right[ri].value;
            if (value > limits[i]) break;
            out.relax(join_key(le.key, right[ri].key, size), value, li, ri, false);
          }
        }
        break;
      }
    }

    out.seal();
    if (out.size() > state_bound(size)) {
      throw std::logic_error("DP table exceeds the subset-partition bound");
    }
    total += out.size();
    if (total > options.max_entries) {
      throw CapacityError("DP tables exceed the budget of " + std::to_string(options.max_entries) + " entries");
    }
  }

  if (stats) {
    stats->table_sizes.clear();
    for (const auto& t : tables) stats->table_sizes.push_back(t.size());
    stats->total_entries = total;
    stats->width = width;
  }

  const auto& root = tables.back().entries();
  const auto at = std::find_if(root.begin(), root.end(), [](const Entry& e) { return e.key == Key{1}; });
  if (at == root.end()) {
    throw InfeasibleError(options.upper_bound ? "no tree within the upper bound"
                                              : "terminals cannot be connected in the decomposed graph");
  }

  std::vector<Edge> edges;
  std::vector<std::pair<int, std::uint32_t>> stack{{static_cast<int>(tables.size()) - 1,
                                                    static_cast<std::uint32_t>(at - root.begin())}};
  while (!stack.empty()) {
    const auto [n, idx] = stack.back();
    stack.pop_back();
    const NiceNode& node = nice.nodes[static_cast<std::size_t>(n)];
    const Entry& e = tables[static_cast<std::size_t>(n)].entries()[idx];
    if (node.kind == NiceKind::kIntroduceEdge && e.edge_taken) {
      edges.push_back({node.vertex, node.other, node.weight});
    }
    if (node.children[0] >= 0) stack.emplace_back(node.children[0], e.left);
    if (node.children[1] >= 0) stack.emplace_back(node.children[1], e.right);
  }
  SteinerSolution tree = prune(instance, edges);
  if (tree.weight != at->value) {
    throw std::logic_error("DP reconstruction weight " + std::to_string(tree.weight) +
                           " differs from table value " + std::to_string(at->value));
  }
  return tree;
}

SteinerSolution solve_with_decomposition(const SteinerInstance& instance, TieBreak tie, Vertex anchor,
                                         const DpOptions& options) {
  const WeightedGraph& g = instance.graph();
  const TreeDecomposition td = decomposition_from_order(g, greedy_degree(g, tie));
  const Vertex t0 = anchor == kNoVertex ? instance.terminals().front() : anchor;
  return dp_solve(instance, make_nice(g, td, t0), options);
}

}  // namespace smh
