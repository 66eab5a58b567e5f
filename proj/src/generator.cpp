#include "smh/generator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "smh/error.hpp"

namespace smh {

void GeneratorConfig::check() const {
  if (pool_size < 1) throw std::invalid_argument("pool_size must be at least 1");
  if (iterations_per_run < 1) throw std::invalid_argument("iterations_per_run must be at least 1");
  if (!(perturbation_strength >= 0.0 && perturbation_strength < 1.0)) {
    throw std::invalid_argument("perturbation_strength must lie in [0, 1)");
  }
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

std::size_t SolutionPool::best_index() const {
  if (solutions.empty()) throw std::logic_error("best_index of an empty pool");
  std::size_t best = 0;
  for (std::size_t i = 1; i < solutions.size(); ++i) {
    if (solutions[i].weight < solutions[best].weight) best = i;
  }
  return best;
}

bool SolutionPool::add(SteinerSolution solution, Provenance origin) {
  for (const auto& s : solutions) {
    if (s.edges == solution.edges) return false;
  }
  solutions.push_back(std::move(solution));
  provenance.push_back(origin);
  return true;
}

SteinerSolution sph_construct(const SteinerInstance& instance, std::span<const double> weights, Vertex start,
                              Rng& rng) {
  const auto& g = instance.graph();
  if (!instance.is_terminal(start)) throw InconsistencyError("sph_construct: start is not a terminal");
  if (weights.size() != g.edge_count()) throw InconsistencyError("sph_construct: weight map size mismatch");

  const auto n = static_cast<std::size_t>(g.id_bound());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<std::int32_t> via(n, -1);  // edge index towards the tree
  std::vector<char> in_tree(n, 0);
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

  auto attach = [&](Vertex v) {
    in_tree[static_cast<std::size_t>(v)] = 1;
    dist[static_cast<std::size_t>(v)] = 0.0;
    via[static_cast<std::size_t>(v)] = -1;
    heap.push({0.0, v});
  };
  // Distances only shrink as the tree grows, so stale heap entries are
  // skipped and the search resumes where it left off.
  auto settle = [&] {
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[static_cast<std::size_t>(v)]) continue;
      for (const Arc& a : g.neighbors(v)) {
        const double nd = d + weights[static_cast<std::size_t>(a.edge)];
        if (nd < dist[static_cast<std::size_t>(a.to)]) {
          dist[static_cast<std::size_t>(a.to)] = nd;
          via[static_cast<std::size_t>(a.to)] = a.edge;
          heap.push({nd, a.to});
        }
      }
    }
  };

  std::vector<Vertex> pending;
  for (Vertex t : instance.terminals()) {
    if (t != start) pending.push_back(t);
  }
  std::vector<Edge> chosen;
  attach(start);
  std::vector<std::size_t> nearest;
  while (!pending.empty()) {
    settle();
    double best = kInf;
    nearest.clear();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const double d = dist[static_cast<std::size_t>(pending[i])];
      if (d < best) {
        best = d;
        nearest.assign(1, i);
      } else if (d == best) {
        nearest.push_back(i);
      }
    }
    const std::size_t pick = nearest[static_cast<std::size_t>(rng.below(nearest.size()))];
    Vertex v = pending[pick];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
    while (!in_tree[static_cast<std::size_t>(v)]) {
      const Edge& e = g.edges()[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])];
      chosen.push_back(e);
      attach(v);
      v = e.u == v ? e.v : e.u;
    }
  }
  return prune(instance, chosen);
}

namespace {

// Pruned MST of the subgraph induced by the marked vertices, or nothing if
// that subgraph leaves the terminals disconnected.
class InducedTree {
 public:
  explicit InducedTree(const SteinerInstance& instance)
      : instance_(instance), sets_(static_cast<std::size_t>(instance.graph().id_bound())) {}

  std::optional<SteinerSolution> operator()(const std::vector<char>& member, const std::vector<Vertex>& vertices) {
    edges_.clear();
    sets_ = DisjointSets(member.size());
    for (Vertex v : vertices) {
      for (const Arc& a : instance_.graph().neighbors(v)) {
        if (a.to > v && member[static_cast<std::size_t>(a.to)]) {
          edges_.push_back({v, a.to, a.w});
          sets_.unite(static_cast<std::size_t>(v), static_cast<std::size_t>(a.to));
        }
      }
    }
    const auto& terminals = instance_.terminals();
    const auto root = sets_.find(static_cast<std::size_t>(terminals.front()));
    for (Vertex t : terminals) {
      if (sets_.find(static_cast<std::size_t>(t)) != root) return std::nullopt;
    }
    return prune(instance_, edges_);
  }

 private:
  const SteinerInstance& instance_;
  DisjointSets sets_;
  std::vector<Edge> edges_;
};

}  // namespace

SteinerSolution local_search(const SteinerInstance& instance, SteinerSolution tree, Rng& rng) {
  const auto& g = instance.graph();
  std::vector<char> member(static_cast<std::size_t>(g.id_bound()), 0);
  InducedTree induced(instance);

  std::vector<Vertex> current = tree.vertex_set(instance);
  for (Vertex v : current) member[static_cast<std::size_t>(v)] = 1;

  auto adopt = [&](SteinerSolution better) {
    for (Vertex v : current) member[static_cast<std::size_t>(v)] = 0;
    tree = std::move(better);
    current = tree.vertex_set(instance);
    for (Vertex v : current) member[static_cast<std::size_t>(v)] = 1;
  };

  std::vector<Vertex> candidates;
  std::vector<Vertex> trial;
  bool improved = true;
  while (improved) {
    improved = false;
    // Pruning may shrink the vertex set; its own MST can then be lighter.
    if (auto same = induced(member, current); same && same->weight < tree.weight) {
      adopt(std::move(*same));
      improved = true;
      continue;
    }
    // Insertions: only vertices with two tree neighbours can survive pruning.
    // Removals: any Steiner vertex of the tree.
    candidates.clear();
    for (Vertex v : g.vertices()) {
      if (member[static_cast<std::size_t>(v)]) {
        if (!instance.is_terminal(v)) candidates.push_back(v);
        continue;
      }
      int links = 0;
      for (const Arc& a : g.neighbors(v)) links += member[static_cast<std::size_t>(a.to)] ? 1 : 0;
      if (links >= 2) candidates.push_back(v);
    }
    rng.shuffle(candidates);
    for (Vertex v : candidates) {
      const bool removing = member[static_cast<std::size_t>(v)] != 0;
      trial = current;
      if (removing) {
        std::erase(trial, v);
      } else {
        trial.push_back(v);
      }
      member[static_cast<std::size_t>(v)] ^= 1;
      auto result = induced(member, trial);
      member[static_cast<std::size_t>(v)] ^= 1;
      if (result && result->weight < tree.weight) {
        adopt(std::move(*result));
        improved = true;
        break;
      }
    }
  }
  return tree;
}

namespace {

struct RunResult {
  SteinerSolution best;
  Provenance origin;
};

std::optional<RunResult> run_once(const SteinerInstance& instance, const GeneratorConfig& cfg, int run) {
  const auto seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(run));
  Rng rng(seed);
  const auto& g = instance.graph();
  const auto& terminals = instance.terminals();
  std::vector<double> weights(g.edge_count());
  std::optional<RunResult> out;
  for (int it = 0; it < cfg.iterations_per_run; ++it) {
    if ((run > 0 || it > 0) && cfg.deadline.expired()) break;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double u = cfg.perturbation_strength * rng.uniform01();
      weights[i] = static_cast<double>(g.edges()[i].w) * (1.0 + u);
    }
    const Vertex start = terminals[static_cast<std::size_t>(rng.below(terminals.size()))];
    auto tree = local_search(instance, sph_construct(instance, weights, start, rng), rng);
    if (!out || tree.weight < out->best.weight) out = RunResult{std::move(tree), {run, it, seed}};
  }
  return out;
}

}  // namespace

SolutionPool generate_pool(const SteinerInstance& instance, const GeneratorConfig& cfg) {
  cfg.check();
  const auto runs = static_cast<std::size_t>(cfg.pool_size);
  std::vector<std::optional<RunResult>> results(runs);
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), runs);
  if (workers <= 1) {
    for (std::size_t r = 0; r < runs; ++r) results[r] = run_once(instance, cfg, static_cast<int>(r));
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r; (r = next.fetch_add(1)) < runs;) {
          results[r] = run_once(instance, cfg, static_cast<int>(r));
        }
      });
    }
  }
  SolutionPool pool;
  for (auto& r : results) {
    if (r) pool.add(std::move(r->best), r->origin);
  }
  return pool;
}

void write_pool(std::ostream& out, const SteinerInstance& instance, const SolutionPool& pool) {
  out << "pool " << pool.size() << '\n';
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& s = pool.solutions[i];
    const auto& p = pool.provenance[i];
    out << "solution " << i + 1 << " weight " << s.weight << " edges " << s.edges.size() << " run " << p.run
        << " iter " << p.iteration << " seed " << p.seed << '\n';
    for (const Edge& e : s.edges) {
      out << instance.file_id(e.u) << ' ' << instance.file_id(e.v) << ' ' << e.w << '\n';
    }
  }
}

namespace {

class PoolReader {
 public:
  explicit PoolReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line split into tokens; false at end.
  bool next(std::vector<std::string>& tokens) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
      std::istringstream words(text);
      tokens.clear();
      for (std::string w; words >> w;) tokens.push_back(w);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  int line() const { return line_; }

  template <class Int>
  Int number(const std::string& tok) const {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty()) {
      throw ParseError(ParseErrorKind::kSyntax, line_, "expected an integer, got '" + tok + "'");
    }
    return static_cast<Int>(value);
  }

  std::uint64_t seed(const std::string& tok) const {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || end != tok.data() + tok.size()) {
      throw ParseError(ParseErrorKind::kSyntax, line_, "bad seed '" + tok + "'");
    }
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(ParseErrorKind::kSyntax, line_, what); }

 private:
  std::istream& in_;
  int line_ = 0;
};

}  // namespace

SolutionPool read_pool(std::istream& in, const SteinerInstance& instance) {
  const auto& g = instance.graph();
  std::unordered_map<std::int64_t, Vertex> by_file_id;
  for (Vertex v : g.vertices()) by_file_id.emplace(instance.file_id(v), v);
  auto vertex = [&](std::int64_t id, int line) {
    const auto it = by_file_id.find(id);
    if (it == by_file_id.end()) {
      throw ParseError(ParseErrorKind::kEdgeOutOfRange, line, "unknown vertex " + std::to_string(id));
    }
    return it->second;
  };

  PoolReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 2 || tok[0] != "pool") {
    throw ParseError(ParseErrorKind::kMalformedHeader, reader.line(), "expected 'pool <count>'");
  }
  const auto count = reader.number<long long>(tok[1]);
  if (count < 0) reader.fail("negative solution count");

  SolutionPool pool;
  for (long long i = 0; i < count; ++i) {
    if (!reader.next(tok) || tok.size() < 6 || tok[0] != "solution" || tok[2] != "weight" || tok[4] != "edges") {
      reader.fail("expected 'solution <i> weight <w> edges <k> ...'");
    }
    const int header_line = reader.line();
    const auto weight = reader.number<Weight>(tok[3]);
    const auto k = reader.number<long long>(tok[5]);
    if (k < 0) reader.fail("negative edge count");
    Provenance origin{static_cast<int>(i), 0, 0};
    for (std::size_t j = 6; j + 1 < tok.size(); j += 2) {
      if (tok[j] == "run") origin.run = reader.number<int>(tok[j + 1]);
      else if (tok[j] == "iter") origin.iteration = reader.number<int>(tok[j + 1]);
      else if (tok[j] == "seed") origin.seed = reader.seed(tok[j + 1]);
    }
    std::vector<Edge> edges;
    for (long long j = 0; j < k; ++j) {
      if (!reader.next(tok) || tok.size() != 3) reader.fail("expected '<u> <v> <w>'");
      const Vertex u = vertex(reader.number<std::int64_t>(tok[0]), reader.line());
      const Vertex v = vertex(reader.number<std::int64_t>(tok[1]), reader.line());
      const auto w = reader.number<Weight>(tok[2]);
      const auto actual = g.edge_weight(u, v);
      if (!actual) throw InconsistencyError("pool edge " + tok[0] + "-" + tok[1] + " is not in the instance");
      if (*actual != w) throw InconsistencyError("pool edge " + tok[0] + "-" + tok[1] + " has the wrong weight");
      edges.push_back(normalized({u, v, w}));
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
      throw InconsistencyError("solution " + std::to_string(i + 1) + " repeats an edge");
    }
    Weight declared_sum = 0;
    for (const Edge& e : edges) declared_sum += e.w;
    if (declared_sum != weight) {
      throw ParseError(ParseErrorKind::kSyntax, header_line, "declared weight does not match the edges");
    }
    SteinerSolution tree;
    try {
      tree = prune(instance, edges);
    } catch (const InfeasibleError& e) {
      throw InconsistencyError("solution " + std::to_string(i + 1) + ": " + e.what());
    }
    pool.add(std::move(tree), origin);
  }
  if (reader.next(tok)) reader.fail("trailing content after the last solution");
  return pool;
}

}  // namespace smh
