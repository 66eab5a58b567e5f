#include <doctest.h>

#include <sstream>

#include "smh/error.hpp"
#include "smh/graph.hpp"
#include "smh/stp_format.hpp"
#include "support.hpp"

using namespace smh;
using namespace smh::testing;

namespace {

const char* kHeader = "33D32945 STP File, STP Format Version 1.0\n";

SteinerInstance parse(const std::string& text) {
  std::istringstream in(text);
  return parse_stp(in, "inline");
}

std::string stp(const std::string& graph_body, const std::string& terminal_body) {
  return std::string(kHeader) + "\nSECTION Graph\n" + graph_body + "END\n\nSECTION Terminals\n" +
         terminal_body + "END\n\nEOF\n";
}

ParseErrorKind parse_error_kind(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return ParseErrorKind::kSyntax;
}

}  // namespace

TEST_CASE("parse_stp reads the smallest valid instance") {
  const auto inst = parse(stp("Nodes 2\nEdges 1\nE 1 2 5\n", "Terminals 2\nT 1\nT 2\n"));
  CHECK(inst.graph().vertex_count() == 2);
  CHECK(inst.graph().edge_count() == 1);
  CHECK(inst.graph().edge_weight(0, 1) == 5);
  CHECK(inst.terminals() == std::vector<Vertex>{0, 1});
  CHECK(inst.file_id(0) == 1);
  CHECK(inst.file_id(1) == 2);
  CHECK(inst.name() == "inline");
}

TEST_CASE("parallel edges keep the cheapest copy and survive re-serialization") {
  const auto inst = parse(stp("Nodes 2\nEdges 2\nE 1 2 5\nE 2 1 7\n", "Terminals 2\nT 1\nT 2\n"));
  REQUIRE(inst.graph().edge_count() == 1);
  CHECK(inst.graph().edges().front() == Edge{0, 1, 5});

  std::ostringstream out;
  write_stp(out, inst);
  CHECK(out.str().find("E 1 2 5\n") != std::string::npos);
  CHECK(out.str().find("E 1 2 7") == std::string::npos);
  const auto again = parse(out.str());
  CHECK(again.graph() == inst.graph());
}

TEST_CASE("self-loops are dropped") {
  const auto inst = parse(stp("Nodes 2\nEdges 2\nE 1 1 3\nE 1 2 4\n", "Terminals 1\nT 2\n"));
  CHECK(inst.graph().edge_count() == 1);
}

TEST_CASE("parse errors are distinct") {
  CHECK(parse_error_kind(stp("Nodes 2\nEdges 1\nE 1 2 5\n", "Terminals 1\nT 0\n")) ==
        ParseErrorKind::kTerminalOutOfRange);
  CHECK(parse_error_kind(stp("Nodes 2\nEdges 1\nE 1 2 5\n", "Terminals 1\nT 3\n")) ==
        ParseErrorKind::kTerminalOutOfRange);
  CHECK(parse_error_kind("SECTION Graph\nEND\nEOF\n") == ParseErrorKind::kMalformedHeader);
  CHECK(parse_error_kind(stp("Nodes 3\nEdges 1\nE 1 2 5\n", "Terminals 1\nT 1\n")) ==
        ParseErrorKind::kDisconnected);
  CHECK(parse_error_kind(stp("Nodes 2\nEdges 1\nE 1 2 5.5\n", "Terminals 1\nT 1\n")) ==
        ParseErrorKind::kFractionalWeight);
  CHECK(parse_error_kind(stp("Nodes 2\nEdges 1\nE 1 9 5\n", "Terminals 1\nT 1\n")) ==
        ParseErrorKind::kEdgeOutOfRange);
  CHECK(parse_error_kind(stp("Nodes 2\nEdges 2\nE 1 2 5\n", "Terminals 1\nT 1\n")) == ParseErrorKind::kSyntax);
  CHECK(parse_error_kind(stp("Nodes 2\nEdges 1\nE 1 2 5\n", "Terminals 0\n")) == ParseErrorKind::kNoTerminals);
  CHECK(parse_error_kind(stp("Nodes 2\nEdges 1\nE 1 2 -5\n", "Terminals 1\nT 1\n")) ==
        ParseErrorKind::kNegativeWeight);
}

TEST_CASE("unknown sections are skipped and the name is read from Comment") {
  const std::string text = std::string(kHeader) +
                           "SECTION Comment\nName \"demo 1\"\nCreator \"x\"\nEND\n"
                           "SECTION Graph\nNodes 3\nEdges 2\nE 1 2 1\nE 2 3 2.000\nEND\n"
                           "SECTION Terminals\nTerminals 2\nT 1\nT 3\nEND\n"
                           "SECTION Coordinates\nDD 1 0 0\nDD 2 1 0\nEND\nEOF\n";
  const auto inst = parse(text);
  CHECK(inst.name() == "demo 1");
  CHECK(inst.graph().edge_weight(1, 2) == 2);
}

TEST_CASE("parse and write round-trip on random instances") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto inst = random_instance(rng, 12, 25, 4);
    std::ostringstream out;
    write_stp(out, inst);
    std::istringstream in(out.str());
    const auto again = parse_stp(in);
    CHECK(again.graph() == inst.graph());
    CHECK(again.terminals() == inst.terminals());
  }
}

TEST_CASE("graph_union is set union") {
  const auto a = WeightedGraph::from_edges(4, {{0, 1, 1}, {1, 2, 1}});
  const auto b = WeightedGraph::from_edges(4, {{0, 3, 1}, {2, 3, 1}});
  const std::vector<WeightedGraph> self{a, a};
  CHECK(graph_union(self) == a);

  const std::vector<WeightedGraph> both{a, b};
  const auto cycle = graph_union(both);
  CHECK(cycle.vertex_count() == 4);
  CHECK(cycle.edge_count() == 4);
  for (Vertex v : cycle.vertices()) CHECK(cycle.degree(v) == 2);

  const std::vector<WeightedGraph> swapped{b, a};
  CHECK(graph_union(swapped) == cycle);
}

TEST_CASE("graph_union rejects conflicting weights") {
  const auto a = WeightedGraph::from_edges(3, {{0, 1, 1}});
  const auto b = WeightedGraph::from_edges(3, {{0, 1, 2}});
  const std::vector<WeightedGraph> both{a, b};
  CHECK_THROWS_AS(graph_union(both), InconsistencyError);
}

TEST_CASE("graph_union is associative on random subgraphs") {
  Rng rng(5);
  const auto host = random_instance(rng, 15, 40, 3);
  auto sub = [&] {
    std::vector<Edge> pick;
    for (const Edge& e : host.graph().edges())
      if (rng.below(3) == 0) pick.push_back(e);
    return WeightedGraph::from_edges(15, pick);
  };
  for (int i = 0; i < 20; ++i) {
    const auto x = sub(), y = sub(), z = sub();
    const std::vector<WeightedGraph> xy{x, y}, yz{y, z};
    const std::vector<WeightedGraph> left{graph_union(xy), z}, right{x, graph_union(yz)};
    CHECK(graph_union(left) == graph_union(right));
  }
}

TEST_CASE("WeightedGraph enforces simplicity") {
  CHECK_THROWS_AS(WeightedGraph::from_edges(3, {{0, 0, 1}}), InconsistencyError);
  CHECK_THROWS_AS(WeightedGraph::from_edges(3, {{0, 1, 1}, {1, 0, 2}}), InconsistencyError);
  CHECK_THROWS_AS(WeightedGraph::from_edges(3, {{0, 1, -1}}), InconsistencyError);
  CHECK_THROWS_AS(WeightedGraph(3, {0, 1}, {{0, 2, 1}}), InconsistencyError);
}

TEST_CASE("shortest_paths") {
  const auto g = WeightedGraph::complete_vertex_set(3, {{0, 1, 2}, {1, 2, 3}});
  const auto spt = shortest_paths(g, 0);
  CHECK(spt.distance[0] == 0);
  CHECK(spt.distance[2] == 5);
  CHECK(spt.predecessor[2] == 1);

  SUBCASE("unreachable vertices stay infinite") {
    const auto h = WeightedGraph::complete_vertex_set(3, {{0, 1, 2}});
    CHECK(shortest_paths(h, 0).distance[2] == kUnreachable);
  }
}

TEST_CASE("shortest_paths matches exhaustive path enumeration") {
  Rng rng(99);
  for (int round = 0; round < 30; ++round) {
    const auto inst = random_instance(rng, 10, 10 + rng.below(20), 1);
    const auto& g = inst.graph();
    const auto source = static_cast<Vertex>(rng.below(10));
    const auto spt = shortest_paths(g, source);
    for (Vertex v : g.vertices()) CHECK(spt.distance[static_cast<std::size_t>(v)] == brute_force_distance(g, source, v));
  }
}

TEST_CASE("prune") {
  SUBCASE("a pruned tree is a fixpoint") {
    const SteinerInstance inst(path_graph(4, 3), {0, 3});
    const auto t = prune(inst, inst.graph().edges());
    CHECK(t.edges == inst.graph().edges());
    CHECK(t.weight == 9);
    CHECK(prune(inst, t.edges) == t);
  }
  SUBCASE("non-terminal leaves are removed") {
    // star: center 0, terminals 1 and 2, extra leaf 3
    const auto g = WeightedGraph::complete_vertex_set(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
    const SteinerInstance inst(g, {1, 2});
    const auto t = prune(inst, g.edges());
    CHECK(t.edges == std::vector<Edge>{{0, 1, 1}, {0, 2, 1}});
    CHECK(validate_solution(inst, t).empty());
  }
  SUBCASE("cycle through all terminals loses its heaviest edge") {
    const auto g = WeightedGraph::complete_vertex_set(4, {{0, 1, 1}, {1, 2, 2}, {2, 3, 3}, {0, 3, 7}});
    const SteinerInstance inst(g, {0, 1, 2, 3});
    const auto t = prune(inst, g.edges());
    CHECK(t.weight == 6);
    CHECK(std::find(t.edges.begin(), t.edges.end(), Edge{0, 3, 7}) == t.edges.end());
  }
  SUBCASE("disconnected terminals are infeasible") {
    const SteinerInstance inst(path_graph(4), {0, 3});
    const std::vector<Edge> partial{{0, 1, 1}};
    CHECK_THROWS_AS(prune(inst, partial), InfeasibleError);
  }
  SUBCASE("single terminal gives the empty tree") {
    const SteinerInstance inst(path_graph(4), {2});
    const auto t = prune(inst, inst.graph().edges());
    CHECK(t.edges.empty());
    CHECK(t.weight == 0);
    CHECK(validate_solution(inst, t).empty());
  }
}

TEST_CASE("prune output is a valid, no heavier, idempotent tree") {
  Rng rng(3);
  for (int round = 0; round < 40; ++round) {
    const auto inst = random_instance(rng, 20, 45, 1 + rng.below(6));
    const auto t = prune(inst, inst.graph().edges());
    CHECK(validate_solution(inst, t).empty());
    CHECK(t.weight <= inst.graph().total_weight());
    CHECK(prune(inst, t.edges) == t);
  }
}

TEST_CASE("validate_solution reports broken trees") {
  const auto g = WeightedGraph::complete_vertex_set(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}});
  const SteinerInstance inst(g, {0, 2});
  CHECK_FALSE(validate_solution(inst, {{{0, 1, 1}}, 1}).empty());                       // misses terminal 2
  CHECK_FALSE(validate_solution(inst, {{{0, 1, 1}, {1, 2, 1}}, 5}).empty());             // wrong weight
  CHECK_FALSE(validate_solution(inst, {{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}, 3}).empty());  // leaf 3
  CHECK_FALSE(validate_solution(inst, {{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}}, 4}).empty());  // cycle
  CHECK(validate_solution(inst, {{{0, 1, 1}, {1, 2, 1}}, 2}).empty());
}
