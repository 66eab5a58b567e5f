#include "smh/stp_format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "smh/error.hpp"

namespace smh {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::int64_t parse_int(const std::string& tok, int line) {
  std::int64_t value = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(ParseErrorKind::kSyntax, line, "expected an integer, got '" + tok + "'");
  }
  return value;
}

// Integers and integral decimals ("12", "12.000") are accepted.
Weight parse_weight(const std::string& tok, int line) {
  const auto dot = tok.find('.');
  if (tok.find_first_of("eE") != std::string::npos) {
    throw ParseError(ParseErrorKind::kFractionalWeight, line, "'" + tok + "'");
  }
  if (dot == std::string::npos) {
    const Weight w = parse_int(tok, line);
    if (w < 0) throw ParseError(ParseErrorKind::kNegativeWeight, line, "'" + tok + "'");
    return w;
  }
  const std::string frac = tok.substr(dot + 1);
  if (!std::all_of(frac.begin(), frac.end(), [](char c) { return c == '0'; })) {
    throw ParseError(ParseErrorKind::kFractionalWeight, line, "'" + tok + "'");
  }
  return parse_weight(tok.substr(0, dot), line);
}

void expect_args(const std::vector<std::string>& toks, std::size_t n, int line) {
  if (toks.size() != n) {
    throw ParseError(ParseErrorKind::kSyntax, line,
                     "'" + toks.front() + "' expects " + std::to_string(n - 1) + " argument(s)");
  }
}

}  // namespace

SteinerInstance parse_stp(std::istream& in, const std::string& fallback_name) {
  std::string line;
  int lineno = 0;

  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (split(line).empty()) continue;
    const std::string l = lower(line);
    if (l.find("33d32945") != std::string::npos && l.find("stp file") != std::string::npos) {
      have_header = true;
    }
    break;
  }
  if (!have_header) {
    throw ParseError(ParseErrorKind::kMalformedHeader, lineno,
                     "expected '33D32945 STP File, STP Format Version 1.0'");
  }

  std::string name;
  std::int64_t declared_nodes = -1;
  std::int64_t declared_edges = -1;
  std::int64_t declared_terminals = -1;
  std::int64_t edge_lines = 0;
  bool saw_graph = false;
  bool saw_terminals = false;
  bool saw_eof = false;
  std::string section;  // empty outside sections
  std::vector<std::pair<Edge, int>> raw_edges;
  std::vector<std::pair<std::int64_t, int>> raw_terminals;

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split(line);
    if (toks.empty()) continue;
    const std::string key = lower(toks.front());

    if (section.empty()) {
      if (key == "eof") {
        saw_eof = true;
        break;
      }
      if (key != "section" || toks.size() < 2) {
        throw ParseError(ParseErrorKind::kSyntax, lineno, "expected SECTION or EOF");
      }
      section = lower(toks[1]);
      if (section == "graph") saw_graph = true;
      if (section == "terminals") saw_terminals = true;
      continue;
    }
    if (key == "end") {
      section.clear();
      continue;
    }

    if (section == "comment") {
      if (key == "name" && toks.size() >= 2) {
        const auto first = line.find('"');
        const auto last = line.rfind('"');
        name = (first != std::string::npos && last > first) ? line.substr(first + 1, last - first - 1)
                                                             : toks[1];
      }
    } else if (section == "graph") {
      if (key == "nodes") {
        expect_args(toks, 2, lineno);
        declared_nodes = parse_int(toks[1], lineno);
        if (declared_nodes < 0) throw ParseError(ParseErrorKind::kSyntax, lineno, "negative node count");
      } else if (key == "edges") {
        expect_args(toks, 2, lineno);
        declared_edges = parse_int(toks[1], lineno);
      } else if (key == "e") {
        expect_args(toks, 4, lineno);
        if (declared_nodes < 0) throw ParseError(ParseErrorKind::kSyntax, lineno, "edge before Nodes");
        const std::int64_t u = parse_int(toks[1], lineno);
        const std::int64_t v = parse_int(toks[2], lineno);
        const Weight w = parse_weight(toks[3], lineno);
        if (u < 1 || u > declared_nodes || v < 1 || v > declared_nodes) {
          throw ParseError(ParseErrorKind::kEdgeOutOfRange, lineno, toks[1] + " " + toks[2]);
        }
        ++edge_lines;
        raw_edges.push_back({Edge{static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1), w}, lineno});
      } else {
        throw ParseError(ParseErrorKind::kSyntax, lineno, "unsupported Graph entry '" + toks.front() + "'");
      }
    } else if (section == "terminals") {
      if (key == "terminals") {
        expect_args(toks, 2, lineno);
        declared_terminals = parse_int(toks[1], lineno);
      } else if (key == "t") {
        expect_args(toks, 2, lineno);
        raw_terminals.emplace_back(parse_int(toks[1], lineno), lineno);
      } else {
        throw ParseError(ParseErrorKind::kSyntax, lineno,
                         "unsupported Terminals entry '" + toks.front() + "'");
      }
    }
    // Other sections (Coordinates, Presolve, ...) are skipped.
  }

  if (!section.empty()) throw ParseError(ParseErrorKind::kSyntax, lineno, "unterminated SECTION " + section);
  if (!saw_eof) throw ParseError(ParseErrorKind::kSyntax, lineno, "missing EOF");
  if (!saw_graph || declared_nodes < 0) throw ParseError(ParseErrorKind::kSyntax, 0, "missing Graph section");
  if (!saw_terminals) throw ParseError(ParseErrorKind::kSyntax, 0, "missing Terminals section");
  if (declared_edges >= 0 && declared_edges != edge_lines) {
    throw ParseError(ParseErrorKind::kSyntax, 0,
                     "Edges declares " + std::to_string(declared_edges) + " but file lists " +
                         std::to_string(edge_lines));
  }
  if (declared_terminals >= 0 && declared_terminals != static_cast<std::int64_t>(raw_terminals.size())) {
    throw ParseError(ParseErrorKind::kSyntax, 0,
                     "Terminals declares " + std::to_string(declared_terminals) + " but file lists " +
                         std::to_string(raw_terminals.size()));
  }

  const auto n = static_cast<Vertex>(declared_nodes);
  std::vector<Vertex> terminals;
  for (const auto& [t, at] : raw_terminals) {
    if (t < 1 || t > declared_nodes) {
      throw ParseError(ParseErrorKind::kTerminalOutOfRange, at, std::to_string(t));
    }
    terminals.push_back(static_cast<Vertex>(t - 1));
  }
  if (terminals.empty()) throw ParseError(ParseErrorKind::kNoTerminals, 0, "");

  // Simple graph: drop loops, keep the cheapest parallel copy.
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::vector<Edge> edges;
  for (const auto& [raw, at] : raw_edges) {
    const Edge e = normalized(raw);
    if (e.u == e.v) continue;
    const std::uint64_t key = (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint32_t>(e.v);
    auto [it, inserted] = seen.emplace(key, edges.size());
    if (inserted) {
      edges.push_back(e);
    } else {
      edges[it->second].w = std::min(edges[it->second].w, e.w);
    }
  }

  std::vector<std::int64_t> file_ids(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) file_ids[static_cast<std::size_t>(v)] = v + 1;

  WeightedGraph graph = WeightedGraph::complete_vertex_set(n, std::move(edges));
  if (!graph.is_connected()) throw ParseError(ParseErrorKind::kDisconnected, 0, "");
  return SteinerInstance(std::move(graph), std::move(terminals), name.empty() ? fallback_name : name,
                         std::move(file_ids));
}

SteinerInstance read_stp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_stp(in, path.stem().string());
}

void write_stp(std::ostream& out, const SteinerInstance& instance) {
  const WeightedGraph& g = instance.graph();
  out << "33D32945 STP File, STP Format Version 1.0\n\n";
  out << "SECTION Comment\n";
  out << "Name    \"" << instance.name() << "\"\n";
  out << "END\n\n";
  out << "SECTION Graph\n";
  out << "Nodes " << g.id_bound() << "\n";
  out << "Edges " << g.edge_count() << "\n";
  for (const Edge& e : g.edges()) {
    out << "E " << instance.file_id(e.u) << " " << instance.file_id(e.v) << " " << e.w << "\n";
  }
  out << "END\n\n";
  out << "SECTION Terminals\n";
  out << "Terminals " << instance.terminals().size() << "\n";
  for (Vertex t : instance.terminals()) out << "T " << instance.file_id(t) << "\n";
  out << "END\n\n";
  out << "EOF\n";
}

}  // namespace smh
