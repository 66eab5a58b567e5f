#include "smh/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "smh/error.hpp"

namespace smh {

std::string Percent::fixed2() const {
  const bool negative = (num < 0) != (den < 0) && num != 0;
  const __int128 n = num < 0 ? -static_cast<__int128>(num) : num;
  const __int128 d = den < 0 ? -static_cast<__int128>(den) : den;
  const __int128 hundredths = (n * 200 + d) / (2 * d);
  const auto whole = static_cast<long long>(hundredths / 100);
  const auto frac = static_cast<int>(hundredths % 100);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02d", negative && hundredths != 0 ? "-" : "", whole, frac);
  return buf;
}

std::optional<Percent> compute_gap(Weight value, std::optional<Weight> best_known) {
  if (!best_known) return std::nullopt;
  if (*best_known <= 0) throw std::invalid_argument("best-known value must be positive");
  return Percent{100 * (value - *best_known), *best_known};
}

std::optional<Percent> improvement(Weight before, Weight after, std::optional<Weight> best_known) {
  if (!best_known || before <= *best_known) return std::nullopt;
  return Percent{100 * (before - after), before - *best_known};
}

std::optional<double> BenchRecord::rel_time() const {
  if (!(grasp_time > 0.0)) return std::nullopt;
  return smh_time / grasp_time;
}

namespace {

std::string shortest(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::string quoted(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <class T>
std::string opt(const std::optional<T>& x) {
  if (!x) return {};
  if constexpr (std::is_same_v<T, Percent>) {
    return x->fixed2();
  } else if constexpr (std::is_same_v<T, double>) {
    return shortest(*x);
  } else {
    return std::to_string(*x);
  }
}

std::vector<std::string> split_csv(const std::string& line, int lineno) {
  std::vector<std::string> fields(1);
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (in_quotes) throw ParseError(ParseErrorKind::kSyntax, lineno, "unterminated quote");
  return fields;
}

template <class T>
T parse_number(const std::string& text, int lineno, const char* what) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError(ParseErrorKind::kSyntax, lineno, std::string("bad ") + what + " '" + text + "'");
  }
  return value;
}

bool parse_flag(const std::string& text, int lineno) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw ParseError(ParseErrorKind::kSyntax, lineno, "expected 0 or 1, got '" + text + "'");
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    out << quoted(r.instance) << ',' << r.terminals << ',' << r.edges << ',' << opt(r.best_known) << ','
        << r.grasp_value << ',' << r.smh_value << ',' << opt(r.grasp_gap()) << ',' << opt(r.smh_gap()) << ','
        << opt(r.impr()) << ',' << shortest(r.grasp_time) << ',' << shortest(r.smh_time) << ','
        << opt(r.rel_time()) << ',' << r.trees_used << ',' << (r.new_best() ? 1 : 0) << ','
        << (r.degraded ? 1 : 0) << '\n';
  }
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line) || trim(line) != kBenchCsvHeader) {
    throw ParseError(ParseErrorKind::kMalformedHeader, 1, "expected the bench CSV header");
  }
  std::vector<BenchRecord> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line, lineno);
    if (f.size() != 15) throw ParseError(ParseErrorKind::kSyntax, lineno, "expected 15 fields");
    BenchRecord r;
    r.instance = f[0];
    r.terminals = parse_number<std::size_t>(f[1], lineno, "terminal count");
    r.edges = parse_number<std::size_t>(f[2], lineno, "edge count");
    if (!f[3].empty()) r.best_known = parse_number<Weight>(f[3], lineno, "best-known value");
    r.grasp_value = parse_number<Weight>(f[4], lineno, "value");
    r.smh_value = parse_number<Weight>(f[5], lineno, "value");
    r.grasp_time = parse_number<double>(f[9], lineno, "time");
    r.smh_time = parse_number<double>(f[10], lineno, "time");
    r.trees_used = parse_number<std::size_t>(f[12], lineno, "tree count");
    r.degraded = parse_flag(f[14], lineno);
    const bool consistent = f[6] == opt(r.grasp_gap()) && f[7] == opt(r.smh_gap()) && f[8] == opt(r.impr()) &&
                            f[11] == opt(r.rel_time()) && parse_flag(f[13], lineno) == r.new_best();
    if (!consistent) throw ParseError(ParseErrorKind::kSyntax, lineno, "derived columns disagree with the values");
    rows.push_back(std::move(r));
  }
  return rows;
}

BenchSummary summarize(std::span<const BenchRecord> rows) {
  BenchSummary s;
  s.instances = rows.size();
  double grasp_gap = 0.0;
  double smh_gap = 0.0;
  double rel = 0.0;
  std::size_t timed = 0;
  double trees = 0.0;
  for (const auto& r : rows) {
    trees += static_cast<double>(r.trees_used);
    if (r.smh_value < r.grasp_value) ++s.improved;
    if (const auto x = r.rel_time()) {
      rel += *x;
      ++timed;
    }
    if (!r.best_known) continue;
    ++s.with_best_known;
    grasp_gap += r.grasp_gap()->value();
    smh_gap += r.smh_gap()->value();
    if (r.grasp_value <= *r.best_known) ++s.grasp_best;
    if (r.smh_value <= *r.best_known) ++s.smh_best;
  }
  if (s.with_best_known > 0) {
    s.mean_grasp_gap = grasp_gap / static_cast<double>(s.with_best_known);
    s.mean_smh_gap = smh_gap / static_cast<double>(s.with_best_known);
  }
  if (timed > 0) s.mean_rel_time = rel / static_cast<double>(timed);
  if (!rows.empty()) s.mean_trees_used = trees / static_cast<double>(rows.size());
  return s;
}

void write_bench_table(std::ostream& out, std::span<const BenchRecord> rows) {
  auto cell = [](const std::optional<Percent>& p) { return p ? p->fixed2() : std::string("-"); };
  auto fixed = [](double x) {
    char text[32];
    std::snprintf(text, sizeof text, "%.2f", x);
    return std::string(text);
  };
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %6s %8s | %9s %9s | %9s %9s | %8s %6s %6s\n", "Instance", "|Q|", "|E|",
                "GRASP %", "Time (s)", "SMH %", "Time (s)", "Impr. %", "Rel.", "#Trees");
  out << buf;
  for (const auto& r : rows) {
    const auto rel = r.rel_time();
    const std::string name = r.instance + (r.new_best() ? "*" : "") + (r.degraded ? "!" : "");
    std::snprintf(buf, sizeof buf, "%-20s %6zu %8zu | %9s %9.2f | %9s %9.2f | %8s %6s %6zu\n", name.c_str(),
                  r.terminals, r.edges, cell(r.grasp_gap()).c_str(), r.grasp_time, cell(r.smh_gap()).c_str(),
                  r.smh_time, cell(r.impr()).c_str(), rel ? fixed(*rel).c_str() : "-",
                  r.trees_used);
    out << buf;
  }
  const auto s = summarize(rows);
  out << "instances " << s.instances << " (best-known for " << s.with_best_known << ")\n";
  if (s.mean_grasp_gap) {
    std::snprintf(buf, sizeof buf, "mean gap %%: GRASP %.3f  SMH %.3f\n", *s.mean_grasp_gap, *s.mean_smh_gap);
    out << buf;
    out << "#best: GRASP " << s.grasp_best << "  SMH " << s.smh_best << '\n';
  }
  out << "improved by SMH: " << s.improved << '\n';
  if (s.mean_rel_time) {
    std::snprintf(buf, sizeof buf, "mean Rel.: %.3f\n", *s.mean_rel_time);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "mean #trees: %.2f\n", s.mean_trees_used);
  out << buf;
  if (std::any_of(rows.begin(), rows.end(), [](const BenchRecord& r) { return r.new_best() || r.degraded; })) {
    out << "* below the best-known value   ! capacity fallback or time limit\n";
  }
}

std::vector<std::pair<std::string, Weight>> read_best_known(std::istream& in) {
  std::vector<std::pair<std::string, Weight>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ParseError(ParseErrorKind::kSyntax, lineno, "expected 'name,value'");
    const auto name = trim(line.substr(0, comma));
    const auto value = parse_number<Weight>(trim(line.substr(comma + 1)), lineno, "best-known value");
    if (name.empty() || value <= 0) throw ParseError(ParseErrorKind::kSyntax, lineno, "expected 'name,value' with value > 0");
    out.emplace_back(name, value);
  }
  return out;
}

}  // namespace smh
