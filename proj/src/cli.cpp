#include "smh/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "smh/error.hpp"
#include "smh/report.hpp"
#include "smh/stp_format.hpp"
#include "smh/treewidth.hpp"

namespace smh {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

OutputFormat parse_format(const std::string& name) {
  if (name == "table") return OutputFormat::kTable;
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw std::invalid_argument("unknown format '" + name + "' (expected table, csv or json)");
}

void RunOptions::set_seed(std::uint64_t seed) {
  generator.seed = derive_seed(seed, 0);
  merge.seed = derive_seed(seed, 1);
}

namespace {

// Maps toolkit errors to exit codes and reports them on `err`.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const InconsistencyError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const RefusedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRefused;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const TimeoutError& e) {
    err << "error: " << e.what() << '\n';
    return kExitTimeout;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::kMalformedHeader, 0, "cannot open '" + path + "'");
  return in;
}

SteinerInstance load(const std::string& path) {
  if (!fs::is_regular_file(path)) throw ParseError(ParseErrorKind::kMalformedHeader, 0, "cannot open '" + path + "'");
  return read_stp_file(path);
}

// Per-run copy of the options with the time limit turned into deadlines.
RunOptions with_deadline(const RunOptions& options) {
  RunOptions run = options;
  if (options.time_limit) {
    const auto deadline = Deadline::after(*options.time_limit);
    run.generator.deadline = deadline;
    run.merge.dp.deadline = deadline;
  }
  return run;
}

ordered_json tree_json(const SteinerInstance& instance, const SteinerSolution& tree) {
  ordered_json edges = ordered_json::array();
  for (const Edge& e : tree.edges) edges.push_back({instance.file_id(e.u), instance.file_id(e.v), e.w});
  return edges;
}

struct Outcome {
  MergeReport report;
  double generation_seconds = 0.0;
  std::vector<Weight> pool_weights;
};

int exit_code(const MergeReport& report) {
  if (report.timed_out) return kExitTimeout;
  if (report.capacity_fallback) return kExitCapacity;
  return kExitOk;
}

void write_report(std::ostream& out, const SteinerInstance& instance, const Outcome& outcome,
                  const RunOptions& options) {
  const MergeReport& r = outcome.report;
  const auto format = options.format.value_or(OutputFormat::kTable);
  if (format == OutputFormat::kJson) {
    ordered_json j;
    j["instance"] = instance.name();
    j["vertices"] = instance.graph().vertex_count();
    j["edges"] = instance.graph().edge_count();
    j["terminals"] = instance.terminals().size();
    j["config"] = {{"pool", options.generator.pool_size},
                   {"grasp_iters", options.generator.iterations_per_run},
                   {"perturb", options.generator.perturbation_strength},
                   {"max_width", options.merge.max_width},
                   {"rank_width", options.merge.rank_width},
                   {"rank_iters", options.merge.rank_iterations},
                   {"keep_best", options.merge.keep_best}};
    j["pool"] = {{"size", r.pool_size}, {"best", r.pool_best}, {"weights", outcome.pool_weights}};
    ordered_json rounds = ordered_json::array();
    for (const auto& it : r.ranking.log) {
      ordered_json round = {{"trees", it.selected}, {"width", it.width}};
      round["value"] = it.value ? ordered_json(*it.value) : ordered_json(nullptr);
      if (!it.skipped.empty()) round["skipped"] = it.skipped;
      if (options.timings) round["seconds"] = it.seconds;
      rounds.push_back(std::move(round));
    }
    ordered_json adjusted = ordered_json::array();
    for (const auto& m : r.ranking.adjusted) adjusted.push_back({{"sum", m.sum}, {"count", m.count}});
    j["ranking"] = {{"rounds", rounds}, {"adjusted", adjusted}};
    j["final"] = {{"order", r.order},
                  {"trees_used", r.trees_used},
                  {"width", r.final_width},
                  {"union_vertices", r.union_vertices},
                  {"union_edges", r.union_edges},
                  {"dp_value", r.final_value ? ordered_json(*r.final_value) : ordered_json(nullptr)}};
    j["result"] = {{"weight", r.best.weight}, {"source", to_string(r.source)}, {"tree", tree_json(instance, r.best)}};
    j["flags"] = {{"capacity_fallback", r.capacity_fallback}, {"timed_out", r.timed_out}};
    if (options.timings) {
      j["seconds"] = {{"generation", outcome.generation_seconds},
                      {"ranking", r.ranking_seconds},
                      {"final", r.final_seconds}};
    }
    out << j.dump(2) << '\n';
  } else if (format == OutputFormat::kCsv) {
    out << "instance,terminals,edges,pool_size,pool_best,smh_value,trees_used,final_width,source,"
           "capacity_fallback,timed_out";
    if (options.timings) out << ",generation_time,merge_time";
    out << '\n';
    out << instance.name() << ',' << instance.terminals().size() << ',' << instance.graph().edge_count() << ','
        << r.pool_size << ',' << r.pool_best << ',' << r.best.weight << ',' << r.trees_used.size() << ','
        << r.final_width << ',' << to_string(r.source) << ',' << (r.capacity_fallback ? 1 : 0) << ','
        << (r.timed_out ? 1 : 0);
    if (options.timings) out << ',' << outcome.generation_seconds << ',' << r.ranking_seconds + r.final_seconds;
    out << '\n';
  } else {
    char buf[160];
    out << "instance    " << instance.name() << "  (|V| " << instance.graph().vertex_count() << ", |E| "
        << instance.graph().edge_count() << ", |Q| " << instance.terminals().size() << ")\n";
    out << "pool        " << r.pool_size << " trees, best " << r.pool_best << '\n';
    std::size_t solved = 0;
    for (const auto& it : r.ranking.log) solved += it.value ? 1 : 0;
    out << "ranking     " << r.ranking.log.size() << " rounds at width <= " << options.merge.rank_width << ", "
        << solved << " solved";
    if (r.ranking.incumbent) out << ", best " << r.ranking.incumbent->weight;
    out << '\n';
    out << "final union " << r.trees_used.size() << " trees, width " << r.final_width << ", " << r.union_vertices
        << " vertices, " << r.union_edges << " edges";
    if (r.final_value) out << ", optimum " << *r.final_value;
    out << '\n';
    out << "result      " << r.best.weight << " from " << to_string(r.source) << '\n';
    if (r.capacity_fallback) out << "note        final DP over budget; fell back to the best tree seen\n";
    if (r.timed_out) out << "note        time limit reached; best tree so far reported\n";
    std::snprintf(buf, sizeof buf, "time        generation %.3f s, merge %.3f s\n", outcome.generation_seconds,
                  r.ranking_seconds + r.final_seconds);
    out << buf;
  }
}

Outcome pipeline(const SteinerInstance& instance, const RunOptions& run, const SolutionPool* given = nullptr) {
  Outcome outcome;
  SolutionPool generated;
  bool generation_cut = false;
  if (!given) {
    const Stopwatch clock;
    generated = generate_pool(instance, run.generator);
    outcome.generation_seconds = clock.seconds();
    generation_cut = run.generator.deadline.expired();
    given = &generated;
  }
  for (const auto& tree : given->solutions) outcome.pool_weights.push_back(tree.weight);
  outcome.report = run_smh(instance, *given, run.merge);
  outcome.report.timed_out = outcome.report.timed_out || generation_cut;
  return outcome;
}

}  // namespace

int cmd_solve(const std::string& stp_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto instance = load(stp_path);
    const auto run = with_deadline(options);
    const auto outcome = pipeline(instance, run);
    write_report(out, instance, outcome, options);
    return exit_code(outcome.report);
  });
}

int cmd_generate(const std::string& stp_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto instance = load(stp_path);
    const auto run = with_deadline(options);
    const auto pool = generate_pool(instance, run.generator);
    write_pool(out, instance, pool);
    return kExitOk;
  });
}

int cmd_merge(const std::string& stp_path, const std::string& pool_path, const RunOptions& options,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto instance = load(stp_path);
    auto in = open_input(pool_path);
    const auto pool = read_pool(in, instance);
    if (pool.empty()) throw InconsistencyError("pool file holds no solutions");
    const auto run = with_deadline(options);
    const auto outcome = pipeline(instance, run, &pool);
    write_report(out, instance, outcome, options);
    return exit_code(outcome.report);
  });
}

int cmd_oracle(const std::string& stp_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto instance = load(stp_path);
    const auto tree = dreyfus_wagner(instance, options.oracle_cap);
    const auto format = options.format.value_or(OutputFormat::kTable);
    if (format == OutputFormat::kJson) {
      ordered_json j{{"instance", instance.name()}, {"weight", tree.weight}, {"tree", tree_json(instance, tree)}};
      out << j.dump(2) << '\n';
    } else if (format == OutputFormat::kCsv) {
      out << "instance,terminals,edges,optimum\n"
          << instance.name() << ',' << instance.terminals().size() << ',' << instance.graph().edge_count() << ','
          << tree.weight << '\n';
    } else {
      out << "instance " << instance.name() << "\noptimum  " << tree.weight << "\nedges   ";
      for (const Edge& e : tree.edges) out << ' ' << instance.file_id(e.u) << '-' << instance.file_id(e.v);
      out << '\n';
    }
    return kExitOk;
  });
}

int cmd_validate_td(const std::string& stp_path, const std::string& td_path, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&] {
    const auto instance = load(stp_path);
    auto in = open_input(td_path);
    const auto td = read_td(in);
    const auto violations = validate(instance.graph(), td);
    if (violations.empty()) {
      out << "valid: " << td.bags.size() << " bags, width " << td.width << '\n';
      return kExitOk;
    }
    for (const auto& v : violations) out << "violation: " << v.message << '\n';
    return kExitInvalid;
  });
}

int cmd_bench(const BenchOptions& bench, const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::is_directory(bench.directory)) {
      throw std::invalid_argument("'" + bench.directory + "' is not a directory");
    }
    if (bench.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
    std::map<std::string, Weight> best_known;
    if (bench.best_known_file) {
      auto in = open_input(*bench.best_known_file);
      for (auto& [name, value] : read_best_known(in)) best_known[name] = value;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(bench.directory)) {
      auto ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (entry.is_regular_file() && ext == ".stp") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    struct Slot {
      std::optional<BenchRecord> row;
      std::string error;
      int code = kExitOk;
    };
    std::vector<Slot> slots(files.size());
    auto work = [&](std::size_t i) {
      std::ostringstream messages;
      slots[i].code = guarded(messages, [&] {
        const auto instance = read_stp_file(files[i]);
        const auto run = with_deadline(options);
        const auto outcome = pipeline(instance, run);
        BenchRecord r;
        r.instance = instance.name();
        r.terminals = instance.terminals().size();
        r.edges = instance.graph().edge_count();
        if (const auto it = best_known.find(instance.name()); it != best_known.end()) r.best_known = it->second;
        r.grasp_value = outcome.report.pool_best;
        r.smh_value = outcome.report.best.weight;
        r.grasp_time = outcome.generation_seconds;
        r.smh_time = outcome.report.ranking_seconds + outcome.report.final_seconds;
        r.trees_used = outcome.report.trees_used.size();
        r.degraded = outcome.report.degraded();
        slots[i].row = std::move(r);
        return kExitOk;
      });
      slots[i].error = files[i].filename().string() + ": " + messages.str();
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(bench.jobs), files.size());
    if (workers <= 1) {
      for (std::size_t i = 0; i < files.size(); ++i) work(i);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> team;
      for (std::size_t w = 0; w < workers; ++w) {
        team.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < files.size();) work(i);
        });
      }
    }

    std::vector<BenchRecord> rows;
    int code = kExitOk;
    for (auto& slot : slots) {
      if (!slot.row) {
        err << slot.error;
        if (code == kExitOk) code = slot.code;
        continue;
      }
      if (bench.drop_solved && slot.row->best_known && slot.row->grasp_value <= *slot.row->best_known) continue;
      rows.push_back(std::move(*slot.row));
    }
    switch (options.format.value_or(OutputFormat::kCsv)) {
      case OutputFormat::kCsv:
        write_bench_csv(out, rows);
        break;
      case OutputFormat::kTable:
        write_bench_table(out, rows);
        break;
      case OutputFormat::kJson: {
        ordered_json list = ordered_json::array();
        for (const auto& r : rows) {
          ordered_json row{{"instance", r.instance},
                           {"terminals", r.terminals},
                           {"edges", r.edges},
                           {"best_known", r.best_known ? ordered_json(*r.best_known) : ordered_json(nullptr)},
                           {"grasp_value", r.grasp_value},
                           {"smh_value", r.smh_value},
                           {"grasp_gap", r.grasp_gap() ? ordered_json(r.grasp_gap()->fixed2()) : ordered_json(nullptr)},
                           {"smh_gap", r.smh_gap() ? ordered_json(r.smh_gap()->fixed2()) : ordered_json(nullptr)},
                           {"improvement", r.impr() ? ordered_json(r.impr()->fixed2()) : ordered_json(nullptr)},
                           {"grasp_time", r.grasp_time},
                           {"smh_time", r.smh_time},
                           {"rel_time", r.rel_time() ? ordered_json(*r.rel_time()) : ordered_json(nullptr)},
                           {"trees_used", r.trees_used},
                           {"new_best", r.new_best()},
                           {"degraded", r.degraded}};
          list.push_back(std::move(row));
        }
        const auto s = summarize(rows);
        ordered_json summary{{"instances", s.instances},
                             {"with_best_known", s.with_best_known},
                             {"mean_grasp_gap", s.mean_grasp_gap ? ordered_json(*s.mean_grasp_gap) : ordered_json(nullptr)},
                             {"mean_smh_gap", s.mean_smh_gap ? ordered_json(*s.mean_smh_gap) : ordered_json(nullptr)},
                             {"grasp_best", s.grasp_best},
                             {"smh_best", s.smh_best},
                             {"improved", s.improved},
                             {"mean_rel_time", s.mean_rel_time ? ordered_json(*s.mean_rel_time) : ordered_json(nullptr)},
                             {"mean_trees_used", s.mean_trees_used}};
        out << ordered_json{{"rows", list}, {"summary", summary}}.dump(2) << '\n';
        break;
      }
    }
    return code;
  });
}

}  // namespace smh
