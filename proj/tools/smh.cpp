// smh: Steiner tree solution merging from the command line.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "smh/cli.hpp"

namespace {

struct Flags {
  std::string stp;
  std::string pool_file;
  std::string td_file;
  std::string directory;
  std::string best_known;
  std::string format;
  std::string out;
  std::uint64_t seed = 0;
  double time_limit = 0.0;
  int threads = 1;
  int jobs = 1;
  bool drop_solved = false;
  smh::RunOptions run;
};

void add_run_flags(CLI::App* cmd, Flags& f, bool merge_flags) {
  auto& g = f.run.generator;
  cmd->add_option("--pool", g.pool_size, "pool size (GRASP runs)")->envname("SMH_POOL")->capture_default_str();
  cmd->add_option("--grasp-iters", g.iterations_per_run, "construct + local search rounds per run")
      ->envname("SMH_GRASP_ITERS")
      ->capture_default_str();
  cmd->add_option("--perturb", g.perturbation_strength, "relative weight perturbation")
      ->envname("SMH_PERTURB")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "random seed")->envname("SMH_SEED")->capture_default_str();
  cmd->add_option("--threads", f.threads, "worker threads per instance")->envname("SMH_THREADS")->capture_default_str();
  cmd->add_option("--time-limit", f.time_limit, "wall-clock limit in seconds per instance")
      ->envname("SMH_TIME_LIMIT")
      ->check(CLI::PositiveNumber);
  if (!merge_flags) return;
  auto& m = f.run.merge;
  cmd->add_option("--max-width", m.max_width, "width cap of the final union")
      ->envname("SMH_MAX_WIDTH")
      ->capture_default_str();
  cmd->add_option("--rank-width", m.rank_width, "width cap during ranking")
      ->envname("SMH_RANK_WIDTH")
      ->capture_default_str();
  cmd->add_option("--rank-iters", m.rank_iterations, "ranking rounds")->envname("SMH_RANK_ITERS")->capture_default_str();
  cmd->add_option("--max-entries", m.dp.max_entries, "DP table entry budget")
      ->envname("SMH_MAX_ENTRIES")
      ->capture_default_str();
  cmd->add_flag("--timings", f.run.timings, "include wall times in csv/json output");
}

void add_format(CLI::App* cmd, Flags& f, const char* fallback) {
  cmd->add_option("--format", f.format, std::string("table, csv or json (default ") + fallback + ")")
      ->envname("SMH_FORMAT")
      ->check(CLI::IsMember({"table", "csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steiner tree solution merging heuristic"};
  app.require_subcommand(1);
  Flags f;

  auto* out_opt = app.add_option("-o,--out", f.out, "write results to this file instead of stdout");

  auto* solve = app.add_subcommand("solve", "generate a pool, merge it and report the best tree");
  solve->add_option("instance", f.stp, "STP file")->required();
  add_run_flags(solve, f, true);
  add_format(solve, f, "table");

  auto* generate = app.add_subcommand("generate", "write a pool of GRASP solutions");
  generate->add_option("instance", f.stp, "STP file")->required();
  add_run_flags(generate, f, false);

  auto* merge = app.add_subcommand("merge", "merge an existing pool file");
  merge->add_option("instance", f.stp, "STP file")->required();
  merge->add_option("pool-file", f.pool_file, "pool file from generate")->required();
  add_run_flags(merge, f, true);
  add_format(merge, f, "table");

  auto* oracle = app.add_subcommand("oracle", "exact Dreyfus-Wagner solve for small terminal sets");
  oracle->add_option("instance", f.stp, "STP file")->required();
  oracle->add_option("--oracle-cap", f.run.oracle_cap, "largest terminal count accepted")
      ->envname("SMH_ORACLE_CAP")
      ->capture_default_str();
  add_format(oracle, f, "table");

  auto* validate_td = app.add_subcommand("validate-td", "check a PACE .td file against an instance");
  validate_td->add_option("instance", f.stp, "STP file")->required();
  validate_td->add_option("td", f.td_file, ".td file")->required();

  auto* bench = app.add_subcommand("bench", "run every .stp file of a directory");
  bench->add_option("directory", f.directory, "instance directory")->required();
  bench->add_option("--best-known", f.best_known, "side file of name,value lines")->envname("SMH_BEST_KNOWN");
  bench->add_option("--jobs", f.jobs, "instances solved in parallel")->envname("SMH_JOBS")->capture_default_str();
  bench->add_flag("--drop-solved", f.drop_solved, "skip rows whose pool already reaches the best-known value");
  add_run_flags(bench, f, true);
  add_format(bench, f, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? smh::kExitOk : smh::kExitUsage;
  }

  std::ofstream file;
  if (*out_opt) {
    file.open(f.out);
    if (!file) {
      std::cerr << "error: cannot write '" << f.out << "'\n";
      return smh::kExitUsage;
    }
  }
  std::ostream& out = *out_opt ? static_cast<std::ostream&>(file) : std::cout;

  f.run.set_seed(f.seed);
  f.run.generator.threads = f.threads;
  f.run.merge.threads = f.threads;
  if (f.time_limit > 0.0) f.run.time_limit = f.time_limit;
  if (!f.format.empty()) f.run.format = smh::parse_format(f.format);

  if (*solve) return smh::cmd_solve(f.stp, f.run, out, std::cerr);
  if (*generate) return smh::cmd_generate(f.stp, f.run, out, std::cerr);
  if (*merge) return smh::cmd_merge(f.stp, f.pool_file, f.run, out, std::cerr);
  if (*oracle) return smh::cmd_oracle(f.stp, f.run, out, std::cerr);
  if (*validate_td) return smh::cmd_validate_td(f.stp, f.td_file, out, std::cerr);
  smh::BenchOptions options;
  options.directory = f.directory;
  if (!f.best_known.empty()) options.best_known_file = f.best_known;
  options.jobs = f.jobs;
  options.drop_solved = f.drop_solved;
  return smh::cmd_bench(options, f.run, out, std::cerr);
}
