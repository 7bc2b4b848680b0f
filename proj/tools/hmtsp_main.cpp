// hmtsp: generate instances, solve them through the heat-map pipeline, and
// benchmark batches against exact / greedy references.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hmtsp/harness.hpp"

namespace {

void add_solver_options(CLI::App* cmd, hmtsp::RunConfig& cfg, std::string& provider) {
  cmd->add_option("instances", cfg.instance_paths, "Instance files (otherwise generated from --n/--count/--seed)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--n", cfg.n, "Vertices per generated instance");
  cmd->add_option("--count", cfg.count, "Number of generated instances");
  cmd->add_option("--seed", cfg.seed, "Base seed");
  cmd->add_option("--provider", provider, "surrogate | uniform | file:<path>")->default_val("surrogate");
  cmd->add_option("--m", cfg.m, "Sub-graph size (default 20 for n<=100, else 50)");
  cmd->add_option("--omega", cfg.omega, "Minimum samples covering each vertex")->default_val(5);
  cmd->add_option("--kappa", cfg.kappa, "Neighbors per vertex in surrogate/uniform maps")->default_val(10);
  cmd->add_option("--epsilon", cfg.params.epsilon, "Pruning threshold for unpromising edges")->default_val(1e-4);
  cmd->add_option("--alpha", cfg.params.alpha, "Exploration weight")->default_val(1.0);
  cmd->add_option("--beta", cfg.params.beta, "Weight reinforcement rate")->default_val(10.0);
  cmd->add_option("--h-factor", cfg.params.h_factor, "Pool bound H = h_factor * n")->default_val(10.0);
  cmd->add_option("--t-factor", cfg.params.t_factor, "Time budget T = t_factor * n ms")->default_val(10.0);
  cmd->add_option("--k-max", cfg.params.k_max, "Maximum edges exchanged per action")->default_val(10);
  cmd->add_option("--rounds", cfg.rounds, "Deterministic budget: number of MCTS rounds instead of wall time");
  cmd->add_option("--reference", cfg.reference, "Reference tour file (or directory of <id>.tour)");
  cmd->add_option("--dump-submaps", cfg.dump_submaps, "Write converted sub-instances and sub-heat-maps here");
  cmd->add_option("--merge-from", cfg.merge_from, "Merge previously dumped (or externally computed) sub-maps");
  cmd->add_option("--out", cfg.out_dir, "Output directory (default $HMTSP_OUT_DIR or ./hmtsp_out)");
  cmd->add_option("--jobs", cfg.jobs, "Parallel solves (default: all cores)");
}

int run_rows(const std::vector<hmtsp::BenchRow>& rows, double wall_ms, const std::filesystem::path& csv_path,
             bool print_summary) {
  std::filesystem::create_directories(csv_path.parent_path());
  std::ofstream csv(csv_path);
  csv << hmtsp::csv_header() << '\n';
  std::cout << hmtsp::csv_header() << '\n';
  bool all_ok = true;
  for (const auto& r : rows) {
    csv << hmtsp::csv_row(r) << '\n';
    std::cout << hmtsp::csv_row(r) << '\n';
    if (!r.ok) {
      all_ok = false;
      std::cerr << "instance " << r.id << " failed: " << r.error << '\n';
    }
  }
  if (print_summary) std::cout << hmtsp::format_summary(hmtsp::summarize(rows, wall_ms)) << '\n';
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-map guided TSP solver with k-opt Monte Carlo tree search"};
  app.require_subcommand(1);

  std::size_t gen_n = 0, gen_count = 1;
  std::uint64_t gen_seed = 0;
  std::filesystem::path gen_out;
  auto* gen = app.add_subcommand("generate", "Write random unit-square instances");
  gen->add_option("--n", gen_n, "Vertices per instance")->required();
  gen->add_option("--count", gen_count, "Number of instances")->default_val(1);
  gen->add_option("--seed", gen_seed, "Seed of the first instance (others use seed+index)")->default_val(0);
  gen->add_option("--out", gen_out, "Output directory (default $HMTSP_OUT_DIR or ./hmtsp_out)");

  hmtsp::RunConfig solve_cfg;
  std::string solve_provider;
  auto* solve = app.add_subcommand("solve", "Build the heat map and solve one or more instances");
  add_solver_options(solve, solve_cfg, solve_provider);

  hmtsp::RunConfig bench_cfg;
  std::string bench_provider;
  auto* bench = app.add_subcommand("bench", "Solve a batch and write a CSV report with summary");
  add_solver_options(bench, bench_cfg, bench_provider);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (gen_out.empty()) gen_out = hmtsp::default_out_dir();
      for (const auto& p : hmtsp::generate_instances(gen_n, gen_count, gen_seed, gen_out)) {
        std::cout << p.string() << '\n';
      }
      return 0;
    }

    const bool is_bench = bench->parsed();
    hmtsp::RunConfig& cfg = is_bench ? bench_cfg : solve_cfg;
    cfg.provider = hmtsp::ProviderSpec::parse(is_bench ? bench_provider : solve_provider);
    if (cfg.out_dir.empty()) cfg.out_dir = hmtsp::default_out_dir();
    if (cfg.instance_paths.empty() && cfg.n == 0) {
      std::cerr << "error: no instances given (pass instance files or --n)\n";
      return 2;
    }
    cfg.validate();

    const auto started = std::chrono::steady_clock::now();
    const auto jobs = hmtsp::resolve_instances(cfg);
    if (jobs.empty()) {
      std::cerr << "error: empty instance list\n";
      return 2;
    }
    const auto rows = hmtsp::run_batch(jobs, cfg);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return run_rows(rows, wall_ms, cfg.out_dir / (is_bench ? "bench.csv" : "solve.csv"), is_bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
