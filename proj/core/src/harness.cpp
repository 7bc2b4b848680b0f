#include "hmtsp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hmtsp/io.hpp"
#include "hmtsp/sampling.hpp"

namespace hmtsp {

ProviderSpec ProviderSpec::parse(const std::string& text) {
  if (text == "surrogate") return {ProviderKind::kSurrogate, {}};
  if (text == "uniform") return {ProviderKind::kUniform, {}};
  if (text.rfind("file:", 0) == 0 && text.size() > 5) return {ProviderKind::kFile, text.substr(5)};
  throw std::invalid_argument("unknown provider '" + text + "' (expected surrogate, uniform or file:<path>)");
}

std::string ProviderSpec::label() const {
  switch (kind) {
    case ProviderKind::kSurrogate: return "surrogate";
    case ProviderKind::kUniform: return "uniform";
    case ProviderKind::kFile: return "file";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (instance_paths.empty()) {
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    if (count == 0) throw std::invalid_argument("count must be positive");
  }
  if (m == 1) throw std::invalid_argument("m must be at least 2");
  if (omega < 1) throw std::invalid_argument("omega must be at least 1");
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  if (rounds && *rounds == 0) throw std::invalid_argument("rounds must be positive");
  params.validate();
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "hmtsp_out";
}

double gap_percent(double length, double reference) {
  if (!(reference > 0.0)) return 0.0;
  const double gap = (length - reference) / reference * 100.0;
  // equal tours summed in a different order differ by a few ulps
  return std::abs(gap) < 1e-9 ? 0.0 : gap;
}

std::string csv_header() { return "id,n,provider,length,reference,gap_pct,hm_ms,mcts_ms,restarts,actions"; }

std::string csv_row(const BenchRow& row) {
  char buf[512];
  if (!row.ok) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%s,failed,,,,,,", row.id.c_str(), row.n, row.provider.c_str());
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%s,%zu,%s,%.6f,%.6f,%.4f,%.1f,%.1f,%llu,%llu", row.id.c_str(), row.n,
                row.provider.c_str(), row.length, row.reference, row.gap_pct, row.hm_ms, row.mcts_ms,
                static_cast<unsigned long long>(row.restarts), static_cast<unsigned long long>(row.actions));
  return buf;
}

BenchSummary summarize(const std::vector<BenchRow>& rows, double wall_ms) {
  BenchSummary s;
  s.rows = rows.size();
  s.wall_ms = wall_ms;
  std::size_t ok = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++s.failures;
      continue;
    }
    ++ok;
    s.mean_length += r.length;
    s.mean_gap_pct += r.gap_pct;
  }
  if (ok) {
    s.mean_length /= static_cast<double>(ok);
    s.mean_gap_pct /= static_cast<double>(ok);
  }
  return s;
}

std::string format_summary(const BenchSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "instances=%zu failed=%zu mean_length=%.6f mean_gap_pct=%.4f wall_ms=%.1f", s.rows,
                s.failures, s.mean_length, s.mean_gap_pct, s.wall_ms);
  return buf;
}

std::vector<InstanceJob> resolve_instances(const RunConfig& config) {
  std::vector<InstanceJob> jobs;
  if (!config.instance_paths.empty()) {
    for (std::size_t i = 0; i < config.instance_paths.size(); ++i) {
      const auto& p = config.instance_paths[i];
      jobs.push_back({p.stem().string(), read_instance(p), Rng::derive_seed(config.seed, i)});
    }
    return jobs;
  }
  for (std::size_t i = 0; i < config.count; ++i) {
    Rng rng(config.seed + i);
    char id[64];
    std::snprintf(id, sizeof id, "n%zu_s%llu", config.n, static_cast<unsigned long long>(config.seed + i));
    jobs.push_back({id, generate_instance(config.n, rng), Rng::derive_seed(config.seed, i)});
  }
  return jobs;
}

namespace {

std::filesystem::path per_instance(const std::filesystem::path& base, const std::string& id, const char* ext) {
  if (std::filesystem::is_directory(base)) return base / (id + ext);
  return base;
}

std::filesystem::path per_instance_dir(const std::filesystem::path& base, const std::string& id) {
  if (std::filesystem::exists(base / "sub_000000.members")) return base;
  return base / id;
}

}  // namespace

HeatMap build_heatmap(const InstanceJob& job, const RunConfig& config) {
  const Instance& inst = job.inst;
  const double eps = config.params.epsilon;
  if (config.merge_from) {
    const auto records = read_sample_records(per_instance_dir(*config.merge_from, job.id), inst);
    return merge_sample_records(inst, records, eps).heatmap;
  }
  if (config.provider.kind == ProviderKind::kFile) {
    return prune_unpromising(load_heatmap(per_instance(config.provider.path, job.id, ".heat"), inst.size()), inst, eps);
  }

  std::unique_ptr<HeatMapProvider> provider;
  if (config.provider.kind == ProviderKind::kUniform) {
    provider = std::make_unique<UniformProvider>(config.kappa);
  } else {
    provider = std::make_unique<SurrogateProvider>(config.kappa);
  }
  PipelineOptions opts;
  opts.m = config.m == 0 ? default_sample_size(inst.size()) : std::min(config.m, inst.size());
  opts.omega = config.omega;
  opts.epsilon = eps;
  std::size_t dumped = 0;
  const std::filesystem::path dir = config.dump_submaps ? *config.dump_submaps / job.id : std::filesystem::path();
  if (config.dump_submaps) {
    opts.on_sample = [&](const SampleRecord& rec) { write_sample_record(dir, dumped++, inst, rec); };
  }
  Rng rng(Rng::derive_seed(job.solve_seed, 0));
  return build_global_heatmap(inst, *provider, opts, rng).heatmap;
}

BenchRow run_instance(const InstanceJob& job, const RunConfig& config) {
  using Clock = std::chrono::steady_clock;
  BenchRow row;
  row.id = job.id;
  row.n = job.inst.size();
  row.provider = config.merge_from ? "merged" : config.provider.label();
  try {
    const Instance& inst = job.inst;
    const Normalization& norm = inst.normalization();

    const auto t0 = Clock::now();
    const HeatMap hm = build_heatmap(job, config);
    row.hm_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    Budget budget;
    if (config.rounds) {
      budget.rounds = config.rounds;
    } else {
      budget = Budget::from_params(config.params, inst.size());
    }
    Rng rng(Rng::derive_seed(job.solve_seed, 1));
    const SolveResult res = solve(inst, hm, config.params, budget, rng);
    row.mcts_ms = res.stats.elapsed_ms;
    check_tour(inst, res.tour);
    row.tour = res.tour;
    row.length = norm.to_original_length(tour_length(inst, res.tour));
    row.restarts = res.stats.restarts;
    row.actions = res.stats.actions_examined;

    if (config.reference) {
      const auto ref = read_tour(per_instance(*config.reference, job.id, ".tour"));
      row.reference = norm.to_original_length(tour_length(inst, ref.tour));
      row.reference_kind = "file";
    } else if (inst.size() <= kBruteForceMaxN) {
      row.reference = norm.to_original_length(brute_force_optimum(inst).length);
      row.reference_kind = "optimum";
    } else {
      row.reference = norm.to_original_length(tour_length(inst, greedy_nearest_neighbor(inst, 0)));
      row.reference_kind = "greedy";
    }
    row.gap_pct = gap_percent(row.length, row.reference);

    if (!config.out_dir.empty()) {
      std::filesystem::create_directories(config.out_dir);
      write_tour(config.out_dir / (job.id + ".tour"), row.tour, row.length);
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::vector<BenchRow> run_batch(const std::vector<InstanceJob>& jobs, const RunConfig& config) {
  std::vector<BenchRow> rows(jobs.size());
  std::size_t workers = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(1, jobs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) rows[i] = run_instance(jobs[i], config);
  };
  if (workers <= 1) {
    work();
    return rows;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();  // joins
  return rows;
}

std::vector<std::filesystem::path> generate_instances(std::size_t n, std::size_t count, std::uint64_t seed,
                                                      const std::filesystem::path& out_dir) {
  if (n < 3) throw InstanceError("n must be at least 3");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed + i);
    const Instance inst = generate_instance(n, rng);
    char name[64];
    std::snprintf(name, sizeof name, "n%zu_s%llu.inst", n, static_cast<unsigned long long>(seed + i));
    paths.push_back(out_dir / name);
    write_instance(paths.back(), inst);
  }
  return paths;
}

}  // namespace hmtsp
