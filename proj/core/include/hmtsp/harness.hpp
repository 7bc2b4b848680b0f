#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hmtsp/heatmap.hpp"
#include "hmtsp/instance.hpp"
#include "hmtsp/mcts.hpp"

namespace hmtsp {

enum class ProviderKind { kSurrogate, kUniform, kFile };

struct ProviderSpec {
  ProviderKind kind = ProviderKind::kSurrogate;
  std::filesystem::path path;  // kFile only

  // "surrogate", "uniform" or "file:<path>"
  static ProviderSpec parse(const std::string& text);
  std::string label() const;
};

inline constexpr const char* kOutDirEnv = "HMTSP_OUT_DIR";

struct RunConfig {
  // instance source: generated (n, count, seed) or explicit paths
  std::size_t n = 0;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> instance_paths;

  ProviderSpec provider;
  std::size_t m = 0;  // 0: default by n
  std::uint32_t omega = 5;
  std::size_t kappa = kDefaultKappa;
  Params params;
  std::optional<std::uint64_t> rounds;  // deterministic budget

  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> dump_submaps;
  std::optional<std::filesystem::path> merge_from;
  std::filesystem::path out_dir;
  std::size_t jobs = 0;  // 0: hardware concurrency

  void validate() const;  // throws std::invalid_argument
};

// Output directory from the environment, falling back to ./hmtsp_out.
std::filesystem::path default_out_dir();

struct InstanceJob {
  std::string id;
  Instance inst;
  std::uint64_t solve_seed = 0;
};

struct BenchRow {
  std::string id;
  std::size_t n = 0;
  std::string provider;
  bool ok = false;
  std::string error;
  double length = 0.0;     // input units
  double reference = 0.0;  // input units
  std::string reference_kind;  // optimum | greedy | file
  double gap_pct = 0.0;
  double hm_ms = 0.0;
  double mcts_ms = 0.0;
  std::uint64_t restarts = 0;
  std::uint64_t actions = 0;
  Tour tour;
};

double gap_percent(double length, double reference);

std::string csv_header();
std::string csv_row(const BenchRow& row);

struct BenchSummary {
  std::size_t rows = 0;
  std::size_t failures = 0;
  double mean_length = 0.0;
  double mean_gap_pct = 0.0;
  double wall_ms = 0.0;
};

BenchSummary summarize(const std::vector<BenchRow>& rows, double wall_ms);
std::string format_summary(const BenchSummary& s);

// Generated instances use seed + index; file instances are read in order.
// Each job gets an independent solve seed derived from config.seed.
std::vector<InstanceJob> resolve_instances(const RunConfig& config);

// Heat map for one instance according to the configured provider.
HeatMap build_heatmap(const InstanceJob& job, const RunConfig& config);

// Heat map, solve, reference and one report row. Never throws: failures are
// reported through row.ok / row.error.
BenchRow run_instance(const InstanceJob& job, const RunConfig& config);

// One solve per instance on up to config.jobs threads; rows in input order.
std::vector<BenchRow> run_batch(const std::vector<InstanceJob>& jobs, const RunConfig& config);

// Writes <out_dir>/<id>.inst files; returns their paths.
std::vector<std::filesystem::path> generate_instances(std::size_t n, std::size_t count, std::uint64_t seed,
                                                      const std::filesystem::path& out_dir);

}  // namespace hmtsp
