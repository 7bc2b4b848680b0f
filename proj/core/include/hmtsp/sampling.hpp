#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hmtsp/heatmap.hpp"
#include "hmtsp/instance.hpp"
#include "hmtsp/rng.hpp"
#include "hmtsp/spatial_grid.hpp"

namespace hmtsp {

inline std::uint64_t edge_key(Vertex a, Vertex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

inline std::pair<Vertex, Vertex> edge_from_key(std::uint64_t key) {
  return {static_cast<Vertex>(key >> 32), static_cast<Vertex>(key & 0xffffffffu)};
}

// How often each vertex and each vertex pair has appeared in an extracted sub-graph.
class CoverageCounters {
public:
  explicit CoverageCounters(std::size_t n = 0) : vertex_(n, 0) {}

  std::size_t size() const { return vertex_.size(); }
  std::uint32_t vertex_count(Vertex v) const { return vertex_[static_cast<std::size_t>(v)]; }
  std::uint32_t edge_count(Vertex a, Vertex b) const;
  std::uint32_t min_vertex_count() const;
  const std::vector<std::uint32_t>& vertex_counts() const { return vertex_; }
  const std::unordered_map<std::uint64_t, std::uint32_t>& edge_counts() const { return edge_; }

  // Every member and every member pair is counted once per call.
  void add_sample(std::span<const Vertex> members, std::uint32_t times = 1);

private:
  std::vector<std::uint32_t> vertex_;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_;
};

// Similarity transform taking a sample's bounding box into the unit square:
// unit = scale * (orig - min). Stored as a Normalization on converted instances.
struct SubGraphSample {
  Vertex center = 0;
  std::vector<Vertex> members;  // members[0] == center, the rest by distance
  Normalization conversion;
};

class DegenerateSampleError : public InstanceError {
public:
  using InstanceError::InstanceError;
};

std::size_t default_sample_size(std::size_t n);

// Center plus its m-1 nearest vertices (ties by lowest index). No counters
// are touched; throws DegenerateSampleError if all members coincide.
SubGraphSample sample_around(const Instance& inst, const SpatialGrid& grid, Vertex center, std::size_t m);

// Picks a least-covered center (uniformly among ties), extracts its
// neighborhood and updates the counters. Coincident neighborhoods are skipped
// in favor of another least-covered center.
SubGraphSample extract_subgraph(const Instance& inst, const SpatialGrid& grid, CoverageCounters& counters,
                                std::size_t m, Rng& rng);

// Member coordinates mapped into [0,1]^2; vertex l of the result is members[l].
Instance convert_subgraph(const Instance& inst, const SubGraphSample& sample);

// Sum over samples of sub-map probabilities, keyed by original vertex pair.
class AccumulatedMap {
public:
  void add(std::span<const Vertex> members, const HeatMap& submap, std::uint32_t times = 1);
  const std::unordered_map<std::uint64_t, double>& sums() const { return sums_; }

private:
  std::unordered_map<std::uint64_t, double> sums_;
};

// P_ij = sums(i,j) / O_ij for every covered edge; nothing is pruned.
HeatMap average_submaps(const AccumulatedMap& acc, const CoverageCounters& counters);

// average_submaps followed by prune_unpromising.
HeatMap merge_submaps(const Instance& inst, const AccumulatedMap& acc, const CoverageCounters& counters,
                      double epsilon = kDefaultPruneEpsilon);

struct SampleRecord {
  SubGraphSample sample;
  HeatMap submap;  // over local indices 0..m-1
};

struct PipelineOptions {
  std::size_t m = 0;  // 0 picks default_sample_size(n)
  std::uint32_t omega = 5;
  double epsilon = kDefaultPruneEpsilon;
  // Called once per accepted sample, in extraction order.
  std::function<void(const SampleRecord&)> on_sample;
};

struct PipelineResult {
  HeatMap heatmap;
  CoverageCounters counters;
  std::size_t samples = 0;
  std::size_t provider_calls = 0;
};

PipelineResult build_global_heatmap(const Instance& inst, const HeatMapProvider& provider,
                                    const PipelineOptions& options, Rng& rng);

// Rebuilds counters and sums from previously produced samples (for example
// sub-maps computed out of process) and merges them.
PipelineResult merge_sample_records(const Instance& inst, std::span<const SampleRecord> records,
                                    double epsilon = kDefaultPruneEpsilon);

// Directory layout: sub_<l>.members, sub_<l>.tsp (converted), sub_<l>.heat.
void write_sample_record(const std::filesystem::path& dir, std::size_t index, const Instance& inst,
                         const SampleRecord& record);
std::vector<SampleRecord> read_sample_records(const std::filesystem::path& dir, const Instance& inst);

}  // namespace hmtsp
