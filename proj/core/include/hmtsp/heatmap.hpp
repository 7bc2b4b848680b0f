#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmtsp/instance.hpp"

namespace hmtsp {

inline constexpr double kDefaultPruneEpsilon = 1e-4;
inline constexpr std::size_t kDefaultKappa = 10;

struct HeatEntry {
  Vertex i = 0;  // i < j
  Vertex j = 0;
  double p = 0.0;

  friend bool operator==(const HeatEntry&, const HeatEntry&) = default;
};

// Sparse symmetric edge-probability matrix. Each undirected edge is stored
// once (i < j) and mirrored into a per-vertex adjacency sorted by neighbor
// index. Missing entries read as probability 0.
class HeatMap {
public:
  HeatMap() = default;

  // Entries may come in either orientation and repeat; repeats combine by max.
  // Throws std::invalid_argument on self loops, out-of-range indices or
  // probabilities outside [0,1].
  HeatMap(std::size_t n, std::vector<HeatEntry> entries);

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return entries_.size(); }
  const std::vector<HeatEntry>& entries() const { return entries_; }

  double at(Vertex a, Vertex b) const;
  bool contains(Vertex a, Vertex b) const { return slot(a, b).has_value(); }

  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_.data() + offsets_[v], degree(v)};
  }
  std::span<const double> probabilities(Vertex v) const {
    return {adj_p_.data() + offsets_[v], degree(v)};
  }

  // Directed adjacency slots: slot_begin(v) + k addresses the k-th neighbor of v.
  std::size_t slot_count() const { return adj_.size(); }
  std::size_t slot_begin(Vertex v) const { return offsets_[v]; }
  std::optional<std::size_t> slot(Vertex a, Vertex b) const;
  Vertex slot_target(std::size_t s) const { return adj_[s]; }

  friend bool operator==(const HeatMap& a, const HeatMap& b) {
    return a.n_ == b.n_ && a.entries_ == b.entries_;
  }

private:
  std::size_t n_ = 0;
  std::vector<HeatEntry> entries_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adj_;
  std::vector<double> adj_p_;
};

// Source of sub heat maps for unit-square instances of a fixed size.
class HeatMapProvider {
public:
  virtual ~HeatMapProvider() = default;
  virtual HeatMap predict(const Instance& inst) const = 0;
  virtual std::string name() const = 0;
};

// The r-th nearest neighbor (r = 1..kappa) of every vertex contributes 2^-r to
// that edge; the stored value is the larger of the two directions.
HeatMap surrogate_heatmap(const Instance& inst, std::size_t kappa = kDefaultKappa);

// Flat map: every kappa-nearest-neighbor edge gets the same value.
HeatMap uniform_heatmap(const Instance& inst, std::size_t kappa = kDefaultKappa, double value = 0.5);

// Every pair at the same probability; used for exhaustive local search.
HeatMap complete_heatmap(std::size_t n, double value = 1.0);

class SurrogateProvider final : public HeatMapProvider {
public:
  explicit SurrogateProvider(std::size_t kappa = kDefaultKappa) : kappa_(kappa) {}
  HeatMap predict(const Instance& inst) const override { return surrogate_heatmap(inst, kappa_); }
  std::string name() const override { return "surrogate"; }

private:
  std::size_t kappa_;
};

class UniformProvider final : public HeatMapProvider {
public:
  explicit UniformProvider(std::size_t kappa = kDefaultKappa) : kappa_(kappa) {}
  HeatMap predict(const Instance& inst) const override { return uniform_heatmap(inst, kappa_); }
  std::string name() const override { return "uniform"; }

private:
  std::size_t kappa_;
};

// Drops entries with p < epsilon, then tops every vertex back up to two
// incident edges using its nearest neighbors at probability epsilon.
HeatMap prune_unpromising(const HeatMap& hm, const Instance& inst, double epsilon = kDefaultPruneEpsilon);

// File format: "n <count>" then one "<i> <j> <p>" line per edge.
HeatMap parse_heatmap(std::istream& in, std::size_t n);
HeatMap load_heatmap(const std::filesystem::path& path, std::size_t n);
void write_heatmap(std::ostream& out, const HeatMap& hm);
void write_heatmap(const std::filesystem::path& path, const HeatMap& hm);

}  // namespace hmtsp
