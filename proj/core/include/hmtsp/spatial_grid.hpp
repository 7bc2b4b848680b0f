#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hmtsp/instance.hpp"

namespace hmtsp {

// Uniform bucket grid over a point set for exact k-nearest-neighbor queries.
// Results are ordered by (distance, index), so equal distances resolve to the
// lowest index.
class SpatialGrid {
public:
  explicit SpatialGrid(std::span<const Point> points, double points_per_cell = 2.0);

  std::size_t size() const { return points_.size(); }

  // k nearest vertices to `query`, excluding `query` itself.
  std::vector<Vertex> nearest(Vertex query, std::size_t k) const;

  // k nearest vertices to an arbitrary location, optionally skipping one index.
  std::vector<Vertex> nearest_to(const Point& p, std::size_t k, std::optional<Vertex> skip = {}) const;

private:
  std::size_t cell_of(double v, double origin, std::size_t dim) const;

  std::vector<Point> points_;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double cell_ = 1.0;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  std::vector<std::size_t> cell_start_;  // CSR over cells
  std::vector<Vertex> cell_items_;
};

// Reference O(n log n) scan with the same ordering rule; used for small inputs
// and as a cross-check.
std::vector<Vertex> brute_force_nearest(std::span<const Point> points, const Point& p, std::size_t k,
                                        std::optional<Vertex> skip = {});

}  // namespace hmtsp
