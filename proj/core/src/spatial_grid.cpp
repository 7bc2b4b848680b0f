#include "hmtsp/spatial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

namespace hmtsp {

namespace {

using Ranked = std::pair<double, Vertex>;  // (squared distance, index); lexicographic

}  // namespace

SpatialGrid::SpatialGrid(std::span<const Point> points, double points_per_cell)
    : points_(points.begin(), points.end()) {
  if (points_.empty()) return;
  double x1 = points_[0].x, y1 = points_[0].y;
  x0_ = x1;
  y0_ = y1;
  for (const auto& p : points_) {
    x0_ = std::min(x0_, p.x);
    y0_ = std::min(y0_, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const double extent = std::max(x1 - x0_, y1 - y0_);
  const double cells_per_side =
      std::max(1.0, std::floor(std::sqrt(static_cast<double>(points_.size()) / points_per_cell)));
  cell_ = extent > 0.0 ? extent / cells_per_side : 1.0;
  nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor((x1 - x0_) / cell_)) + 1);
  ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor((y1 - y0_) / cell_)) + 1);

  std::vector<std::size_t> cell_id(points_.size());
  cell_start_.assign(nx_ * ny_ + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const std::size_t c = cell_of(points_[i].y, y0_, ny_) * nx_ + cell_of(points_[i].x, x0_, nx_);
    cell_id[i] = c;
    ++cell_start_[c + 1];
  }
  for (std::size_t c = 0; c < nx_ * ny_; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_items_.resize(points_.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    cell_items_[fill[cell_id[i]]++] = static_cast<Vertex>(i);
  }
}

std::size_t SpatialGrid::cell_of(double v, double origin, std::size_t dim) const {
  const double f = std::floor((v - origin) / cell_);
  if (f <= 0.0) return 0;
  return std::min(dim - 1, static_cast<std::size_t>(f));
}

std::vector<Vertex> SpatialGrid::nearest(Vertex query, std::size_t k) const {
  return nearest_to(points_[static_cast<std::size_t>(query)], k, query);
}

std::vector<Vertex> SpatialGrid::nearest_to(const Point& p, std::size_t k, std::optional<Vertex> skip) const {
  const std::size_t available = points_.size() - (skip ? 1 : 0);
  k = std::min(k, available);
  std::vector<Vertex> out;
  if (k == 0) return out;

  std::priority_queue<Ranked> heap;  // max-heap keeps the k best seen
  const auto cx = static_cast<std::ptrdiff_t>(cell_of(p.x, x0_, nx_));
  const auto cy = static_cast<std::ptrdiff_t>(cell_of(p.y, y0_, ny_));
  const auto nx = static_cast<std::ptrdiff_t>(nx_);
  const auto ny = static_cast<std::ptrdiff_t>(ny_);

  auto visit_cell = [&](std::ptrdiff_t gx, std::ptrdiff_t gy) {
    if (gx < 0 || gy < 0 || gx >= nx || gy >= ny) return;
    const auto c = static_cast<std::size_t>(gy * nx + gx);
    for (std::size_t i = cell_start_[c]; i < cell_start_[c + 1]; ++i) {
      const Vertex v = cell_items_[i];
      if (skip && v == *skip) continue;
      Ranked r{squared_distance(p, points_[static_cast<std::size_t>(v)]), v};
      if (heap.size() < k) {
        heap.push(r);
      } else if (r < heap.top()) {
        heap.pop();
        heap.push(r);
      }
    }
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t r = 0;; ++r) {
    if (r == 0) {
      visit_cell(cx, cy);
    } else {
      for (std::ptrdiff_t gx = cx - r; gx <= cx + r; ++gx) {
        visit_cell(gx, cy - r);
        visit_cell(gx, cy + r);
      }
      for (std::ptrdiff_t gy = cy - r + 1; gy <= cy + r - 1; ++gy) {
        visit_cell(cx - r, gy);
        visit_cell(cx + r, gy);
      }
    }
    const bool covers_all = cx - r <= 0 && cy - r <= 0 && cx + r >= nx - 1 && cy + r >= ny - 1;
    if (covers_all) break;
    if (heap.size() == k) {
      // Anything outside the visited block is at least this far away.
      double margin = kInf;
      if (cx - r > 0) margin = std::min(margin, p.x - (x0_ + static_cast<double>(cx - r) * cell_));
      if (cx + r < nx - 1) margin = std::min(margin, x0_ + static_cast<double>(cx + r + 1) * cell_ - p.x);
      if (cy - r > 0) margin = std::min(margin, p.y - (y0_ + static_cast<double>(cy - r) * cell_));
      if (cy + r < ny - 1) margin = std::min(margin, y0_ + static_cast<double>(cy + r + 1) * cell_ - p.y);
      margin -= 1e-12;
      if (margin > 0.0 && margin * margin > heap.top().first) break;
    }
  }

  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

std::vector<Vertex> brute_force_nearest(std::span<const Point> points, const Point& p, std::size_t k,
                                        std::optional<Vertex> skip) {
  std::vector<Ranked> all;
  all.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (skip && static_cast<Vertex>(i) == *skip) continue;
    all.emplace_back(squared_distance(p, points[i]), static_cast<Vertex>(i));
  }
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  std::vector<Vertex> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = all[i].second;
  return out;
}

}  // namespace hmtsp
