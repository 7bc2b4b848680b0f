#include "hmtsp/instance.hpp"

#include <algorithm>
#include <limits>

namespace hmtsp {

Instance::Instance(std::vector<Point> coords, Normalization norm)
    : coords_(std::move(coords)), norm_(norm) {}

Instance generate_instance(std::size_t n, Rng& rng) {
  if (n < 3) {
    throw InstanceError("generate_instance: n must be at least 3, got " + std::to_string(n));
  }
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = rng.uniform01();
    p.y = rng.uniform01();
  }
  return Instance(std::move(pts));
}

bool is_permutation_tour(std::span<const Vertex> tour, std::size_t n) {
  if (tour.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (Vertex v : tour) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]) {
      return false;
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

void check_tour(const Instance& inst, std::span<const Vertex> tour) {
  if (!is_permutation_tour(tour, inst.size())) {
    throw InstanceError("tour is not a permutation of 0.." + std::to_string(inst.size()) + "-1");
  }
}

double tour_length(const Instance& inst, std::span<const Vertex> tour) {
  check_tour(inst, tour);
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < tour.size(); ++i) {
    len += inst.dist(tour[i], tour[i + 1]);
  }
  if (!tour.empty()) len += inst.dist(tour.back(), tour.front());
  return len;
}

namespace {

struct BruteForce {
  std::size_t n;
  std::vector<double> d;  // dense, n <= 12
  std::vector<Vertex> cur;
  std::vector<bool> used;
  Tour best;
  double best_len = std::numeric_limits<double>::infinity();

  double at(Vertex a, Vertex b) const { return d[static_cast<std::size_t>(a) * n + b]; }

  // Vertices are tried in ascending order, so complete tours are reached in
  // lexicographic order and a strict improvement test keeps the smallest order.
  void extend(double partial) {
    if (partial > best_len) return;
    const std::size_t depth = cur.size();
    if (depth == n) {
      // one direction per cycle: second vertex smaller than the last
      if (cur[1] > cur[n - 1]) return;
      const double len = partial + at(cur[n - 1], cur[0]);
      if (len < best_len) {
        best_len = len;
        best = cur;
      }
      return;
    }
    for (std::size_t v = 1; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      cur.push_back(static_cast<Vertex>(v));
      extend(partial + at(cur[depth - 1], static_cast<Vertex>(v)));
      cur.pop_back();
      used[v] = false;
    }
  }
};

}  // namespace

SolvedTour brute_force_optimum(const Instance& inst) {
  const std::size_t n = inst.size();
  if (n > kBruteForceMaxN) {
    throw InstanceError("brute_force_optimum: n=" + std::to_string(n) + " exceeds limit " +
                        std::to_string(kBruteForceMaxN));
  }
  if (n < 3) throw InstanceError("brute_force_optimum: n must be at least 3");

  BruteForce bf{n, std::vector<double>(n * n), {}, std::vector<bool>(n, false), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      bf.d[i * n + j] = inst.dist(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  }
  bf.cur.reserve(n);
  bf.cur.push_back(0);
  bf.used[0] = true;
  bf.extend(0.0);
  return {bf.best, bf.best_len};
}

Tour greedy_nearest_neighbor(const Instance& inst, Vertex start) {
  const std::size_t n = inst.size();
  if (start < 0 || static_cast<std::size_t>(start) >= n) {
    throw InstanceError("greedy_nearest_neighbor: start vertex out of range");
  }
  Tour tour;
  tour.reserve(n);
  // unvisited kept in ascending index order so the first strict minimum is the lowest index
  std::vector<Vertex> unvisited;
  unvisited.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (static_cast<Vertex>(v) != start) unvisited.push_back(static_cast<Vertex>(v));
  }
  Vertex cur = start;
  tour.push_back(cur);
  while (!unvisited.empty()) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const Point& p = inst[cur];
    for (std::size_t i = 0; i < unvisited.size(); ++i) {
      const double d2 = squared_distance(p, inst[unvisited[i]]);
      if (d2 < best_d) {
        best_d = d2;
        best = i;
      }
    }
    cur = unvisited[best];
    unvisited.erase(unvisited.begin() + static_cast<std::ptrdiff_t>(best));
    tour.push_back(cur);
  }
  return tour;
}

}  // namespace hmtsp
