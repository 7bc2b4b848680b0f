#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmtsp/rng.hpp"

namespace hmtsp {

using Vertex = std::int32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Maps loaded coordinates into the unit square: unit = scale * (orig - offset).
// Lengths measured on the normalized instance are divided by scale to get
// back to input units.
struct Normalization {
  double scale = 1.0;
  double x_offset = 0.0;
  double y_offset = 0.0;

  bool is_identity() const { return scale == 1.0 && x_offset == 0.0 && y_offset == 0.0; }
  double to_original_length(double unit_length) const { return unit_length / scale; }

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

class InstanceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Euclidean TSP instance. Distances are computed on demand, never stored.
class Instance {
public:
  Instance() = default;
  explicit Instance(std::vector<Point> coords, Normalization norm = {});

  std::size_t size() const { return coords_.size(); }
  const std::vector<Point>& coords() const { return coords_; }
  const Point& operator[](Vertex v) const { return coords_[static_cast<std::size_t>(v)]; }
  const Normalization& normalization() const { return norm_; }

  double dist(Vertex a, Vertex b) const { return distance((*this)[a], (*this)[b]); }

  friend bool operator==(const Instance&, const Instance&) = default;

private:
  std::vector<Point> coords_;
  Normalization norm_;
};

using Tour = std::vector<Vertex>;

// n >= 3 points drawn uniformly from the unit square.
Instance generate_instance(std::size_t n, Rng& rng);

bool is_permutation_tour(std::span<const Vertex> tour, std::size_t n);
void check_tour(const Instance& inst, std::span<const Vertex> tour);

// Closed-cycle length; throws InstanceError when tour is not a permutation.
double tour_length(const Instance& inst, std::span<const Vertex> tour);

struct SolvedTour {
  Tour tour;
  double length = 0.0;
};

inline constexpr std::size_t kBruteForceMaxN = 12;

// Exact optimum by enumeration with vertex 0 fixed first and one direction per
// cycle. Among equal-length tours the lexicographically smallest order wins.
SolvedTour brute_force_optimum(const Instance& inst);

// Nearest-unvisited construction; ties go to the lowest index.
Tour greedy_nearest_neighbor(const Instance& inst, Vertex start = 0);

}  // namespace hmtsp
