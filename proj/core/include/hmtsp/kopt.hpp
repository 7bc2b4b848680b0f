#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hmtsp/instance.hpp"
#include "hmtsp/tour_array.hpp"

namespace hmtsp {

// Compact k-opt move (a_1, b_1, ..., a_k, b_k, a_1): removes (a_i, b_i) and
// adds (b_i, a_{i+1}) with a_{k+1} = a_1.
struct Action {
  std::vector<Vertex> a;
  std::vector<Vertex> b;
  double delta = 0.0;  // L(new) - L(old)

  std::size_t k() const { return a.size(); }
  Vertex next_a(std::size_t i) const { return a[(i + 1) % a.size()]; }
  // Flat (a_1, b_1, ..., a_k, b_k, a_1).
  std::vector<Vertex> sequence() const;
};

// Sum of added edge lengths minus removed edge lengths.
double action_delta(const Instance& inst, const Action& action);

// Hamiltonian path built up while an action is being decided. It starts as
// the tour with (a_1, succ a_1) removed and always has a_1 at its head.
// The path is kept as a short list of oriented runs of tour positions, so
// each step costs O(k) regardless of n.
class KOptPath {
public:
  KOptPath() = default;
  KOptPath(const TourArray& tour, Vertex a1) { reset(tour, a1); }

  void reset(const TourArray& tour, Vertex a1);

  Vertex head() const { return head_; }  // a_1
  Vertex tail() const;                    // current b_i
  Vertex tail_neighbor() const;           // the vertex joined to the tail on the path

  // The b that would follow a = j: the path-neighbor of j on the side facing
  // the tail. nullopt when j is the tail.
  std::optional<Vertex> next_toward_tail(Vertex j) const;

  // Adds (tail, j), removes (j, next_toward_tail(j)); returns the new tail.
  // j must be an interior vertex other than the tail's neighbor.
  Vertex extend(Vertex j);

  // Vertex order of the closed cycle head -> ... -> tail -> head.
  std::vector<Vertex> cycle() const;

  std::size_t run_count() const { return runs_.size(); }

private:
  struct Run {
    std::size_t first;
    std::size_t last;
    bool forward;
  };

  std::size_t run_length(const Run& r) const;
  std::size_t run_pos(const Run& r, std::size_t offset) const;
  // (run index, offset) holding vertex v
  std::pair<std::size_t, std::size_t> locate(Vertex v) const;

  const TourArray* tour_ = nullptr;
  Vertex head_ = 0;
  std::vector<Run> runs_;
  std::vector<Run> scratch_;
};

// Determines b_i for every a_i against `tour`, checks the result is a valid
// compact action, and fills in b and delta. Throws std::invalid_argument.
Action complete_action(const Instance& inst, const TourArray& tour, std::vector<Vertex> a);

// Applies a previously completed action. Throws std::invalid_argument when the
// (a, b) pairs do not match `tour`.
void apply_action(TourArray& tour, const Action& action);

}  // namespace hmtsp
