#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hmtsp/instance.hpp"

namespace hmtsp {

// Cyclic tour stored as an order array plus its inverse, giving O(1)
// successor / predecessor queries and in-place segment reversal.
class TourArray {
public:
  TourArray() = default;
  explicit TourArray(std::span<const Vertex> order) { assign(order); }

  void assign(std::span<const Vertex> order);

  std::size_t size() const { return order_.size(); }
  const std::vector<Vertex>& order() const { return order_; }
  std::size_t pos(Vertex v) const { return pos_[static_cast<std::size_t>(v)]; }
  Vertex at(std::size_t p) const { return order_[p]; }

  Vertex succ(Vertex v) const {
    const std::size_t p = pos(v) + 1;
    return order_[p == order_.size() ? 0 : p];
  }
  Vertex pred(Vertex v) const {
    const std::size_t p = pos(v);
    return order_[p == 0 ? order_.size() - 1 : p - 1];
  }
  bool adjacent(Vertex a, Vertex b) const { return succ(a) == b || pred(a) == b; }

  // Removes (x, succ x) and (y, succ y), adds (x, y) and (succ x, succ y).
  // Reverses whichever side of the cycle is shorter.
  void apply_2opt(Vertex x, Vertex y);

  // Full traversal: true iff order/pos describe a single n-cycle.
  bool is_consistent() const;

  double length(const Instance& inst) const;

private:
  void reverse_positions(std::size_t from, std::size_t to);

  std::vector<Vertex> order_;
  std::vector<std::size_t> pos_;
};

}  // namespace hmtsp
