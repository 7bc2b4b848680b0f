#include "hmtsp/tour_array.hpp"

#include <stdexcept>
#include <utility>

namespace hmtsp {

void TourArray::assign(std::span<const Vertex> order) {
  if (!is_permutation_tour(order, order.size())) {
    throw std::invalid_argument("TourArray: order is not a permutation");
  }
  order_.assign(order.begin(), order.end());
  pos_.resize(order_.size());
  for (std::size_t p = 0; p < order_.size(); ++p) pos_[static_cast<std::size_t>(order_[p])] = p;
}

void TourArray::reverse_positions(std::size_t from, std::size_t to) {
  const std::size_t n = order_.size();
  std::size_t len = (to + n - from) % n + 1;
  std::size_t i = from;
  std::size_t j = to;
  for (std::size_t s = 0; s < len / 2; ++s) {
    std::swap(order_[i], order_[j]);
    pos_[static_cast<std::size_t>(order_[i])] = i;
    pos_[static_cast<std::size_t>(order_[j])] = j;
    i = i + 1 == n ? 0 : i + 1;
    j = j == 0 ? n - 1 : j - 1;
  }
}

void TourArray::apply_2opt(Vertex x, Vertex y) {
  const std::size_t n = order_.size();
  const std::size_t from = (pos(x) + 1) % n;  // succ x
  const std::size_t to = pos(y);
  const std::size_t len = (to + n - from) % n + 1;
  if (2 * len <= n) {
    reverse_positions(from, to);
  } else {
    // complement: succ y .. x
    reverse_positions((to + 1) % n, pos(x));
  }
}

bool TourArray::is_consistent() const {
  const std::size_t n = order_.size();
  if (pos_.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    const auto v = static_cast<std::size_t>(order_[p]);
    if (v >= n || seen[v] || pos_[v] != p) return false;
    seen[v] = true;
  }
  // walking successors from any vertex must return after exactly n steps
  if (n == 0) return true;
  Vertex v = order_[0];
  for (std::size_t s = 1; s < n; ++s) {
    v = succ(v);
    if (v == order_[0]) return false;
  }
  return succ(v) == order_[0];
}

double TourArray::length(const Instance& inst) const { return tour_length(inst, order_); }

}  // namespace hmtsp
