#include "hmtsp/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hmtsp/sampling.hpp"

namespace hmtsp {

void Params::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(h_factor >= 1.0)) throw std::invalid_argument("h_factor must be >= 1");
  if (!(t_factor > 0.0)) throw std::invalid_argument("t_factor must be > 0");
  if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(w_candidate_min >= 0.0)) throw std::invalid_argument("w_candidate_min must be >= 0");
}

std::size_t Params::pool_bound(std::size_t n) const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(h_factor * static_cast<double>(n))));
}

SearchState::SearchState(const Instance& inst, const HeatMap& hm, const Params& params)
    : inst_(&inst), hm_(&hm), params_(params) {
  params_.validate();
  const std::size_t n = inst.size();
  if (hm.size() != n) throw std::invalid_argument("SearchState: heat map size does not match instance");

  const std::size_t slots = hm.slot_count();
  w_.resize(slots);
  q_.assign(slots, 0);
  mirror_.resize(slots);
  w_sum_.assign(n, 0.0);
  near_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto vv = static_cast<Vertex>(v);
    const auto nbrs = hm.neighbors(vv);
    const auto probs = hm.probabilities(vv);
    near_[v].reserve(nbrs.size());
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const std::size_t s = hm.slot_begin(vv) + k;
      w_[s] = 100.0 * probs[k];
      w_sum_[v] += w_[s];
      mirror_[s] = *hm.slot(nbrs[k], vv);
      near_[v].emplace_back(inst.dist(vv, nbrs[k]), nbrs[k]);
    }
    std::sort(near_[v].begin(), near_[v].end());
  }
}

void SearchState::set_tour(std::span<const Vertex> order) {
  tour_.assign(order);
  length_ = tour_length(*inst_, order);
}

double SearchState::weight(Vertex a, Vertex b) const {
  const auto s = hm_->slot(a, b);
  return s ? w_[*s] : 0.0;
}

double SearchState::mean_weight(Vertex b) const {
  const std::size_t deg = hm_->degree(b);
  if (deg == 0) {
    throw std::logic_error("vertex " + std::to_string(b) + " has no promising edges");
  }
  return w_sum_[static_cast<std::size_t>(b)] / static_cast<double>(deg);
}

std::uint64_t SearchState::access(Vertex a, Vertex b) const {
  if (const auto s = hm_->slot(a, b)) return q_[*s];
  const auto it = q_extra_.find(edge_key(a, b));
  return it == q_extra_.end() ? 0 : it->second;
}

std::uint64_t SearchState::total_access() const {
  std::uint64_t total = 0;
  for (auto q : q_) total += q;
  total /= 2;
  for (const auto& [key, q] : q_extra_) total += q;
  return total;
}

bool SearchState::weights_symmetric() const {
  for (std::size_t s = 0; s < w_.size(); ++s) {
    if (w_[s] != w_[mirror_[s]] || q_[s] != q_[mirror_[s]]) return false;
  }
  return true;
}

void SearchState::record_examined(const Action& action) {
  ++m_;
  for (std::size_t i = 0; i < action.k(); ++i) {
    const Vertex b = action.b[i];
    const Vertex a = action.next_a(i);
    if (const auto s = hm_->slot(b, a)) {
      ++q_[*s];
      ++q_[mirror_[*s]];
    } else {
      ++q_extra_[edge_key(a, b)];
    }
  }
}

void SearchState::reinforce(const Action& action, double increment) {
  for (std::size_t i = 0; i < action.k(); ++i) {
    const Vertex b = action.b[i];
    const Vertex a = action.next_a(i);
    const auto s = hm_->slot(b, a);
    if (!s) continue;
    w_[*s] += increment;
    w_[mirror_[*s]] += increment;
    w_sum_[static_cast<std::size_t>(b)] += increment;
    w_sum_[static_cast<std::size_t>(a)] += increment;
  }
}

void SearchState::count_applied() {
  ++applied_;
  if (applied_ % 10000 == 0) length_ = tour_.length(*inst_);
}

void SearchState::apply_2opt(Vertex x, Vertex y, double delta) {
  tour_.apply_2opt(x, y);
  length_ += delta;
  count_applied();
}

void SearchState::apply(const Action& action) {
  apply_action(tour_, action);
  length_ += action.delta;
  count_applied();
}

}  // namespace hmtsp
