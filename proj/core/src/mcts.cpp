#include "hmtsp/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmtsp {

Tour init_state(const Instance& inst, const HeatMap& hm, Rng& rng) {
  const std::size_t n = inst.size();
  if (n < 3) throw InstanceError("init_state: n must be at least 3");
  if (hm.size() != n) throw std::invalid_argument("init_state: heat map size does not match instance");

  // unvisited set with O(1) removal and uniform picks
  std::vector<Vertex> unvisited(n);
  std::vector<std::size_t> where(n);
  for (std::size_t v = 0; v < n; ++v) {
    unvisited[v] = static_cast<Vertex>(v);
    where[v] = v;
  }
  auto remove = [&](Vertex v) {
    const std::size_t i = where[static_cast<std::size_t>(v)];
    const Vertex last = unvisited.back();
    unvisited[i] = last;
    where[static_cast<std::size_t>(last)] = i;
    unvisited.pop_back();
    where[static_cast<std::size_t>(v)] = n;
  };
  auto is_unvisited = [&](Vertex v) { return where[static_cast<std::size_t>(v)] != n; };

  Tour tour;
  tour.reserve(n);
  Vertex cur = static_cast<Vertex>(rng.uniform_index(n));
  tour.push_back(cur);
  remove(cur);

  std::vector<Vertex> open_nbrs;
  std::vector<double> open_w;
  while (!unvisited.empty()) {
    if (unvisited.size() == 1) {
      cur = unvisited.front();
    } else {
      // Edges without an entry have P = 0, i.e. weight exp(0) = 1; only the
      // stored neighbors of cur need individual weights.
      open_nbrs.clear();
      open_w.clear();
      double nbr_total = 0.0;
      const auto nbrs = hm.neighbors(cur);
      const auto probs = hm.probabilities(cur);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (!is_unvisited(nbrs[k])) continue;
        open_nbrs.push_back(nbrs[k]);
        open_w.push_back(std::exp(probs[k]));
        nbr_total += open_w.back();
      }
      const std::size_t rest = unvisited.size() - open_nbrs.size();
      const double u = rng.uniform01() * (nbr_total + static_cast<double>(rest));
      if (u < nbr_total || rest == 0) {
        double acc = 0.0;
        Vertex pick = open_nbrs.back();
        for (std::size_t k = 0; k < open_nbrs.size(); ++k) {
          acc += open_w[k];
          if (u < acc) {
            pick = open_nbrs[k];
            break;
          }
        }
        cur = pick;
      } else {
        const Vertex from = cur;
        do {
          cur = unvisited[static_cast<std::size_t>(rng.uniform_index(unvisited.size()))];
        } while (hm.contains(from, cur));
      }
    }
    tour.push_back(cur);
    remove(cur);
  }
  return tour;
}

namespace {

// Work list of vertices to re-examine, FIFO with membership flags so the scan
// order is deterministic.
class VertexQueue {
public:
  explicit VertexQueue(std::size_t n) : queued_(n, false) {}

  void push(Vertex v) {
    if (queued_[static_cast<std::size_t>(v)]) return;
    queued_[static_cast<std::size_t>(v)] = true;
    items_.push_back(v);
  }
  bool empty() const { return head_ == items_.size(); }
  Vertex pop() {
    const Vertex v = items_[head_++];
    queued_[static_cast<std::size_t>(v)] = false;
    if (head_ == items_.size()) {
      items_.clear();
      head_ = 0;
    }
    return v;
  }

private:
  std::vector<bool> queued_;
  std::vector<Vertex> items_;
  std::size_t head_ = 0;
};

// Tries both orientations at a; applies the first improving promising 2-opt
// move and queues the four endpoints it touched.
bool improve_at(SearchState& state, Vertex a, VertexQueue& queue) {
  const Instance& inst = state.instance();
  const HeatMap& hm = state.heatmap();
  const TourArray& t = state.tour();
  const double tol = kImproveTolerance * state.length();
  for (int orientation = 0; orientation < 2; ++orientation) {
    const bool fwd = orientation == 0;
    const Vertex b1 = fwd ? t.succ(a) : t.pred(a);
    const Vertex b1_next = fwd ? t.succ(b1) : t.pred(b1);
    const double d1 = inst.dist(a, b1);
    for (const auto& [d_add, a2] : state.near(b1)) {
      if (d_add >= d1) break;
      if (a2 == a || a2 == b1_next) continue;
      const Vertex b2 = fwd ? t.pred(a2) : t.succ(a2);
      const double delta = d_add + inst.dist(b2, a) - d1 - inst.dist(a2, b2);
      if (delta >= -tol || !hm.contains(b2, a)) continue;
      if (fwd) {
        state.apply_2opt(a, b2, delta);
      } else {
        state.apply_2opt(b1, a2, delta);
      }
      for (Vertex v : {a, b1, a2, b2}) queue.push(v);
      return true;
    }
  }
  return false;
}

std::size_t drain(SearchState& state, VertexQueue& queue, const std::function<bool()>& stop, bool& stopped) {
  std::size_t moves = 0;
  std::size_t polls = 0;
  while (!queue.empty()) {
    if (stop && (++polls & 1023) == 0 && stop()) {
      stopped = true;
      break;
    }
    const Vertex v = queue.pop();
    if (improve_at(state, v, queue)) {
      ++moves;
      queue.push(v);
    }
  }
  return moves;
}

}  // namespace

std::size_t enumerate_2opt(SearchState& state, const std::function<bool()>& stop) {
  const std::size_t n = state.instance().size();
  VertexQueue queue(n);
  std::size_t moves = 0;
  bool stopped = false;
  // Segment reversals can turn an untouched pair of edges into an improving
  // move, so the queue alone is not exact; finish with full passes until one
  // finds nothing.
  for (;;) {
    for (std::size_t v = 0; v < n; ++v) queue.push(static_cast<Vertex>(v));
    const std::size_t found = drain(state, queue, stop, stopped);
    moves += found;
    if (found == 0 || stopped) break;
  }
  return moves;
}

std::size_t enumerate_2opt_around(SearchState& state, std::span<const Vertex> seeds,
                                  const std::function<bool()>& stop) {
  VertexQueue queue(state.instance().size());
  for (Vertex v : seeds) queue.push(v);
  bool stopped = false;
  return drain(state, queue, stop, stopped);
}

namespace {

double potential_at_slot(const SearchState& state, std::size_t slot, double omega, double log_m1, double alpha) {
  const double exploit = omega > 0.0 ? state.weight_slot(slot) / omega : 1.0;
  const double explore = std::sqrt(log_m1 / (static_cast<double>(state.access_slot(slot)) + 1.0));
  return exploit + alpha * explore;
}

}  // namespace

double edge_potential(const SearchState& state, Vertex b, Vertex j, double alpha) {
  const auto s = state.heatmap().slot(b, j);
  if (!s) throw std::logic_error("edge_potential: edge is not promising");
  return potential_at_slot(state, *s, state.mean_weight(b), std::log(static_cast<double>(state.examined()) + 1.0),
                           alpha);
}

std::size_t roulette(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return static_cast<std::size_t>(rng.uniform_index(weights.size()));
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // rounding left u at the very top; return the last positive weight
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

namespace {

bool same_edge(std::pair<Vertex, Vertex> e, Vertex a, Vertex b) {
  return (e.first == a && e.second == b) || (e.first == b && e.second == a);
}

bool contains_edge(const std::vector<std::pair<Vertex, Vertex>>& edges, Vertex a, Vertex b) {
  return std::any_of(edges.begin(), edges.end(), [&](const auto& e) { return same_edge(e, a, b); });
}

}  // namespace

std::optional<Action> sample_action(SearchState& state, Rng& rng) {
  const Instance& inst = state.instance();
  const HeatMap& hm = state.heatmap();
  const Params& p = state.params();
  const std::size_t n = inst.size();
  const double tol = kImproveTolerance * state.length();
  const double log_m1 = std::log(static_cast<double>(state.examined()) + 1.0);
  KOptPath& path = state.scratch().path;

  auto& scratch = state.scratch();
  auto& removed = scratch.removed;
  auto& added = scratch.added;
  auto& cand = scratch.cand;
  auto& cand_b = scratch.cand_b;
  auto& cand_z = scratch.cand_z;

  for (std::size_t attempt = 0; attempt < n; ++attempt) {
    Action act;
    const Vertex a1 = static_cast<Vertex>(rng.uniform_index(n));
    path.reset(state.tour(), a1);
    const Vertex b1 = path.tail();
    act.a.push_back(a1);
    act.b.push_back(b1);
    removed.assign(1, {a1, b1});
    added.clear();
    double partial = -inst.dist(a1, b1);

    bool abandoned = false;
    for (;;) {
      const std::size_t i = act.k();
      const Vertex b = path.tail();
      if (i >= 2) {
        const double close = partial + inst.dist(b, a1);
        if (close < -tol || i >= p.k_max) break;
      }

      // candidate set X for a_{i+1}
      cand.clear();
      cand_b.clear();
      cand_z.clear();
      const Vertex b_nbr = path.tail_neighbor();
      const auto nbrs = hm.neighbors(b);
      const std::size_t base = hm.slot_begin(b);
      const double omega = state.mean_weight(b);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const Vertex j = nbrs[k];
        if (state.weight_slot(base + k) < p.w_candidate_min) continue;
        if (j == a1 || j == b_nbr) continue;
        if (contains_edge(removed, b, j)) continue;
        const Vertex next_b = *path.next_toward_tail(j);
        // closing (next_b, a1) must not put back the first removed edge
        if (next_b == b1) continue;
        if (contains_edge(added, j, next_b)) continue;
        cand.push_back(j);
        cand_b.push_back(next_b);
        cand_z.push_back(potential_at_slot(state, base + k, omega, log_m1, p.alpha));
      }
      if (cand.empty()) {
        if (i == 1) abandoned = true;
        break;
      }
      const std::size_t pick = roulette(cand_z, rng);
      const Vertex j = cand[pick];
      const Vertex next_b = cand_b[pick];
      partial += inst.dist(b, j) - inst.dist(j, next_b);
      added.emplace_back(b, j);
      removed.emplace_back(j, next_b);
      path.extend(j);
      act.a.push_back(j);
      act.b.push_back(next_b);
    }
    if (abandoned) continue;
    act.delta = partial + inst.dist(act.b.back(), a1);
    return act;
  }
  return std::nullopt;
}

RoundOutcome mcts_round(SearchState& state, Rng& rng, const std::function<bool()>& stop,
                        const RoundObserver* observer) {
  const std::size_t pool = state.params().pool_bound(state.instance().size());
  for (std::size_t t = 0; t < pool; ++t) {
    if (stop && (t & 63) == 0 && stop()) return RoundOutcome::kInterrupted;
    auto act = sample_action(state, rng);
    if (!act) return RoundOutcome::kPoolExhausted;
    state.record_examined(*act);
    if (observer && observer->on_examined) observer->on_examined(*act);
    if (act->delta < -kImproveTolerance * state.length()) {
      const double old_length = state.length();
      state.apply(*act);
      const double new_length = state.length();
      backprop_weights(state, *act, old_length, new_length, state.params().beta);
      if (observer && observer->on_applied) observer->on_applied(*act, old_length, new_length);
      return RoundOutcome::kImproved;
    }
  }
  return RoundOutcome::kPoolExhausted;
}

double weight_increment(double old_length, double new_length, double beta) {
  return beta * (std::exp((old_length - new_length) / old_length) - 1.0);
}

void backprop_weights(SearchState& state, const Action& action, double old_length, double new_length,
                      double beta) {
  if (!(new_length < old_length)) {
    throw std::logic_error("backprop_weights: called without an improvement");
  }
  state.reinforce(action, weight_increment(old_length, new_length, beta));
}

Budget Budget::from_params(const Params& p, std::size_t n) {
  Budget b;
  b.wall = std::chrono::milliseconds(static_cast<long long>(std::llround(p.t_factor * static_cast<double>(n))));
  return b;
}

SolveResult solve(const Instance& inst, const HeatMap& hm, const Params& params, const Budget& budget, Rng& rng,
                  const SolveObserver* observer) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  const Budget eff = (budget.wall || budget.rounds) ? budget : Budget::from_params(params, inst.size());
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - started).count();
  };
  auto wall_expired = [&] {
    return eff.wall && elapsed_ms() >= static_cast<double>(eff.wall->count());
  };
  std::function<bool()> inner_stop;
  if (eff.wall) inner_stop = wall_expired;

  SearchState state(inst, hm, params);
  SolveResult result;
  SolveStats& stats = result.stats;
  double best = std::numeric_limits<double>::infinity();
  auto out_of_budget = [&] { return (eff.rounds && stats.rounds >= *eff.rounds) || wall_expired(); };
  const RoundObserver* round_obs = observer ? &observer->round : nullptr;

  bool best_in_descent = false;
  auto note_length = [&] {
    if (state.length() < best) {
      best = state.length();
      best_in_descent = true;
      stats.time_to_best_ms = elapsed_ms();
      if (observer && observer->on_best) observer->on_best(best);
    }
  };

  for (bool first = true; first || !out_of_budget(); first = false) {
    if (!first) ++stats.restarts;
    state.set_tour(init_state(inst, hm, rng));
    if (first) stats.initial_length = state.length();
    best_in_descent = false;
    note_length();
    stats.two_opt_moves += enumerate_2opt(state, inner_stop);
    note_length();

    std::vector<Vertex> touched;
    RoundObserver descent_obs;
    descent_obs.on_examined = round_obs ? round_obs->on_examined : nullptr;
    descent_obs.on_applied = [&](const Action& act, double old_length, double new_length) {
      touched.assign(act.a.begin(), act.a.end());
      touched.insert(touched.end(), act.b.begin(), act.b.end());
      if (round_obs && round_obs->on_applied) round_obs->on_applied(act, old_length, new_length);
    };
    while (!out_of_budget()) {
      const RoundOutcome outcome = mcts_round(state, rng, inner_stop, &descent_obs);
      ++stats.rounds;
      if (outcome == RoundOutcome::kImproved) {
        ++stats.improvements;
        stats.two_opt_moves += enumerate_2opt_around(state, touched, inner_stop);
        note_length();
        continue;
      }
      // before leaving this state make sure it is an exact 2-opt local optimum
      if (outcome == RoundOutcome::kInterrupted) break;
      const std::size_t late = enumerate_2opt(state, inner_stop);
      stats.two_opt_moves += late;
      note_length();
      if (late == 0) break;
    }
    // the current tour only shrinks within a descent, so its final state is
    // the best of this descent
    if (best_in_descent) {
      state.set_tour(std::vector<Vertex>(state.tour().order()));
      best = std::min(best, state.length());
      result.tour = state.tour().order();
      result.length = state.length();
    }
  }

  stats.actions_examined = state.examined();
  stats.elapsed_ms = elapsed_ms();
  if (observer && observer->on_finish) observer->on_finish(state);
  return result;
}

}  // namespace hmtsp
