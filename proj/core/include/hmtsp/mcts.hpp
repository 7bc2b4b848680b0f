#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hmtsp/heatmap.hpp"
#include "hmtsp/instance.hpp"
#include "hmtsp/kopt.hpp"
#include "hmtsp/rng.hpp"
#include "hmtsp/tour_array.hpp"

namespace hmtsp {

struct Params {
  double alpha = 1.0;             // exploration weight
  double beta = 10.0;             // weight reinforcement rate
  double h_factor = 10.0;         // pool bound H = h_factor * n
  double t_factor = 10.0;         // budget T = t_factor * n milliseconds
  std::size_t k_max = 10;         // sub-decision cap
  double epsilon = kDefaultPruneEpsilon;
  double w_candidate_min = 1.0;   // candidate cutoff on W

  void validate() const;  // throws std::invalid_argument
  std::size_t pool_bound(std::size_t n) const;
};

// Relative tolerance below which a length change counts as an improvement.
inline constexpr double kImproveTolerance = 1e-12;

// Everything the search carries across moves and restarts: the current tour,
// the edge weights W and access counts Q (one slot per directed heat-map edge,
// mirrored on every update), and M, the number of examined actions.
class SearchState {
public:
  SearchState(const Instance& inst, const HeatMap& hm, const Params& params);

  const Instance& instance() const { return *inst_; }
  const HeatMap& heatmap() const { return *hm_; }
  const Params& params() const { return params_; }

  const TourArray& tour() const { return tour_; }
  double length() const { return length_; }
  void set_tour(std::span<const Vertex> order);

  double weight(Vertex a, Vertex b) const;            // 0 for non-promising edges
  double weight_slot(std::size_t slot) const { return w_[slot]; }
  double mean_weight(Vertex b) const;                 // Omega_b over stored edges
  std::uint64_t access(Vertex a, Vertex b) const;     // Q
  std::uint64_t access_slot(std::size_t slot) const { return q_[slot]; }
  std::uint64_t examined() const { return m_; }       // M
  // Sum of Q over undirected edges.
  std::uint64_t total_access() const;
  bool weights_symmetric() const;

  // Back-propagation of counts for one examined action.
  void record_examined(const Action& action);
  // W += increment on every promising added edge of `action`.
  void reinforce(const Action& action, double increment);

  // Tour updates keep the incremental length; every 10^4 moves it is
  // recomputed from scratch.
  void apply_2opt(Vertex x, Vertex y, double delta);
  void apply(const Action& action);
  std::uint64_t applied_moves() const { return applied_; }

  // Promising neighbors of v sorted by (distance, index), for 2-opt scans.
  const std::vector<std::pair<double, Vertex>>& near(Vertex v) const {
    return near_[static_cast<std::size_t>(v)];
  }

  // Reusable buffers for sample_action.
  struct Scratch {
    KOptPath path;
    std::vector<std::pair<Vertex, Vertex>> removed;
    std::vector<std::pair<Vertex, Vertex>> added;
    std::vector<Vertex> cand;
    std::vector<Vertex> cand_b;
    std::vector<double> cand_z;
  };
  Scratch& scratch() { return scratch_; }

private:
  void count_applied();

  const Instance* inst_;
  const HeatMap* hm_;
  Params params_;
  TourArray tour_;
  double length_ = 0.0;
  std::vector<double> w_;
  std::vector<std::uint64_t> q_;
  std::vector<std::size_t> mirror_;
  std::vector<double> w_sum_;
  std::unordered_map<std::uint64_t, std::uint64_t> q_extra_;  // non-promising closing edges
  std::uint64_t m_ = 0;
  std::uint64_t applied_ = 0;
  std::vector<std::vector<std::pair<double, Vertex>>> near_;
  Scratch scratch_;
};

// Random constructive tour: start uniform, then each unvisited j follows the
// current vertex i with probability proportional to exp(P_ij).
Tour init_state(const Instance& inst, const HeatMap& hm, Rng& rng);

// Applies first-found improving promising 2-opt moves until none is left.
// Returns the number of moves applied. `stop` is polled periodically.
std::size_t enumerate_2opt(SearchState& state, const std::function<bool()>& stop = {});

// Same moves, but only vertices in `seeds` (and the endpoints of every move
// applied since) are examined. Used after a k-opt move, where a full pass
// would cost O(n) per improvement.
std::size_t enumerate_2opt_around(SearchState& state, std::span<const Vertex> seeds,
                                  const std::function<bool()>& stop = {});

// Z = W_bj / Omega_b + alpha * sqrt(ln(M + 1) / (Q_bj + 1)).
double edge_potential(const SearchState& state, Vertex b, Vertex j, double alpha);

// Index drawn with probability proportional to weights[i]; uniform when all are 0.
std::size_t roulette(std::span<const double> weights, Rng& rng);

// Samples one compact k-opt action against the current tour. Returns nullopt
// only when no vertex admits a first sub-decision.
std::optional<Action> sample_action(SearchState& state, Rng& rng);

enum class RoundOutcome { kImproved, kPoolExhausted, kInterrupted };

struct RoundObserver {
  std::function<void(const Action&)> on_examined;
  std::function<void(const Action&, double old_length, double new_length)> on_applied;
};

// Samples up to H actions; applies the first improving one.
RoundOutcome mcts_round(SearchState& state, Rng& rng, const std::function<bool()>& stop = {},
                        const RoundObserver* observer = nullptr);

// beta * (exp((old - new) / old) - 1)
double weight_increment(double old_length, double new_length, double beta);

// Reinforces the added edges of an improving action. Throws std::logic_error
// unless new_length < old_length.
void backprop_weights(SearchState& state, const Action& action, double old_length, double new_length,
                      double beta);

// Either a wall-clock budget or a fixed number of MCTS rounds (deterministic).
struct Budget {
  std::optional<std::chrono::milliseconds> wall;
  std::optional<std::uint64_t> rounds;

  static Budget from_params(const Params& p, std::size_t n);
};

struct SolveStats {
  std::uint64_t restarts = 0;
  std::uint64_t actions_examined = 0;  // M
  std::uint64_t improvements = 0;      // MCTS improving actions applied
  std::uint64_t two_opt_moves = 0;
  std::uint64_t rounds = 0;
  double initial_length = 0.0;
  double time_to_best_ms = 0.0;
  double elapsed_ms = 0.0;
};

struct SolveObserver {
  RoundObserver round;
  std::function<void(double best_length)> on_best;
  std::function<void(const SearchState&)> on_finish;
};

struct SolveResult {
  Tour tour;
  double length = 0.0;
  SolveStats stats;
};

SolveResult solve(const Instance& inst, const HeatMap& hm, const Params& params, const Budget& budget, Rng& rng,
                  const SolveObserver* observer = nullptr);

}  // namespace hmtsp
