#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "hmtsp/mcts.hpp"
#include "test_support.hpp"

namespace hmtsp {
namespace {

using testing::edge;

// Chi-square statistic of observed counts against equal expected counts.
double chi_square_uniform(const std::vector<int>& counts) {
  double total = 0.0;
  for (int c : counts) total += c;
  const double expected = total / static_cast<double>(counts.size());
  double chi = 0.0;
  for (int c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

TEST(Params, DefaultsAndValidation) {
  const Params p;
  EXPECT_EQ(p.alpha, 1.0);
  EXPECT_EQ(p.beta, 10.0);
  EXPECT_EQ(p.h_factor, 10.0);
  EXPECT_EQ(p.k_max, 10u);
  EXPECT_EQ(p.w_candidate_min, 1.0);
  EXPECT_EQ(p.pool_bound(200), 2000u);
  EXPECT_NO_THROW(p.validate());
  Params bad = p;
  bad.k_max = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.alpha = -1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.h_factor = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(InitState, AlwaysAPermutation) {
  Rng rng(1);
  for (std::size_t n : {3u, 4u, 17u, 300u}) {
    const Instance inst = generate_instance(n, rng);
    const HeatMap hm = surrogate_heatmap(inst);
    for (int t = 0; t < 20; ++t) ASSERT_TRUE(is_permutation_tour(init_state(inst, hm, rng), n));
  }
}

TEST(InitState, SoftmaxOfTwoCandidates) {
  // from vertex 0 the candidates are 1 (P=1) and 2 (P=0)
  const Instance tri({{0, 0}, {1, 0}, {0, 1}});
  const HeatMap hm(3, {{0, 1, 1.0}});
  Rng rng(2);
  int from_zero = 0, to_one = 0;
  for (int t = 0; t < 30000; ++t) {
    const Tour tour = init_state(tri, hm, rng);
    if (tour[0] != 0) continue;
    ++from_zero;
    to_one += tour[1] == 1;
  }
  const double expected = std::exp(1.0) / (std::exp(1.0) + 1.0);
  EXPECT_NEAR(expected, 0.7311, 1e-4);
  const double sigma = std::sqrt(expected * (1 - expected) / from_zero);
  EXPECT_NEAR(static_cast<double>(to_one) / from_zero, expected, 5 * sigma);
}

TEST(InitState, EqualProbabilitiesGiveUniformSuccessor) {
  Rng rng(3);
  const Instance inst = generate_instance(6, rng);
  const HeatMap hm = complete_heatmap(6, 0.5);
  std::vector<int> counts(5, 0);
  std::vector<int> starts(6, 0);
  for (int t = 0; t < 30000; ++t) {
    const Tour tour = init_state(inst, hm, rng);
    ++starts[static_cast<std::size_t>(tour[0])];
    if (tour[0] == 0) ++counts[static_cast<std::size_t>(tour[1] - 1)];
  }
  // 4 degrees of freedom, 0.1% critical value 18.47; 5 for the start, 20.52
  EXPECT_LT(chi_square_uniform(counts), 18.47);
  EXPECT_LT(chi_square_uniform(starts), 20.52);
}

TEST(InitState, AbsentEdgesCountAsZero) {
  // sparse map where only one neighbor is stored: it gets e/(e + rest)
  Rng rng(4);
  const Instance inst = generate_instance(5, rng);
  const HeatMap hm(5, {{0, 3, 1.0}});
  int from_zero = 0, to_three = 0;
  for (int t = 0; t < 40000; ++t) {
    const Tour tour = init_state(inst, hm, rng);
    if (tour[0] != 0) continue;
    ++from_zero;
    to_three += tour[1] == 3;
  }
  const double expected = std::exp(1.0) / (std::exp(1.0) + 3.0);
  const double sigma = std::sqrt(expected * (1 - expected) / from_zero);
  EXPECT_NEAR(static_cast<double>(to_three) / from_zero, expected, 5 * sigma);
}

TEST(Enumerate2Opt, OptimalSquareUnchanged) {
  const Instance sq = testing::square_corners();
  const HeatMap hm = complete_heatmap(4);
  SearchState state(sq, hm, Params{});
  state.set_tour(Tour{0, 1, 2, 3});
  EXPECT_EQ(enumerate_2opt(state), 0u);
  EXPECT_EQ(state.tour().order(), (Tour{0, 1, 2, 3}));
}

TEST(Enumerate2Opt, UncrossesSquare) {
  const Instance inst = testing::crossing_square();
  const HeatMap hm = complete_heatmap(4);
  SearchState state(inst, hm, Params{});
  state.set_tour(Tour{0, 1, 2, 3});
  EXPECT_EQ(enumerate_2opt(state), 1u);
  EXPECT_NEAR(state.length(), 4.0, 1e-12);
  EXPECT_NEAR(state.tour().length(inst), 4.0, 1e-12);
}

TEST(Enumerate2Opt, RespectsPromisingFilter) {
  const Instance inst = testing::crossing_square();
  // only the current tour's edges: the uncrossing edges (1,3), (0,2) are missing
  const HeatMap hm(4, {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}, {0, 3, 0.5}});
  SearchState state(inst, hm, Params{});
  state.set_tour(Tour{0, 1, 2, 3});
  EXPECT_EQ(enumerate_2opt(state), 0u);
  EXPECT_EQ(state.tour().order(), (Tour{0, 1, 2, 3}));
}

TEST(Enumerate2Opt, ReachesExhaustiveFixedPoint) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = generate_instance(60, rng);
    const HeatMap hm = complete_heatmap(60);
    SearchState state(inst, hm, Params{});
    const Tour start = testing::random_tour(60, rng);
    state.set_tour(start);
    const double before = state.length();
    enumerate_2opt(state);
    EXPECT_GE(testing::best_2opt_delta(inst, state.tour().order()), -1e-9);
    EXPECT_LE(state.length(), before);
    EXPECT_NEAR(state.length(), testing::naive_length(inst, state.tour().order()), 1e-9);
  }
}

TEST(Enumerate2Opt, SparseMapOnlyAddsPromisingEdges) {
  Rng rng(6);
  const Instance inst = generate_instance(200, rng);
  const HeatMap hm = prune_unpromising(surrogate_heatmap(inst, 5), inst);
  SearchState state(inst, hm, Params{});
  const Tour start = init_state(inst, hm, rng);
  state.set_tour(start);
  const auto before = testing::tour_edges(start);
  enumerate_2opt(state);
  for (const auto& e : testing::tour_edges(state.tour().order())) {
    if (!before.count(e)) ASSERT_TRUE(hm.contains(e.first, e.second));
  }
}

TEST(Enumerate2OptAround, OnlySeedsAreExamined) {
  const Instance inst = testing::crossing_square();
  const HeatMap hm = complete_heatmap(4);
  SearchState state(inst, hm, Params{});
  state.set_tour(Tour{0, 1, 2, 3});
  EXPECT_EQ(enumerate_2opt_around(state, {}), 0u);
  const Vertex seed[] = {1};
  EXPECT_EQ(enumerate_2opt_around(state, seed), 1u);
  EXPECT_NEAR(state.length(), 4.0, 1e-12);
}

TEST(Enumerate2OptAround, AllSeedsNeverWorseAndConsistent) {
  Rng rng(8);
  const Instance inst = generate_instance(80, rng);
  const HeatMap hm = complete_heatmap(80);
  SearchState state(inst, hm, Params{});
  state.set_tour(testing::random_tour(80, rng));
  const double before = state.length();
  std::vector<Vertex> all(80);
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<Vertex>(v);
  EXPECT_GT(enumerate_2opt_around(state, all), 0u);
  EXPECT_LT(state.length(), before);
  EXPECT_NEAR(state.length(), testing::naive_length(inst, state.tour().order()), 1e-9);
  // a full pass afterwards still ends at the exact fixed point
  enumerate_2opt(state);
  EXPECT_GE(testing::best_2opt_delta(inst, state.tour().order()), -1e-9);
}

TEST(EdgePotential, FreshStateIsNormalizedWeight) {
  Rng rng(7);
  const Instance inst = generate_instance(30, rng);
  const HeatMap hm = surrogate_heatmap(inst);
  SearchState state(inst, hm, Params{});
  const Vertex b = 4;
  double sum = 0.0;
  for (double p : hm.probabilities(b)) sum += 100.0 * p;
  const double omega = sum / static_cast<double>(hm.degree(b));
  EXPECT_NEAR(state.mean_weight(b), omega, 1e-12);
  for (Vertex j : hm.neighbors(b)) {
    EXPECT_NEAR(edge_potential(state, b, j, 1.0), 100.0 * hm.at(b, j) / omega, 1e-12);
  }
}

TEST(EdgePotential, UniformWeightsGiveOne) {
  const Instance inst = testing::square_corners();
  const HeatMap hm = complete_heatmap(4, 0.5);
  SearchState state(inst, hm, Params{});
  for (Vertex j : {1, 2, 3}) EXPECT_DOUBLE_EQ(edge_potential(state, 0, j, 1.0), 1.0);
}

TEST(EdgePotential, ExplorationTermAfter99Examinations) {
  Rng rng(8);
  const Instance inst = generate_instance(6, rng);
  const HeatMap hm = complete_heatmap(6, 0.5);
  SearchState state(inst, hm, Params{});
  state.set_tour(testing::identity_tour(6));
  Action act;
  act.a = {0, 2};
  act.b = {1, 3};  // adds (1,2) and (3,0)
  for (int i = 0; i < 99; ++i) state.record_examined(act);
  EXPECT_EQ(state.examined(), 99u);
  EXPECT_NEAR(edge_potential(state, 4, 5, 1.0), 1.0 + std::sqrt(std::log(100.0)), 1e-12);
  EXPECT_NEAR(edge_potential(state, 4, 5, 1.0), 3.1460, 1e-4);
  EXPECT_NEAR(edge_potential(state, 1, 2, 1.0), 1.0 + std::sqrt(std::log(100.0) / 100.0), 1e-12);
  EXPECT_NEAR(edge_potential(state, 4, 5, 0.0), 1.0, 1e-12);
}

TEST(EdgePotential, RejectsNonPromisingEdge) {
  const Instance sq = testing::square_corners();
  const HeatMap hm(4, {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}, {0, 3, 0.5}});
  SearchState state(sq, hm, Params{});
  EXPECT_THROW(edge_potential(state, 0, 2, 1.0), std::logic_error);
}

TEST(SearchState, MeanWeightNeedsEdges) {
  const Instance sq = testing::square_corners();
  const HeatMap hm(4, {{0, 1, 0.5}});
  SearchState state(sq, hm, Params{});
  EXPECT_THROW(state.mean_weight(2), std::logic_error);
}

TEST(Roulette, ThreeToOne) {
  Rng rng(9);
  const std::vector<double> z{3.0, 1.0};
  int first = 0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) first += roulette(z, rng) == 0;
  const double sigma = std::sqrt(0.75 * 0.25 / draws);
  EXPECT_NEAR(static_cast<double>(first) / draws, 0.75, 5 * sigma);
}

TEST(Roulette, SingleAndZeroWeights) {
  Rng rng(10);
  const std::vector<double> one{0.2};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(roulette(one, rng), 0u);
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  std::vector<int> hits(3, 0);
  for (int i = 0; i < 3000; ++i) ++hits[roulette(zeros, rng)];
  EXPECT_LT(chi_square_uniform(hits), 13.82);
  const std::vector<double> skip{0.0, 1.0, 0.0};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(roulette(skip, rng), 1u);
}

TEST(SampleAction, UniformMapWithoutExplorationIsUniform) {
  // with equal weights and alpha = 0 every candidate has potential 1
  const std::size_t n = 12;
  Rng rng(11);
  const Instance inst = generate_instance(n, rng);
  const HeatMap hm = complete_heatmap(n, 0.5);
  Params params;
  params.alpha = 0.0;
  params.k_max = 2;
  SearchState state(inst, hm, params);
  state.set_tour(testing::identity_tour(n));
  // a1 = 0, b1 = 1: X = every vertex except 0, 1 and 2
  std::vector<int> counts(n, 0);
  int total = 0;
  while (total < 10000) {
    const auto act = sample_action(state, rng);
    ASSERT_TRUE(act.has_value());
    if (act->a[0] != 0) continue;
    ++counts[static_cast<std::size_t>(act->a[1])];
    ++total;
  }
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 0);
  const std::vector<int> x(counts.begin() + 3, counts.end());
  // 8 degrees of freedom, 0.1% critical value 26.12
  EXPECT_LT(chi_square_uniform(x), 26.12);
}

TEST(SampleAction, ActionsSatisfyInvariants) {
  Rng rng(12);
  for (std::size_t n : {5u, 20u, 150u}) {
    const Instance inst = generate_instance(n, rng);
    const HeatMap hm = prune_unpromising(surrogate_heatmap(inst), inst);
    Params params;
    params.k_max = 2 + rng.uniform_index(9);
    SearchState state(inst, hm, params);
    state.set_tour(init_state(inst, hm, rng));
    for (int t = 0; t < 2000; ++t) {
      const auto act = sample_action(state, rng);
      ASSERT_TRUE(act.has_value());
      ASSERT_GE(act->k(), 2u);
      ASSERT_LE(act->k(), params.k_max);
      ASSERT_EQ(act->sequence().back(), act->a.front());
      const Tour t_now = state.tour().order();
      const Tour oracle = testing::apply_by_edges(t_now, *act);
      ASSERT_FALSE(oracle.empty());
      ASSERT_NEAR(act->delta, action_delta(inst, *act), 1e-12);
      // added edges other than the closing one are promising and above the cutoff
      for (std::size_t i = 0; i + 1 < act->k(); ++i) {
        ASSERT_TRUE(hm.contains(act->b[i], act->a[i + 1]));
        ASSERT_GE(state.weight(act->b[i], act->a[i + 1]), params.w_candidate_min);
      }
      // removed edges distinct, added edges distinct and disjoint from removed
      std::set<testing::Edge> removed, added;
      for (std::size_t i = 0; i < act->k(); ++i) {
        ASSERT_TRUE(removed.insert(edge(act->a[i], act->b[i])).second);
        ASSERT_TRUE(added.insert(edge(act->b[i], act->next_a(i))).second);
      }
      for (const auto& e : added) ASSERT_FALSE(removed.count(e));
      // the action did not run past an improving closure
      for (std::size_t j = 2; j < act->k(); ++j) {
        double close = inst.dist(act->b[j - 1], act->a[0]);
        for (std::size_t i = 0; i < j; ++i) close -= inst.dist(act->a[i], act->b[i]);
        for (std::size_t i = 0; i + 1 < j; ++i) close += inst.dist(act->b[i], act->a[i + 1]);
        ASSERT_GE(close, -1e-12 * state.length());
      }
      if (act->delta < 0) state.apply(*act);
    }
  }
}

TEST(MctsRound, FirstImprovingActionStopsThePool) {
  // only some first sub-decisions uncross the square; pick a seed whose first
  // draw is one of them by sampling on a copy of the state
  const Instance inst = testing::crossing_square();
  const HeatMap hm = complete_heatmap(4);
  SearchState state(inst, hm, Params{});
  state.set_tour(Tour{0, 1, 2, 3});
  std::uint64_t seed = 0;
  for (;; ++seed) {
    SearchState probe = state;
    Rng r(seed);
    if (sample_action(probe, r)->delta < 0) break;
  }
  Rng rng(seed);
  EXPECT_EQ(mcts_round(state, rng), RoundOutcome::kImproved);
  EXPECT_EQ(state.examined(), 1u);
  EXPECT_NEAR(state.length(), 4.0, 1e-12);
}

TEST(MctsRound, ExhaustedPoolCountsExactlyH) {
  const Instance sq = testing::square_corners();
  const HeatMap hm = complete_heatmap(4);
  SearchState state(sq, hm, Params{});
  state.set_tour(Tour{0, 1, 2, 3});
  Rng rng(14);
  EXPECT_EQ(mcts_round(state, rng), RoundOutcome::kPoolExhausted);
  EXPECT_EQ(state.examined(), 40u);
  EXPECT_EQ(state.tour().order(), (Tour{0, 1, 2, 3}));
  EXPECT_EQ(state.length(), 4.0);
}

TEST(MctsRound, AccessCountsMatchExaminationLog) {
  Rng rng(15);
  const Instance inst = generate_instance(80, rng);
  const HeatMap hm = prune_unpromising(surrogate_heatmap(inst), inst);
  SearchState state(inst, hm, Params{});
  state.set_tour(init_state(inst, hm, rng));
  enumerate_2opt(state);

  std::map<testing::Edge, std::uint64_t> q_log;
  std::uint64_t examined = 0, sum_k = 0;
  RoundObserver obs;
  obs.on_examined = [&](const Action& a) {
    ++examined;
    sum_k += a.k();
    for (std::size_t i = 0; i < a.k(); ++i) ++q_log[edge(a.b[i], a.next_a(i))];
  };
  obs.on_applied = [&](const Action&, double old_len, double new_len) { EXPECT_LT(new_len, old_len); };
  for (int r = 0; r < 30; ++r) {
    if (mcts_round(state, rng, {}, &obs) == RoundOutcome::kImproved) enumerate_2opt(state);
  }
  EXPECT_EQ(state.examined(), examined);
  EXPECT_EQ(state.total_access(), sum_k);
  for (const auto& [e, q] : q_log) {
    ASSERT_EQ(state.access(e.first, e.second), q);
    ASSERT_EQ(state.access(e.second, e.first), q);
  }
  EXPECT_TRUE(state.weights_symmetric());
}

TEST(Backprop, Increment) {
  EXPECT_NEAR(weight_increment(10.0, 9.0, 10.0), 10.0 * (std::exp(0.1) - 1.0), 1e-15);
  EXPECT_NEAR(weight_increment(10.0, 9.0, 10.0), 1.05171, 1e-5);
  EXPECT_EQ(weight_increment(10.0, 10.0, 10.0), 0.0);
}

TEST(Backprop, UpdatesAddedEdgesSymmetrically) {
  Rng rng(16);
  const Instance inst = generate_instance(8, rng);
  const HeatMap hm = complete_heatmap(8, 0.3);
  SearchState state(inst, hm, Params{});
  state.set_tour(testing::identity_tour(8));
  const Action act = complete_action(inst, state.tour(), {0, 4});  // adds (1,4) and (3,0)
  const double before = state.weight(1, 4);
  backprop_weights(state, act, 10.0, 9.0, 10.0);
  EXPECT_NEAR(state.weight(1, 4), before + 1.0517091807564762, 1e-12);
  EXPECT_EQ(state.weight(4, 1), state.weight(1, 4));
  EXPECT_EQ(act.b, (std::vector<Vertex>{1, 3}));
  EXPECT_EQ(state.weight(0, 3), state.weight(1, 4));
  EXPECT_EQ(state.weight(0, 1), 30.0);
  EXPECT_TRUE(state.weights_symmetric());
  EXPECT_THROW(backprop_weights(state, act, 9.0, 9.0, 10.0), std::logic_error);
  EXPECT_THROW(backprop_weights(state, act, 9.0, 9.5, 10.0), std::logic_error);
}

TEST(Backprop, NonPromisingClosingEdgeIsIgnored) {
  const Instance sq = testing::square_corners();
  const HeatMap hm(4, {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}, {0, 3, 0.5}, {1, 3, 0.5}});
  SearchState state(sq, hm, Params{});
  state.set_tour(Tour{0, 1, 2, 3});
  Action act;
  act.a = {0, 3};
  act.b = {1, 2};  // adds (1,3) which is stored and (2,0) which is not
  state.reinforce(act, 2.0);
  EXPECT_EQ(state.weight(1, 3), 52.0);
  EXPECT_EQ(state.weight(0, 2), 0.0);
  state.record_examined(act);
  EXPECT_EQ(state.access(0, 2), 1u);
  EXPECT_EQ(state.total_access(), 2u);
}

}  // namespace
}  // namespace hmtsp
