#include <gtest/gtest.h>

#include <cmath>

#include "hmtsp/instance.hpp"
#include "test_support.hpp"

namespace hmtsp {
namespace {

using testing::crossing_square;
using testing::square_corners;

TEST(GenerateInstance, SmallInstanceInUnitSquare) {
  Rng rng(7);
  const Instance inst = generate_instance(3, rng);
  ASSERT_EQ(inst.size(), 3u);
  for (const auto& p : inst.coords()) {
    EXPECT_GE(p.x, 0.0);
    EXPECT_LE(p.x, 1.0);
    EXPECT_GE(p.y, 0.0);
    EXPECT_LE(p.y, 1.0);
  }
}

TEST(GenerateInstance, Deterministic) {
  Rng a(1), b(1);
  EXPECT_EQ(generate_instance(100, a), generate_instance(100, b));
}

TEST(GenerateInstance, MeanOfXNearOneHalf) {
  // mean of n U(0,1) draws has std-dev sqrt(1/12/n) = 0.00289 at n = 10^4,
  // so the 0.02 window is about seven standard deviations wide
  Rng rng(42);
  const Instance inst = generate_instance(10000, rng);
  double sum = 0.0;
  for (const auto& p : inst.coords()) sum += p.x;
  EXPECT_NEAR(sum / 10000.0, 0.5, 0.02);
}

TEST(GenerateInstance, RejectsFewerThanThree) {
  Rng rng(0);
  EXPECT_THROW(generate_instance(2, rng), InstanceError);
}

TEST(TourLength, SquarePerimeter) {
  EXPECT_DOUBLE_EQ(tour_length(square_corners(), Tour{0, 1, 2, 3}), 4.0);
}

TEST(TourLength, CoincidentPointsHaveZeroLength) {
  const Instance inst({{0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}});
  EXPECT_EQ(tour_length(inst, Tour{2, 0, 3, 1}), 0.0);
}

TEST(TourLength, CrossingTour) {
  EXPECT_NEAR(tour_length(crossing_square(), Tour{0, 1, 2, 3}), 2.0 + 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(tour_length(crossing_square(), Tour{0, 1, 2, 3}), 4.82843, 1e-5);
}

TEST(TourLength, RejectsNonPermutation) {
  EXPECT_THROW(tour_length(square_corners(), Tour{0, 1, 1, 3}), InstanceError);
  EXPECT_THROW(tour_length(square_corners(), Tour{0, 1, 2}), InstanceError);
  EXPECT_THROW(tour_length(square_corners(), Tour{0, 1, 2, 4}), InstanceError);
}

TEST(TourLengthProperty, RotationReversalAndLowerBounds) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(40);
    const Instance inst = generate_instance(n, rng);
    Tour t = testing::random_tour(n, rng);
    const double len = tour_length(inst, t);

    Tour rotated = t;
    std::rotate(rotated.begin(), rotated.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(n)), rotated.end());
    Tour reversed(t.rbegin(), t.rend());
    EXPECT_NEAR(tour_length(inst, rotated), len, 1e-12 * len);
    EXPECT_NEAR(tour_length(inst, reversed), len, 1e-12 * len);

    double min_pair = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        min_pair = std::min(min_pair, inst.dist(static_cast<Vertex>(i), static_cast<Vertex>(j)));
      }
    }
    EXPECT_GE(len, static_cast<double>(n) * min_pair - 1e-12);
    EXPECT_GE(len, 0.0);
  }
}

TEST(BruteForce, SquareCorners) {
  const auto res = brute_force_optimum(square_corners());
  EXPECT_DOUBLE_EQ(res.length, 4.0);
  EXPECT_EQ(res.tour, (Tour{0, 1, 2, 3}));
}

TEST(BruteForce, CollinearPointsGoOutAndBack) {
  const Instance inst({{0, 0}, {0.25, 0}, {0.5, 0}, {0.75, 0}, {1, 0}});
  const auto res = brute_force_optimum(inst);
  EXPECT_DOUBLE_EQ(res.length, 2.0);
  // many orders tie at 2.0; the lexicographically smallest is kept
  EXPECT_EQ(res.tour, (Tour{0, 1, 2, 3, 4}));
}

TEST(BruteForce, MatchesExhaustivePermutationOracle) {
  Rng rng(3);
  const Instance inst = generate_instance(9, rng);
  const double oracle = testing::exhaustive_optimum(inst);
  const auto res = brute_force_optimum(inst);
  EXPECT_NEAR(res.length, oracle, 1e-12);
  EXPECT_NEAR(tour_length(inst, res.tour), res.length, 1e-12);
}

TEST(BruteForce, SmallRandomInstancesMatchOracle) {
  Rng rng(77);
  for (std::size_t n = 3; n <= 8; ++n) {
    const Instance inst = generate_instance(n, rng);
    EXPECT_NEAR(brute_force_optimum(inst).length, testing::exhaustive_optimum(inst), 1e-12) << "n=" << n;
  }
}

TEST(BruteForce, RejectsLargeInstances) {
  Rng rng(0);
  EXPECT_THROW(brute_force_optimum(generate_instance(13, rng)), InstanceError);
}

TEST(BruteForce, NeverWorseThanAnyOtherTour) {
  Rng rng(5);
  const Instance inst = generate_instance(10, rng);
  const double opt = brute_force_optimum(inst).length;
  for (int i = 0; i < 500; ++i) {
    EXPECT_LE(opt, tour_length(inst, testing::random_tour(10, rng)) + 1e-12);
  }
  for (Vertex s = 0; s < 10; ++s) EXPECT_LE(opt, tour_length(inst, greedy_nearest_neighbor(inst, s)) + 1e-12);
}

TEST(Greedy, OptimalOnSquare) {
  const Tour t = greedy_nearest_neighbor(square_corners(), 0);
  EXPECT_DOUBLE_EQ(tour_length(square_corners(), t), 4.0);
  // (1,0) and (0,1) tie from the origin; the lower index wins
  EXPECT_EQ(t, (Tour{0, 1, 2, 3}));
}

TEST(Greedy, TriangleHasOneCycle) {
  const Instance tri({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}});
  for (Vertex s = 0; s < 3; ++s) {
    EXPECT_NEAR(tour_length(tri, greedy_nearest_neighbor(tri, s)), 3.0, 1e-12);
  }
}

TEST(Greedy, AtLeastTwiceTheDiameter) {
  Rng rng(9);
  const Instance inst = generate_instance(50, rng);
  const Tour t = greedy_nearest_neighbor(inst, 0);
  ASSERT_TRUE(is_permutation_tour(t, 50));
  double diameter = 0.0;
  for (Vertex i = 0; i < 50; ++i) {
    for (Vertex j = i + 1; j < 50; ++j) diameter = std::max(diameter, inst.dist(i, j));
  }
  EXPECT_GE(tour_length(inst, t), 2.0 * diameter);
}

TEST(Greedy, RejectsOutOfRangeStart) {
  EXPECT_THROW(greedy_nearest_neighbor(square_corners(), 4), InstanceError);
  EXPECT_THROW(greedy_nearest_neighbor(square_corners(), -1), InstanceError);
}

}  // namespace
}  // namespace hmtsp
