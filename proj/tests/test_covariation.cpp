#include <gtest/gtest.h>

#include <cmath>

#include "cylint/covariation.hpp"
#include "test_support.hpp"

using namespace cylint;
using namespace cylint::testing;

namespace {

SeqPathPrimal primal_of(const ScalarPath& z) { return SeqPathPrimal(std::vector<ScalarPath>{z}); }
SeqSemimartingale dual_of(const ScalarPath& z) { return SeqSemimartingale(std::vector<ScalarPath>{z}); }

}  // namespace

TEST(BracketResidual, ContinuousFiniteVariationIsSumOfSquaredSteps) {
  for (std::size_t steps : {8u, 64u, 512u}) {
    const GridPtr g = uniform_grid(steps);
    const ScalarPath r = bracket_residual(dual_of(identity_path(g)), primal_of(identity_path(g)));
    const double dt = 1.0 / static_cast<double>(steps);
    for (std::size_t i = 0; i < g->size(); ++i) {
      // Σ (Δt)² up to t_i = Δt · t_i.
      EXPECT_NEAR(r.right(i), dt * (*g)[i], 1e-14);
    }
  }
}

TEST(BracketResidual, ConstantPrimalGivesZero) {
  const SeqSemimartingale x = scenario(mixed_model(1, 64), 3);
  const ScalarPath x_shift = x.coordinate(0) - ScalarPath::constant(x.grid(), x.coordinate(0).initial());
  const ScalarPath r = bracket_residual(dual_of(x_shift), primal_of(ScalarPath::constant(x.grid(), 1.0)));
  EXPECT_LE(r.sup_abs(), 1e-13);
}

TEST(BracketResidual, ValueAtZeroIsPairing) {
  const NoiseModel m = mixed_model(4, 32);
  const auto [x, y] = split<SeqSemimartingale, SeqPathPrimal>(generate_scenario(m, Ensemble{1, 4}, 0));
  const ScalarPath r = bracket_residual(x, y);
  EXPECT_DOUBLE_EQ(r.initial(), x.coordinate(0).initial() * y.coordinate(0).initial() +
                                    x.coordinate(1).initial() * y.coordinate(1).initial());
}

TEST(BracketResidual, ItoIdentityForBrownianMotion) {
  const NoiseModel m{GridSpec{1.0, 256}, {brownian(1.0)}, kDefaultMaxJumps};
  const std::size_t n = 1000;
  double mean = 0.0, sq = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const SeqSemimartingale x(generate_scenario(m, Ensemble{n, 5}, s));
    const double v = bracket_residual(x, mirror(x)).terminal();
    mean += v;
    sq += v * v;
  }
  mean /= n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - 1.0), 3.0 * se);
}

TEST(BracketResidual, BilinearAndSymmetric) {
  const NoiseModel m = mixed_model(9, 64);
  const auto paths = generate_scenario(m, Ensemble{1, 6}, 0);
  const SeqSemimartingale x1(std::vector<ScalarPath>(paths.begin(), paths.begin() + 3));
  const SeqSemimartingale x2(std::vector<ScalarPath>(paths.begin() + 3, paths.begin() + 6));
  const SeqPathPrimal y(std::vector<ScalarPath>(paths.begin() + 6, paths.end()));
  const ScalarPath lhs = bracket_residual(add(scale(2.0, x1), scale(-0.5, x2)), y);
  const ScalarPath rhs = 2.0 * bracket_residual(x1, y) + (-0.5) * bracket_residual(x2, y);
  EXPECT_LE(max_node_distance(lhs, rhs), 1e-11);
  // Swapping the roles of the mirrored pair leaves the bracket unchanged.
  const SeqSemimartingale ys(std::vector<ScalarPath>(y.coordinates().begin(), y.coordinates().end()));
  EXPECT_LE(max_node_distance(bracket_residual(x1, y), bracket_residual(ys, mirror(x1))), 1e-12);
}

TEST(BracketPartition, ConstantPrimal) {
  const SeqSemimartingale x = scenario(mixed_model(2, 64), 7);
  std::vector<ScalarPath> ys{ScalarPath::constant(x.grid(), 2.0), ScalarPath::constant(x.grid(), -1.0)};
  const std::vector<SeqSemimartingale> xs{x};
  const std::vector<SeqPathPrimal> yv{SeqPathPrimal(ys)};
  const std::vector<std::vector<RandomPartition>> parts{partition_sequence(*x.grid(), PartitionKind::Dyadic, 4)};
  const BracketResult r = bracket_partition(xs, yv, parts, 0.02, 1.25);
  const double x0y0 = 2.0 * x.coordinate(0).initial() - x.coordinate(1).initial();
  for (const auto& level : r.partition_paths) {
    for (std::size_t i = 0; i < level[0].size(); ++i) EXPECT_EQ(level[0].right(i), x0y0);
  }
  for (double gap : r.convergence.gaps) EXPECT_LE(gap, 1e-13);
}

TEST(BracketPartition, DeterministicLinearHalves) {
  const GridPtr g = uniform_grid(1024);
  const std::vector<SeqSemimartingale> xs{dual_of(identity_path(g))};
  const std::vector<SeqPathPrimal> ys{primal_of(identity_path(g))};
  const std::vector<std::vector<RandomPartition>> parts{partition_sequence(*g, PartitionKind::Dyadic, 8)};
  const BracketResult r = bracket_partition(xs, ys, parts, 0.02, 1.25);
  for (std::size_t n = 1; n < parts[0].size(); ++n) {
    const double ratio = r.partition_paths[n - 1][0].terminal() / r.partition_paths[n][0].terminal();
    EXPECT_GE(ratio, 1.6);
    EXPECT_LE(ratio, 2.4);
  }
}

TEST(BracketPartition, FullGridReproducesResidualOnContinuousPaths) {
  const NoiseModel m{GridSpec{1.0, 128}, {brownian(1.0, 0.3), drift(1.0, -0.2), brownian(0.5), drift(-2.0, 1.0)},
                     kDefaultMaxJumps};
  const auto [x, y] = split<SeqSemimartingale, SeqPathPrimal>(generate_scenario(m, Ensemble{1, 8}, 0));
  const ScalarPath sum = bracket_partition_sum(x, y, full_partition(*x.grid()));
  EXPECT_LE(max_node_distance(sum, bracket_residual(x, y)), 1e-12);
}

TEST(BracketPartition, ThreeNodeAbelSummation) {
  // Grid {0, 1/2, 1}: x = (1, 2, 4), y = (3, 1, 2).
  // Residual at 1: 8 - [3·1 + 1·2] - [1·(-2) + 2·1] = 3.
  // Partition sum: 1·3 + (1)(-2) + (2)(1) = 3.
  const GridPtr g = uniform_grid(2);
  const SeqSemimartingale x = dual_of(ScalarPath::continuous(g, {1, 2, 4}));
  const SeqPathPrimal y = primal_of(ScalarPath::continuous(g, {3, 1, 2}));
  EXPECT_DOUBLE_EQ(bracket_residual(x, y).terminal(), 3.0);
  EXPECT_DOUBLE_EQ(bracket_partition_sum(x, y, full_partition(*g)).terminal(), 3.0);
}

TEST(BracketProperties, ContinuousPairs) {
  const NoiseModel m{GridSpec{1.0, 64}, {brownian(1.0), drift(1.0), brownian(1.0), drift(2.0)}, kDefaultMaxJumps};
  const auto [x, y] = split<SeqSemimartingale, SeqPathPrimal>(generate_scenario(m, Ensemble{1, 9}, 0));
  const BracketProperties p = bracket_properties_check(x, y, StoppingTime::at(20));
  ASSERT_TRUE(p.continuity_deviation.has_value());
  EXPECT_LE(p.max_deviation(), 1e-12);
}

TEST(BracketProperties, JumpInDualOnly) {
  const GridPtr g = uniform_grid(8);
  const SeqSemimartingale x = dual_of(ScalarPath(g, {0, 0, 0, 0, 1.5, 1.5, 1.5, 1.5, 1.5},
                                                 {0, 0, 0, 1.5, 1.5, 1.5, 1.5, 1.5, 1.5}));
  const SeqPathPrimal y = primal_of(identity_path(g));
  const ScalarPath b = bracket_residual(x, y);
  EXPECT_NEAR(b.jump(3), 0.0, 1e-15);
  EXPECT_LE(bracket_properties_check(x, y, StoppingTime::at(5)).max_deviation(), 1e-14);
}

TEST(BracketProperties, MirroredPoissonJumpsSquare) {
  const NoiseModel m{GridSpec{1.0, 64}, {poisson(8.0, 0.7, 0.4)}, kDefaultMaxJumps};
  const SeqSemimartingale x(generate_scenario(m, Ensemble{1, 10}, 0));
  const ScalarPath b = bracket_residual(x, mirror(x));
  std::size_t jumps = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    const double j = x.coordinate(0).jump(i);
    if (j != 0.0) ++jumps;
    EXPECT_NEAR(b.jump(i), j * j, 1e-12);
  }
  EXPECT_GT(jumps, 0u);
  const BracketProperties p = bracket_properties_check(x, mirror(x), hitting_time(x, FiniteSeq::basis(0), 0.5));
  EXPECT_FALSE(p.continuity_deviation.has_value());
  EXPECT_LE(p.max_deviation(), 1e-12);
}

TEST(Fubini, Examples) {
  const NoiseModel m = mixed_model(3, 64);
  const SeqSemimartingale x = scenario(m, 11);
  const GridIntegrand h = linear_in_t_integrand(x.grid(), 3, FiniteSeq{{0, 1.0}, {1, 2.0}});
  const FiniteMeasureSpace single{{"e1"}, {1.0}};
  EXPECT_EQ(fubini_check(std::span(&h, 1), single, x).deviation, 0.0);

  const FiniteMeasureSpace three{{"a", "b", "c"}, {0.5, 1.5, 2.0}};
  const std::vector<GridIntegrand> same{h, h, h};
  const FubiniResult r = fubini_check(same, three, x);
  EXPECT_LE(r.deviation, 1e-12);
  EXPECT_LE(max_node_distance(r.rhs, 4.0 * integrate_grid(h, x).path.without_decomposition()), 1e-12);

  const FiniteMeasureSpace two{{"e1", "e2"}, {2.0, 3.0}};
  const std::vector<GridIntegrand> mixed{constant_integrand(x.grid(), 3, FiniteSeq::basis(0)),
                                         linear_in_t_integrand(x.grid(), 3, FiniteSeq::basis(1))};
  EXPECT_LE(fubini_check(mixed, two, x).deviation, 1e-10);
}

TEST(Fubini, Validation) {
  const SeqSemimartingale x = scenario(mixed_model(1, 8), 1);
  const GridIntegrand h(x.grid(), 1);
  EXPECT_THROW(fubini_check(std::span(&h, 1), FiniteMeasureSpace{{"a"}, {-1.0}}, x), std::invalid_argument);
  EXPECT_THROW(fubini_check(std::span(&h, 1), FiniteMeasureSpace{{"a", "b"}, {1.0, 1.0}}, x), std::invalid_argument);
}
