#include <gtest/gtest.h>

#include <cmath>

#include "cylint/integrate.hpp"
#include "cylint/rng.hpp"
#include "test_support.hpp"

using namespace cylint;
using namespace cylint::testing;

namespace {

/// Direct transcription of the left-point sum for one coordinate, used as
/// the oracle for the vectorized kernel.
std::vector<double> naive_left_point(const std::vector<double>& h, const ScalarPath& z) {
  std::vector<double> out(z.size(), 0.0);
  for (std::size_t j = 1; j < z.size(); ++j) out[j] = out[j - 1] + h[j - 1] * (z.right(j) - z.right(j - 1));
  return out;
}

SimplePredictableIntegrand random_simple(const SeqSemimartingale& x, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t last = x.grid()->size() - 1;
  SimplePredictableIntegrand h{x.grid(), x.dimension(), {0}, {}, FiniteSeq::basis(0, rng.normal())};
  const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 6);
  for (std::size_t k = 0; k < n; ++k) {
    h.stop_times.push_back(std::min(last, h.stop_times.back() + static_cast<std::size_t>(rng.uniform() * last / 3)));
  }
  h.stop_times.push_back(last);
  for (std::size_t k = 0; k + 1 < h.stop_times.size(); ++k) {
    // Coefficient measurable at τ_k: built from X at τ_k.
    const DualVec xv = x.node_value(h.stop_times[k]);
    std::vector<FiniteSeq::Entry> e;
    for (std::size_t j = 0; j < x.dimension(); ++j) {
      if (rng.uniform() < 0.6) e.emplace_back(j, (xv[j] >= 0 ? 1.0 : -1.0) * rng.uniform(0.1, 2.0));
    }
    h.coefficients.emplace_back(std::move(e));
  }
  return h;
}

}  // namespace

TEST(IntegrateSimple, UnitCoordinateTelescopes) {
  const SeqSemimartingale x = scenario(mixed_model(3, 64), 1);
  const std::size_t last = x.grid()->size() - 1;
  const SimplePredictableIntegrand h{x.grid(), 3, {0, last}, {FiniteSeq::basis(1)}, FiniteSeq{}};
  const IntegralResult r = integrate_simple(h, x);
  EXPECT_EQ(r.value_at_zero_term, 0.0);
  for (std::size_t i = 0; i <= last; ++i) {
    EXPECT_NEAR(r.path.right(i), x.coordinate(1).right(i) - x.coordinate(1).initial(), 1e-14);
    EXPECT_NEAR(r.path.left(i), x.coordinate(1).left(i) - x.coordinate(1).initial(), 1e-14);
  }
}

TEST(IntegrateSimple, ZeroIntegrand) {
  const SeqSemimartingale x = scenario(mixed_model(2, 16), 2);
  const SimplePredictableIntegrand h{x.grid(), 2, {0, 16}, {FiniteSeq{}}, FiniteSeq{}};
  EXPECT_EQ(integrate_simple(h, x).path.sup_abs(), 0.0);
}

TEST(IntegrateSimple, IndicatorAgainstTime) {
  const GridPtr g = uniform_grid(16);
  const SeqSemimartingale x(std::vector<ScalarPath>{identity_path(g)});
  const SimplePredictableIntegrand h{g, 1, {0, 4, 12, 16}, {FiniteSeq{}, FiniteSeq::basis(0), FiniteSeq{}}, FiniteSeq{}};
  const ScalarPath r = integrate_simple(h, x).path;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double t = (*g)[i];
    EXPECT_NEAR(r.right(i), t >= 0.25 ? std::min(t, 0.75) - std::min(t, 0.25) : 0.0, 1e-15);
  }
}

TEST(IntegrateSimple, ValueAtZeroTerm) {
  const SeqSemimartingale x = scenario(mixed_model(3, 16), 3);
  const SimplePredictableIntegrand h{x.grid(), 3, {0, 16}, {FiniteSeq{}}, FiniteSeq{{0, 2.0}, {2, -1.0}}};
  const IntegralResult r = integrate_simple(h, x);
  EXPECT_DOUBLE_EQ(r.value_at_zero_term, 2.0 * x.coordinate(0).initial() - x.coordinate(2).initial());
  EXPECT_EQ(r.with_value_at_zero().initial(), r.value_at_zero_term);
}

TEST(IntegrateSimple, Mismatch) {
  const SeqSemimartingale x = scenario(mixed_model(2, 16), 3);
  const SimplePredictableIntegrand h{uniform_grid(8), 2, {0, 8}, {FiniteSeq{}}, FiniteSeq{}};
  EXPECT_THROW(integrate_simple(h, x), GridMismatch);
  const SimplePredictableIntegrand wrong{x.grid(), 3, {0, 16}, {FiniteSeq{}}, FiniteSeq{}};
  EXPECT_THROW(integrate_simple(wrong, x), std::invalid_argument);
}

TEST(IntegrateElementary, Examples) {
  const SeqSemimartingale x = scenario(mixed_model(3, 32), 4);
  const GridPtr g = x.grid();
  const ElementaryIntegrand unit{{{StepScalarProcess::constant(g, 1.0), FiniteSeq::basis(2)}}};
  const ScalarPath r = integrate_elementary(unit, x).path;
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(r.right(i), x.coordinate(2).right(i) - x.coordinate(2).initial(), 1e-14);
  EXPECT_EQ(integrate_elementary(ElementaryIntegrand{}, x).path.sup_abs(), 0.0);
  const StepScalarProcess h = StepScalarProcess::indicator(g, 3, 20);
  const ElementaryIntegrand cancel{{{h, FiniteSeq::basis(0)}, {h, FiniteSeq::basis(0, -1.0)}}};
  EXPECT_LE(integrate_elementary(cancel, x).path.sup_abs(), 1e-14);
}

TEST(IntegrateGrid, ConstantIntegrand) {
  const SeqSemimartingale x = scenario(mixed_model(3, 32), 5);
  const IntegralResult r = integrate_grid(constant_integrand(x.grid(), 3, FiniteSeq::basis(0)), x);
  EXPECT_EQ(r.value_at_zero_term, x.coordinate(0).initial());
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    EXPECT_NEAR(r.path.right(i), x.coordinate(0).right(i) - x.coordinate(0).initial(), 1e-13);
  }
}

TEST(IntegrateGrid, ConstantLeftLimit) {
  const SeqSemimartingale x = scenario(mixed_model(3, 32), 6);
  std::vector<ScalarPath> ys;
  for (double c : {1.0, -2.0, 0.5}) ys.push_back(ScalarPath::constant(x.grid(), c));
  const ScalarPath r = integrate_grid(left_limit_integrand(SeqPathPrimal(ys)), x).path;
  const FiniteSeq phi{{0, 1.0}, {1, -2.0}, {2, 0.5}};
  const ScalarPath expected = evaluate(x, phi) - ScalarPath::constant(x.grid(), pair(x.node_value(0), phi));
  EXPECT_LE(max_node_distance(r, expected), 1e-13);
}

TEST(IntegrateGrid, LinearInTimeAgainstTime) {
  for (std::size_t steps : {16u, 64u, 256u}) {
    const GridPtr g = uniform_grid(steps);
    const SeqSemimartingale x(std::vector<ScalarPath>{identity_path(g)});
    const ScalarPath r = integrate_grid(linear_in_t_integrand(g, 1, FiniteSeq::basis(0)), x).path;
    const double dt = 1.0 / static_cast<double>(steps);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double t = (*g)[i];
      EXPECT_LE(std::abs(r.right(i) - t * t / 2), dt * t + 1e-15);
      // Exact left-point value Σ t_j Δt = Δt² i(i-1)/2.
      EXPECT_NEAR(r.right(i), dt * dt * static_cast<double>(i * (i - 1)) / 2.0, 1e-14);
    }
  }
}

TEST(IntegrateGrid, MatchesNaiveLeftPointOnContinuousNoise) {
  const NoiseModel m{GridSpec{1.0, 128}, {brownian(1.0), drift(0.5)}, kDefaultMaxJumps};
  const SeqSemimartingale x = scenario(m, 7);
  Rng rng(7);
  std::vector<double> h0(128), h1(128);
  GridIntegrand h(x.grid(), 2);
  for (std::size_t i = 0; i < 128; ++i) {
    h.cell(i)[0] = h0[i] = rng.normal();
    h.cell(i)[1] = h1[i] = rng.normal();
  }
  const ScalarPath r = integrate_grid(h, x).path;
  const auto a = naive_left_point(h0, x.coordinate(0)), b = naive_left_point(h1, x.coordinate(1));
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r.right(i), a[i] + b[i], 1e-12);
}

TEST(IntegrateGrid, OracleEquivalenceWithSimple) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SeqSemimartingale x = scenario(mixed_model(1 + seed % 6, 100 + 7 * seed), seed);
    const SimplePredictableIntegrand h = random_simple(x, seed + 1000);
    const IntegralResult closed = integrate_simple(h, x);
    const IntegralResult grid = integrate_grid(to_grid(h), x);
    const IntegralResult resampled = integrate_simple(sample_at(to_grid(h), full_partition(*x.grid())), x);
    EXPECT_LE(max_node_distance(closed.path, grid.path), 1e-12);
    EXPECT_LE(max_node_distance(closed.path, resampled.path), 1e-12);
    EXPECT_EQ(closed.value_at_zero_term, grid.value_at_zero_term);
    EXPECT_LE(max_node_distance(closed.path.decomposition().jump_martingale,
                                grid.path.decomposition().jump_martingale), 1e-12);
  }
}

TEST(IntegrateGrid, ElementaryAgreesWithGridForm) {
  const SeqSemimartingale x = scenario(mixed_model(4, 64), 8);
  const GridPtr g = x.grid();
  const ElementaryIntegrand e{{{StepScalarProcess{g, {0, 10, 30, 64}, {1.0, -2.0, 0.5}, 3.0}, FiniteSeq{{0, 1.0}, {3, 2.0}}},
                               {StepScalarProcess::indicator(g, 5, 50), FiniteSeq::basis(1, -1.5)}}};
  const IntegralResult a = integrate_elementary(e, x);
  const IntegralResult b = integrate_grid(to_grid(e, 4), x);
  EXPECT_LE(max_node_distance(a.path, b.path), 1e-12);
  EXPECT_NEAR(a.value_at_zero_term, b.value_at_zero_term, 1e-14);
}

TEST(Invariants, LinearityInIntegrator) {
  const NoiseModel m = mixed_model(6, 128);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [x, y] = split<SeqSemimartingale, SeqSemimartingale>(generate_scenario(m, Ensemble{1, seed}, 0));
    // Integrand Y_- built from the same scenario, with jumps of its own.
    const GridIntegrand h = left_limit_integrand(
        SeqPathPrimal(std::vector<ScalarPath>{x.coordinate(0), y.coordinate(1), x.coordinate(2)}));
    const ScalarPath lhs = integrate_grid(h, add(x, y)).path;
    const ScalarPath rhs = integrate_grid(h, x).path + integrate_grid(h, y).path;
    EXPECT_LE(max_node_distance(lhs, rhs), 1e-12);
    const SimplePredictableIntegrand sh = sample_at(h, partition_sequence(*x.grid(), PartitionKind::Dyadic, 3)[2]);
    EXPECT_LE(max_node_distance(integrate_simple(sh, add(x, y)).path,
                                integrate_simple(sh, x).path + integrate_simple(sh, y).path), 1e-12);
    const ElementaryIntegrand e{{{StepScalarProcess::indicator(x.grid(), 10, 90), FiniteSeq{{0, 1.0}, {2, -1.0}}}}};
    EXPECT_LE(max_node_distance(integrate_elementary(e, add(x, y)).path,
                                integrate_elementary(e, x).path + integrate_elementary(e, y).path), 1e-12);
  }
}

TEST(Invariants, StoppingJumpContinuousPartScaling) {
  const NoiseModel m = mixed_model(6, 128);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [x, y] = split<SeqSemimartingale, SeqPathPrimal>(generate_scenario(m, Ensemble{1, seed}, 0));
    const GridIntegrand h = left_limit_integrand(y);
    const StoppingTime tau = hitting_time(x, FiniteSeq{{0, 1.0}, {1, 1.0}}, 0.6);
    const IntegralResult full = integrate_grid(h, x);
    const ScalarPath a = stop_path(full.path, tau);
    EXPECT_LE(max_node_distance(a, integrate_grid(truncate(h, tau), x).path), 1e-12);
    EXPECT_LE(max_node_distance(a, integrate_grid(h, stopped(x, tau)).path), 1e-12);
    for (std::size_t j = 1; j < full.path.size(); ++j) {
      EXPECT_NEAR(full.path.jump(j), pair(x.jump_at(j), h.evaluate(j)), 1e-12);
    }
    EXPECT_LE(max_node_distance(full.path.decomposition().continuous_martingale,
                                integrate_grid(h, continuous_mart_part(x)).path), 1e-12);
    const double xi = -1.75;
    EXPECT_LE(max_node_distance(integrate_grid(scale(xi, h), x).path, xi * full.path), 1e-12);
  }
}

TEST(RiemannConvergence, ConstantIntegrandIsExact) {
  const NoiseModel m{GridSpec{1.0, 64}, {brownian(1.0), drift(1.0)}, kDefaultMaxJumps};
  std::vector<SeqSemimartingale> xs;
  std::vector<GridIntegrand> hs;
  std::vector<std::vector<RandomPartition>> parts;
  for (std::size_t s = 0; s < 4; ++s) {
    xs.push_back(SeqSemimartingale(generate_scenario(m, Ensemble{4, 1}, s)));
    hs.push_back(constant_integrand(xs.back().grid(), 2, FiniteSeq{{0, 1.0}, {1, 2.0}}));
    parts.push_back(partition_sequence(*xs.back().grid(), PartitionKind::Dyadic, 5));
  }
  const ConvergenceReport r = riemann_convergence(hs, xs, parts, 0.02, 1.25);
  for (double gap : r.gaps) EXPECT_LE(gap, 1e-14);
  EXPECT_TRUE(r.pass);
}

TEST(RiemannConvergence, DeterministicDriftHalves) {
  const GridPtr g = uniform_grid(1024);
  const std::vector<SeqSemimartingale> xs{SeqSemimartingale(std::vector<ScalarPath>{identity_path(g)})};
  const std::vector<GridIntegrand> hs{linear_in_t_integrand(g, 1, FiniteSeq::basis(0))};
  const std::vector<std::vector<RandomPartition>> parts{partition_sequence(*g, PartitionKind::Dyadic, 8)};
  const ConvergenceReport r = riemann_convergence(hs, xs, parts, 0.02, 1.25);
  for (std::size_t n = 1; n < r.gaps.size(); ++n) {
    const double ratio = r.gaps[n - 1] / r.gaps[n];
    EXPECT_GE(ratio, 1.6);
    EXPECT_LE(ratio, 2.4);
  }
  EXPECT_TRUE(r.pass);
}

TEST(Associativity, Examples) {
  const NoiseModel m = mixed_model(4, 64);
  const auto [x, y] = split<SeqSemimartingale, SeqPathPrimal>(generate_scenario(m, Ensemble{1, 9}, 0));
  const GridIntegrand h = left_limit_integrand(y);
  EXPECT_LE(associativity_residual(StepScalarProcess::constant(x.grid(), 1.0), h, x), 1e-12);
  EXPECT_EQ(associativity_residual(StepScalarProcess::constant(x.grid(), 0.0), h, x), 0.0);
  const StepScalarProcess g{x.grid(), {0, 7, 20, 41, x.grid()->size() - 1}, {2.0, -1.0, 0.0, 3.5}, 1.0};
  EXPECT_LE(associativity_residual(g, h, x), 1e-12);
}

TEST(Associativity, ThreeNodeHandComputation) {
  // Grid {0, 1/2, 1}; X = (0, 1, 3) with a jump of 1 at t = 1; H ≡ 2 on
  // the first cell, 5 on the second; g = 1 on (0, 1/2], -1 on (1/2, 1].
  // ∫H dX = (0, 2, 2 + 5·2) and g·∫H dX = (0, 2, 2 - 10) = ∫gH dX.
  const GridPtr g = uniform_grid(2);
  const SeqSemimartingale x(std::vector<ScalarPath>{ScalarPath(g, {0, 1, 2}, {0, 1, 3})});
  GridIntegrand h(g, 1);
  h.cell(0)[0] = 2.0;
  h.cell(1)[0] = 5.0;
  const ScalarPath z = integrate_grid(h, x).path;
  EXPECT_EQ(z.right(2), 12.0);
  const StepScalarProcess step{g, {0, 1, 2}, {1.0, -1.0}, 0.0};
  EXPECT_EQ(scalar_step_integral(step, z).right(2), -8.0);
  EXPECT_EQ(associativity_residual(step, h, x), 0.0);
}

TEST(GoodIntegrator, Examples) {
  const NoiseModel m{GridSpec{1.0, 128}, {brownian(1.0)}, kDefaultMaxJumps};
  std::vector<SeqSemimartingale> xs;
  std::vector<GridIntegrand> hs;
  for (std::size_t s = 0; s < 32; ++s) {
    xs.push_back(SeqSemimartingale(generate_scenario(m, Ensemble{32, 3}, s)));
    hs.push_back(constant_integrand(xs.back().grid(), 1, FiniteSeq::basis(0)));
  }
  const double zero[] = {0.0};
  EXPECT_EQ(good_integrator_diagnostic(xs, hs, zero).seminorms[0], 0.0);
  std::vector<double> eps;
  for (int n = 0; n < 10; ++n) eps.push_back(std::ldexp(1.0, -n));
  const GoodIntegratorReport r = good_integrator_diagnostic(xs, hs, eps);
  EXPECT_TRUE(r.pass);
  // Deep in the unclipped regime the seminorm is exactly linear in ε.
  EXPECT_NEAR(r.seminorms[9] / r.seminorms[8], 0.5, 1e-12);
}

TEST(GoodIntegrator, DeterministicScalesExactly) {
  const GridPtr g = uniform_grid(64);
  const std::vector<SeqSemimartingale> xs{SeqSemimartingale(std::vector<ScalarPath>{identity_path(g)})};
  const std::vector<GridIntegrand> hs{constant_integrand(g, 1, FiniteSeq::basis(0, 0.5))};
  const double eps[] = {1.0, 0.5, 0.25};
  const GoodIntegratorReport r = good_integrator_diagnostic(xs, hs, eps);
  EXPECT_NEAR(r.seminorms[1], 0.5 * r.seminorms[0], 1e-15);
  EXPECT_NEAR(r.seminorms[2], 0.25 * r.seminorms[0], 1e-15);
  EXPECT_TRUE(r.pass);
}
