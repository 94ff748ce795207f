#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cylint/grid_paths.hpp"
#include "cylint/rng.hpp"
#include "test_support.hpp"

using namespace cylint;
using cylint::testing::identity_path;
using cylint::testing::uniform_grid;

namespace {

std::vector<double> nodes_of(const GridPtr& g) { return {g->nodes().begin(), g->nodes().end()}; }

ScalarPath random_path(const GridPtr& g, std::uint64_t seed, bool jumps) {
  Rng rng(seed);
  std::vector<double> left(g->size()), right(g->size());
  double v = rng.normal();
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (i > 0) v += 0.1 * rng.normal();
    left[i] = v;
    if (jumps && i > 0 && rng.uniform() < 0.1) v += rng.normal();
    right[i] = v;
  }
  return ScalarPath(g, left, right);
}

}  // namespace

TEST(TimeGrid, UniformNodes) {
  EXPECT_EQ(nodes_of(TimeGrid::build(1.0, 4)), (std::vector<double>{0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(TimeGrid, MergesExtraTimes) {
  const double extra[] = {0.3};
  EXPECT_EQ(nodes_of(TimeGrid::build(1.0, 2, extra)), (std::vector<double>{0, 0.3, 0.5, 1.0}));
}

TEST(TimeGrid, DeduplicatesWithinTolerance) {
  const double extra[] = {0.5, 0.5 + 1e-13};
  EXPECT_EQ(nodes_of(TimeGrid::build(1.0, 2, extra)), (std::vector<double>{0, 0.5, 1.0}));
}

TEST(TimeGrid, RejectsBadInput) {
  EXPECT_THROW(TimeGrid::build(-1.0, 4), std::invalid_argument);
  EXPECT_THROW(TimeGrid::build(1.0, 0), std::invalid_argument);
  EXPECT_THROW(TimeGrid::build(NAN, 4), std::invalid_argument);
  const double outside[] = {1.5};
  EXPECT_THROW(TimeGrid::build(1.0, 4, outside), std::invalid_argument);
  const double nan[] = {NAN};
  EXPECT_THROW(TimeGrid::build(1.0, 4, nan), std::invalid_argument);
  EXPECT_THROW(TimeGrid::from_nodes({0.0, 0.5, 0.5}), std::invalid_argument);
}

TEST(TimeGrid, SnapAndFind) {
  const GridPtr g = uniform_grid(4);
  EXPECT_EQ(g->snap_up(0.3), 2u);
  EXPECT_EQ(g->snap_up(0.25), 1u);
  EXPECT_EQ(g->snap_up(2.0), g->size());
  EXPECT_EQ(g->last_at_or_before(0.3), 1u);
  EXPECT_TRUE(g->find(0.75).has_value());
  EXPECT_FALSE(g->find(0.7).has_value());
  EXPECT_TRUE(uniform_grid(8)->refines(*g));
  EXPECT_FALSE(g->refines(*uniform_grid(8)));
}

TEST(ScalarPath, DecompositionMustSum) {
  const GridPtr g = uniform_grid(4);
  const ScalarPath z = ScalarPath::continuous(g, {1, 2, 3, 4, 5});
  const ScalarPath zero = ScalarPath::constant(g, 0.0);
  const ScalarPath inc = ScalarPath::continuous(g, {0, 1, 2, 3, 4});
  EXPECT_NO_THROW(z.with_decomposition({zero, zero, inc}));
  EXPECT_THROW(z.with_decomposition({zero, zero, zero}), std::invalid_argument);
}

TEST(ScalarStepIntegral, ConstantOneTelescopes) {
  const GridPtr g = uniform_grid(16);
  const ScalarPath z = random_path(g, 3, true);
  const ScalarPath r = scalar_step_integral(StepScalarProcess::constant(g, 1.0), z);
  EXPECT_EQ(r.initial(), 0.0);
  for (std::size_t i = 0; i < g->size(); ++i) {
    EXPECT_NEAR(r.right(i), z.right(i) - z.initial(), 1e-12);
    EXPECT_NEAR(r.left(i), z.left(i) - z.initial(), 1e-12);
  }
}

TEST(ScalarStepIntegral, ZeroIntegrand) {
  const GridPtr g = uniform_grid(8);
  const ScalarPath r = scalar_step_integral(StepScalarProcess::constant(g, 0.0), random_path(g, 5, true));
  EXPECT_EQ(r.sup_abs(), 0.0);
}

TEST(ScalarStepIntegral, IndicatorAgainstTime) {
  const GridPtr g = uniform_grid(8);
  const ScalarPath z = identity_path(g);
  const ScalarPath r = scalar_step_integral(StepScalarProcess::indicator(g, 2, 6), z);
  const double a = 0.25, b = 0.75;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double t = (*g)[i];
    const double expected = t >= a ? std::min(t, b) - std::min(t, a) : 0.0;
    EXPECT_NEAR(r.right(i), expected, 1e-15);
  }
  // Decomposition is carried: the whole integral is finite variation.
  ASSERT_TRUE(r.has_decomposition());
  EXPECT_NEAR(max_node_distance(r.decomposition().finite_variation, r), 0.0, 1e-15);
}

TEST(ScalarStepIntegral, RejectsForeignGrid) {
  const GridPtr g = uniform_grid(8);
  EXPECT_THROW(scalar_step_integral(StepScalarProcess::constant(uniform_grid(4), 1.0), identity_path(g)),
               GridMismatch);
}

TEST(ScalarStepIntegral, Bilinear) {
  const GridPtr g = uniform_grid(32);
  const ScalarPath z1 = random_path(g, 11, true), z2 = random_path(g, 12, true);
  const StepScalarProcess h1{g, {0, 5, 17, 32}, {1.5, -2.0, 0.5}, 0.0};
  const StepScalarProcess h2{g, {0, 9, 20, 32}, {-1.0, 3.0, 2.0}, 0.0};
  // Sum of step processes on the common refinement of their breakpoints.
  const StepScalarProcess h12{g, {0, 5, 9, 17, 20, 32}, {2 * 1.5 - 3 * 1.0, 2 * -2.0 - 3 * 1.0, 2 * -2.0 + 3 * 3.0,
                                                          2 * 0.5 + 3 * 3.0, 2 * 0.5 + 3 * 2.0}, 0.0};
  const ScalarPath lhs = scalar_step_integral(h12, z1);
  const ScalarPath rhs = 2.0 * scalar_step_integral(h1, z1) + 3.0 * scalar_step_integral(h2, z1);
  EXPECT_LE(max_node_distance(lhs, rhs), 1e-12);
  const ScalarPath lhs2 = scalar_step_integral(h1, 2.0 * z1 + (-3.0) * z2);
  const ScalarPath rhs2 = 2.0 * scalar_step_integral(h1, z1) + (-3.0) * scalar_step_integral(h1, z2);
  EXPECT_LE(max_node_distance(lhs2, rhs2), 1e-12);
}

TEST(ScalarStepIntegral, StoppingCommutes) {
  const GridPtr g = uniform_grid(32);
  const ScalarPath z = random_path(g, 21, true);
  const StepScalarProcess h{g, {0, 4, 13, 25, 32}, {1.0, -2.0, 0.5, 3.0}, 0.0};
  for (std::size_t tau : {0u, 7u, 13u, 31u}) {
    const ScalarPath a = stop_path(scalar_step_integral(h, z), StoppingTime::at(tau));
    const ScalarPath b = scalar_step_integral(h, stop_path(z, StoppingTime::at(tau)));
    // h·1_[0,τ]: cut the breakpoints at τ.
    StepScalarProcess cut{g, {0}, {}, 0.0};
    for (std::size_t i = 0; i < h.coefficients.size(); ++i) {
      cut.breakpoints.push_back(std::min(h.breakpoints[i + 1], tau));
      cut.coefficients.push_back(h.coefficients[i]);
    }
    const ScalarPath c = scalar_step_integral(cut, z);
    EXPECT_LE(max_node_distance(a, b), 1e-12);
    EXPECT_LE(max_node_distance(a, c), 1e-12);
  }
}

TEST(StopPath, Examples) {
  const GridPtr g = uniform_grid(8);
  const ScalarPath z = identity_path(g);
  EXPECT_EQ(max_node_distance(stop_path(z, StoppingTime::never()), z), 0.0);
  const ScalarPath at0 = stop_path(z, StoppingTime::at(0));
  EXPECT_EQ(at0.sup_abs(), 0.0);
  const ScalarPath half = stop_path(z, deterministic_time(*g, 0.5));
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_DOUBLE_EQ(half.right(i), std::min((*g)[i], 0.5));
  ASSERT_TRUE(half.has_decomposition());
}

TEST(StopPath, KeepsJumpAtTau) {
  const GridPtr g = uniform_grid(4);
  const ScalarPath z(g, {0, 0, 0, 1, 1}, {0, 0, 1, 1, 1});
  const ScalarPath s = stop_path(z, StoppingTime::at(2));
  EXPECT_EQ(s.jump(2), 1.0);
  EXPECT_EQ(s.right(4), 1.0);
}

TEST(UcpSeminorm, Examples) {
  const GridPtr g = uniform_grid(8);
  const std::vector<ScalarPath> zero{ScalarPath::constant(g, 0.0)};
  EXPECT_EQ(ucp_seminorm(zero), 0.0);
  for (double c : {0.3, -0.7, 4.0}) {
    const std::vector<ScalarPath> k{ScalarPath::constant(g, c)};
    for (std::size_t n : {1u, 3u, 8u}) {
      EXPECT_NEAR(ucp_seminorm(k, n), std::min(1.0, std::abs(c)) * (1.0 - std::ldexp(1.0, -static_cast<int>(n))),
                  1e-15);
    }
  }
  EXPECT_THROW(ucp_seminorm(std::vector<ScalarPath>{}), std::invalid_argument);
}

TEST(UcpSeminorm, LevelsBeyondHorizonUseWholePath) {
  // Horizon 3: level 1 sees t <= 1, level 2 sees t <= 2, later levels all of it.
  const GridPtr g = uniform_grid(3, 3.0);
  const std::vector<ScalarPath> z{ScalarPath::continuous(g, {0.0, 0.1, 0.2, 0.5})};
  EXPECT_NEAR(ucp_seminorm(z, 3), 0.5 * 0.1 + 0.25 * 0.2 + 0.125 * 0.5, 1e-15);
}

TEST(UcpSeminorm, TriangleInequality) {
  const GridPtr g = uniform_grid(32);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<ScalarPath> a, b, ab;
    for (std::uint64_t s = 0; s < 5; ++s) {
      a.push_back(random_path(g, 100 * seed + s, true));
      b.push_back(random_path(g, 100 * seed + s + 50, true));
      ab.push_back(a.back() + b.back());
    }
    EXPECT_LE(ucp_seminorm(ab), ucp_seminorm(a) + ucp_seminorm(b) + 1e-12);
  }
}

TEST(EmeryEstimate, Examples) {
  const GridPtr g = uniform_grid(64);
  const std::vector<ScalarPath> zero{ScalarPath::constant(g, 0.0)};
  EXPECT_EQ(emery_estimate(zero, 4, 1), 0.0);
  // h ≡ 1 on z_t = t gives sup_{s<=min(n,1)} s = 1 at every level.
  const std::vector<ScalarPath> t{identity_path(g)};
  EXPECT_GE(emery_estimate(t, 4, 1), 1.0 - std::ldexp(1.0, -8) - 1e-12);
}

TEST(EmeryEstimate, MonotoneInTrialsAndAboveUcp) {
  const GridPtr g = uniform_grid(64);
  std::vector<ScalarPath> z;
  for (std::uint64_t s = 0; s < 4; ++s) {
    ScalarPath p = random_path(g, 40 + s, true);
    z.push_back(p - ScalarPath::constant(g, p.initial()));
  }
  double prev = 0.0;
  for (std::size_t k : {1u, 2u, 4u, 8u, 16u}) {
    const double e = emery_estimate(z, k, 77);
    EXPECT_GE(e, prev);
    prev = e;
  }
  EXPECT_GE(emery_estimate(z, 1, 77), ucp_seminorm(z) - 1e-12);
}

TEST(Combine, IdentityAndCancellation) {
  const GridPtr g = uniform_grid(16);
  const ScalarPath z = identity_path(g);
  const std::pair<double, ScalarPath> one[] = {{1.0, z}};
  EXPECT_EQ(max_node_distance(combine(one), z), 0.0);
  const std::pair<double, ScalarPath> cancel[] = {{1.0, z}, {-1.0, z}};
  EXPECT_EQ(combine(cancel).sup_abs(), 0.0);
}

TEST(Combine, RejectsGridMismatch) {
  const std::pair<double, ScalarPath> terms[] = {{1.0, ScalarPath::constant(uniform_grid(4), 1.0)},
                                                 {1.0, ScalarPath::constant(uniform_grid(8), 1.0)}};
  EXPECT_THROW(combine(terms), GridMismatch);
}

TEST(RestrictTo, KeepsNodeValues) {
  const GridPtr fine = uniform_grid(16);
  const GridPtr coarse = uniform_grid(4);
  const ScalarPath z = random_path(fine, 8, false);
  const ScalarPath r = restrict_to(z, coarse);
  for (std::size_t i = 0; i < coarse->size(); ++i) EXPECT_EQ(r.right(i), z.right(4 * i));
  EXPECT_THROW(restrict_to(r, fine), GridMismatch);
}
