#pragma once

// Shared fixtures: small grids, hand-built paths and seeded noise ensembles.

#include <cmath>
#include <vector>

#include "cylint/cylsemi.hpp"
#include "cylint/grid_paths.hpp"
#include "cylint/noise.hpp"

namespace cylint::testing {

inline GridPtr uniform_grid(std::size_t steps, double horizon = 1.0) {
  return TimeGrid::build(horizon, steps);
}

/// z_t = t on the grid, as a drift path with decomposition.
inline ScalarPath identity_path(const GridPtr& g) {
  return gen_drift(g, DriftSpec{{{g->horizon(), 1.0}}});
}

inline NoiseSpec brownian(double vol, double x0 = 0.0) { return NoiseSpec{BrownianSpec{vol}, x0}; }

inline NoiseSpec poisson(double rate, double mean, double sd = 0.0, bool compensated = true, double x0 = 0.0) {
  JumpLaw law{sd > 0.0 ? JumpLaw::Kind::Gaussian : JumpLaw::Kind::Constant, sd};
  return NoiseSpec{CompoundPoissonSpec{rate, mean, law, compensated}, x0};
}

inline NoiseSpec drift(double rate, double x0 = 0.0, double horizon = 1.0) {
  return NoiseSpec{DriftSpec{{{horizon, rate}}}, x0};
}

/// Brownian, compensated Poisson and drift coordinates cycled over d.
inline NoiseModel mixed_model(std::size_t d, std::size_t steps, double horizon = 1.0) {
  NoiseModel m{GridSpec{horizon, steps}, {}, kDefaultMaxJumps};
  for (std::size_t k = 0; k < d; ++k) {
    switch (k % 3) {
      case 0: m.coordinates.push_back(brownian(1.0 + 0.1 * k, 0.2 * k)); break;
      case 1: m.coordinates.push_back(poisson(3.0, 0.5, 0.3, true, -0.1)); break;
      default: m.coordinates.push_back(drift(0.7 - 0.2 * k, 0.5, horizon)); break;
    }
  }
  return m;
}

inline SeqSemimartingale scenario(const NoiseModel& m, std::uint64_t seed, std::size_t s = 0) {
  return SeqSemimartingale(generate_scenario(m, Ensemble{1, seed}, s));
}

/// Splits a 2d-coordinate scenario into two d-dimensional processes on the
/// same grid.
template <class A, class B>
std::pair<A, B> split(const std::vector<ScalarPath>& paths) {
  const std::size_t d = paths.size() / 2;
  return {A(std::vector<ScalarPath>(paths.begin(), paths.begin() + d)),
          B(std::vector<ScalarPath>(paths.begin() + d, paths.end()))};
}

inline double max_abs_diff(const ScalarPath& a, const ScalarPath& b) { return max_node_distance(a, b); }

}  // namespace cylint::testing
