#pragma once

// Seeded coordinate semimartingales with analytically supplied
// decompositions: Brownian motion, compound Poisson and piecewise-constant
// drift. `combine` (grid_paths.hpp) forms linear combinations.

#include <cstdint>
#include <variant>
#include <vector>

#include "cylint/grid_paths.hpp"

namespace cylint {

struct GridSpec {
  double horizon = 1.0;
  std::size_t base_steps = 1024;
};

struct BrownianSpec {
  double vol = 1.0;
};

struct JumpLaw {
  enum class Kind { Constant, Gaussian };
  Kind kind = Kind::Constant;
  double sd = 0.0;
};

struct CompoundPoissonSpec {
  double rate = 0.0;
  double jump_mean = 1.0;
  JumpLaw jump_law;
  bool compensated = true;

  /// E[J^2] for the configured jump law.
  double second_moment() const;
};

/// rate(s) = segment.rate on (previous until, until]; 0 after the last one.
struct RateSegment {
  double until = 0.0;
  double rate = 0.0;
};

struct DriftSpec {
  std::vector<RateSegment> rate_function;

  /// Exact ∫_0^t rate(s) ds.
  double integral(double t) const;
};

struct NoiseSpec {
  std::variant<BrownianSpec, CompoundPoissonSpec, DriftSpec> kind;
  double initial_value = 0.0;

  /// Throws std::invalid_argument for negative vol/rate, non-finite values
  /// or rate breakpoints outside (0, horizon].
  void validate(double horizon) const;
  bool has_jumps() const;
  /// E[[Z,Z]_t] excluding the initial value: σ²t + λE[J²]t.
  double expected_quadratic_variation(double t) const;
};

inline constexpr std::size_t kDefaultMaxJumps = 1'000'000;

ScalarPath gen_brownian(const GridPtr& grid, std::uint64_t seed, double vol,
                        double initial_value = 0.0);

struct JumpDraw {
  std::vector<double> times;
  std::vector<double> sizes;
};

/// Jump times of a rate-λ Poisson stream on (0, horizon] and their sizes.
/// Throws std::runtime_error when more than max_jumps would be produced.
JumpDraw draw_jumps(double horizon, std::uint64_t seed, const CompoundPoissonSpec& spec,
                    std::size_t max_jumps = kDefaultMaxJumps);

/// Piecewise-constant path with the drawn jumps; every jump time must be a
/// node of `grid`.
ScalarPath compound_poisson_path(const GridPtr& grid, const JumpDraw& jumps,
                                 const CompoundPoissonSpec& spec, double initial_value = 0.0);

struct PoissonSample {
  ScalarPath path;
  std::vector<double> jump_times;
};

/// Draws the jumps, fuses them into the uniform grid and builds the path.
PoissonSample gen_compound_poisson(const GridSpec& grid, std::uint64_t seed,
                                   const CompoundPoissonSpec& spec, double initial_value = 0.0,
                                   std::size_t max_jumps = kDefaultMaxJumps);

ScalarPath gen_drift(const GridPtr& grid, const DriftSpec& spec, double initial_value = 0.0);

/// Coordinate noises of one experiment.
struct NoiseModel {
  GridSpec grid;
  std::vector<NoiseSpec> coordinates;
  std::size_t max_jumps = kDefaultMaxJumps;

  void validate() const;
};

/// Scenario `scenario` of an ensemble: jump times of every coordinate are
/// drawn first and fused into one grid, then each coordinate is realized on
/// that grid. `stream` separates independent draws for the same scenario.
std::vector<ScalarPath> generate_scenario(const NoiseModel& model, const Ensemble& ensemble,
                                          std::size_t scenario, std::uint64_t stream = 0);

/// Same as generate_scenario with an extra refinement factor on base_steps;
/// used to realize one path at two resolutions (restrict_to coarsens it).
std::vector<ScalarPath> generate_scenario_refined(const NoiseModel& model, const Ensemble& ensemble,
                                                  std::size_t scenario, std::size_t refine,
                                                  std::uint64_t stream = 0);

}  // namespace cylint
