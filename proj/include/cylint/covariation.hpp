#pragma once

// Quadratic covariation [X, Y] of a dual/primal pair, its partition-sum
// approximations, the jump and stopping identities, and the stochastic
// Fubini check on a finite measure space.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylint/cylsemi.hpp"
#include "cylint/integrands.hpp"
#include "cylint/integrate.hpp"

namespace cylint {

/// [X,Y]_t = <X_t,Y_t> - ∫_0^t Y_- dX - ∫_0^t X_- dY with both integrals
/// started at 0, so [X,Y]_0 = <X_0,Y_0>.
ScalarPath bracket_residual(const CoordinatePaths& x, const CoordinatePaths& y);

/// <X_0,Y_0> + Σ_k <X_{τ_{k+1}∧t} - X_{τ_k∧t}, Y_{τ_{k+1}∧t} - Y_{τ_k∧t}>.
ScalarPath bracket_partition_sum(const CoordinatePaths& x, const CoordinatePaths& y,
                                 const RandomPartition& sigma);

struct BracketResult {
  std::vector<ScalarPath> residual_paths;                 // [scenario]
  std::vector<std::vector<ScalarPath>> partition_paths;   // [level][scenario]
  ConvergenceReport convergence;                          // gaps per level
};

/// partitions is indexed [scenario][level].
BracketResult bracket_partition(std::span<const SeqSemimartingale> x, std::span<const SeqPathPrimal> y,
                                std::span<const std::vector<RandomPartition>> partitions,
                                double threshold, double slack,
                                std::size_t ucp_levels = kDefaultUcpLevels);

struct BracketProperties {
  double at_zero_deviation = 0.0;   // |[X,Y]_0 - <X_0,Y_0>|
  double jump_deviation = 0.0;      // max_t |Δ[X,Y]_t - <ΔX_t,ΔY_t>|
  double stop_x_deviation = 0.0;    // [X^τ,Y]   vs [X,Y]^τ
  double stop_y_deviation = 0.0;    // [X,Y^τ]   vs [X,Y]^τ
  double stop_xy_deviation = 0.0;   // [X^τ,Y^τ] vs [X,Y]^τ
  double stop_cross_deviation = 0.0;  // [X^τ,Y] vs [X,Y^τ]
  /// max_{t>0} |Δ[X,Y]_t| when X or Y has no jumps.
  std::optional<double> continuity_deviation;

  double max_deviation() const;
};

BracketProperties bracket_properties_check(const CoordinatePaths& x, const CoordinatePaths& y,
                                           StoppingTime tau);

/// (E, ϱ) with finitely many atoms.
struct FiniteMeasureSpace {
  std::vector<std::string> points;
  std::vector<double> weights;

  void validate() const;
  double total_mass() const;
};

struct FubiniResult {
  ScalarPath lhs;  // Σ_i ϱ_i ∫ H(e_i) dX
  ScalarPath rhs;  // ∫ (Σ_i ϱ_i H(e_i)) dX
  double deviation = 0.0;
};

/// family[i] is H(e_i) on X's grid.
FubiniResult fubini_check(std::span<const GridIntegrand> family, const FiniteMeasureSpace& space,
                          const CoordinatePaths& x);

}  // namespace cylint
