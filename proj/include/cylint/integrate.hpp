#pragma once

// ∫ H dX for the three integrand kinds, Riemann convergence over random
// partitions, associativity and the good-integrator diagnostic.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylint/cylsemi.hpp"
#include "cylint/integrands.hpp"

namespace cylint {

enum class IntegrandKind { Elementary, Simple, Grid };

const char* to_string(IntegrandKind kind);

/// path starts at 0; the pairing <X_0, H_0> is kept apart in
/// value_at_zero_term. path carries a decomposition when X does.
struct IntegralResult {
  ScalarPath path;
  double value_at_zero_term = 0.0;
  IntegrandKind integrand_kind = IntegrandKind::Grid;
  std::optional<RandomPartition> partition_used;

  /// path + value_at_zero_term: the convention where the integral at 0
  /// carries <X_0, H_0>.
  ScalarPath with_value_at_zero() const;
};

/// Closed form <X_0, A_0'> + Σ_k <X_{τ_{k+1}∧t} - X_{τ_k∧t}, A_k>.
IntegralResult integrate_simple(const SimplePredictableIntegrand& h, const CoordinatePaths& x);

/// Σ_k h_k · X(φ_k).
IntegralResult integrate_elementary(const ElementaryIntegrand& h, const CoordinatePaths& x);

/// Left-point sum on the full grid: over the cell (t_{j-1}, t_j] the
/// continuous increment pairs with cell(j-1) and the jump at t_j with at(j).
IntegralResult integrate_grid(const GridIntegrand& h, const CoordinatePaths& x);

struct ConvergenceReport {
  std::vector<double> gaps;
  double threshold = 0.0;
  double slack = 0.0;
  bool monotone = false;
  bool below_threshold = false;
  bool pass = false;
};

/// Per-level ucp distance between ∫H^{σ_n} dX and ∫H dX. partitions is
/// indexed [scenario][level]; nonincreasing means gap_{n+1} <= slack·gap_n.
ConvergenceReport riemann_convergence(std::span<const GridIntegrand> h,
                                      std::span<const SeqSemimartingale> x,
                                      std::span<const std::vector<RandomPartition>> partitions,
                                      double threshold, double slack,
                                      std::size_t ucp_levels = kDefaultUcpLevels);

/// Shared pass rule for per-level gap sequences.
void judge_gaps(ConvergenceReport& report);

/// sup over nodes of |g·(∫H dX) - ∫(gH) dX|.
double associativity_residual(const StepScalarProcess& g, const GridIntegrand& h, const CoordinatePaths& x);

struct GoodIntegratorReport {
  std::vector<double> eps;
  std::vector<double> seminorms;
  /// Seminorm at ε = 1, with the clipping 1 ∧ · removed (so v_n ≈ ε_n·base).
  double base = 0.0;
  bool pass = false;
};

/// ucp seminorm of ∫ ε_n H dX per n. Passes when the values are
/// nonincreasing and, wherever ε_n keeps every path below the clipping
/// level 1, v_n / (ε_n · v_1-unclipped) lies in [1/2, 2].
GoodIntegratorReport good_integrator_diagnostic(std::span<const SeqSemimartingale> x,
                                                std::span<const GridIntegrand> h_base,
                                                std::span<const double> eps,
                                                std::size_t ucp_levels = kDefaultUcpLevels);

/// Σ 2^-n mean(sup_{t <= min(n,T)} |z_t|) without the 1 ∧ · clipping.
double unclipped_ucp(std::span<const ScalarPath> paths, std::size_t levels = kDefaultUcpLevels);

}  // namespace cylint
