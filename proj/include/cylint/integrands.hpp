#pragma once

// Integrand hierarchy for one scenario: elementary sums h ⊗ φ, simple
// predictable step integrands with stopping-time breakpoints, and general
// grid integrands. Random partitions, sampling and localization live here.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cylint/cylsemi.hpp"
#include "cylint/grid_paths.hpp"

namespace cylint {

/// A predictable ⊕ℝ-valued process discretized on the grid.
///
/// cell(i) is the value used on (t_i, t_{i+1}]: it is known at t_i and is
/// what multiplies the continuous increment of X over the cell. at(j) is the
/// left-continuous value H_{t_j} that multiplies a jump of X at t_j; unless
/// set explicitly it equals cell(j - 1). initial() is H_0, the value on {0}.
class GridIntegrand {
 public:
  GridIntegrand() = default;
  /// The zero integrand.
  GridIntegrand(GridPtr grid, std::size_t dimension);

  const GridPtr& grid() const { return grid_; }
  std::size_t dimension() const { return dim_; }
  std::size_t cells() const { return grid_->cells(); }

  std::span<const double> cell(std::size_t i) const { return {cell_.data() + i * dim_, dim_}; }
  std::span<double> cell(std::size_t i) { return {cell_.data() + i * dim_, dim_}; }
  bool has_jump_values() const { return !at_.empty(); }
  /// Value paired with the jump of X at node j >= 1.
  std::span<const double> at(std::size_t j) const;
  /// Switches to explicit jump values (copied from the cells) and returns
  /// the writable row for node j >= 1.
  std::span<double> at_mut(std::size_t j);
  std::span<const double> initial() const { return initial_; }
  std::span<double> initial() { return initial_; }

  /// The left-continuous value H_{t_i} as a FiniteSeq (initial() at i = 0).
  FiniteSeq evaluate(std::size_t i) const;
  bool all_finite() const;

 private:
  GridPtr grid_;
  std::size_t dim_ = 0;
  std::vector<double> cell_;
  std::vector<double> at_;
  std::vector<double> initial_;
};

/// H = A_0' 1_{0} + Σ_{k=0}^{N} A_k 1_(τ_k, τ_{k+1}] with node-index stop
/// times τ_0 = 0 <= … <= τ_{N+1} and A_0' = at_zero.
struct SimplePredictableIntegrand {
  GridPtr grid;
  std::size_t dimension = 0;
  std::vector<std::size_t> stop_times;
  std::vector<FiniteSeq> coefficients;
  FiniteSeq at_zero;

  void validate() const;
};

/// Σ_k h_k ⊗ φ_k.
struct ElementaryIntegrand {
  std::vector<std::pair<StepScalarProcess, FiniteSeq>> terms;
};

/// 0 = τ_0 <= τ_1 <= … <= τ_{m+1} as node indices.
struct RandomPartition {
  std::vector<std::size_t> nodes;

  /// Largest τ_{k+1} - τ_k in time.
  double mesh(const TimeGrid& grid) const;
};

/// Per-coordinate weights of the seminorm p(φ) = max_j w_j |a_j|.
using Weights = std::vector<double>;

/// p applied to a dense row; missing weights count as 1.
double weighted_norm(std::span<const double> row, std::span<const double> weights);

/// H^σ = H_0 1_{0} + Σ_{k=0}^{m} H_{τ_k} 1_(τ_k, τ_{k+1}], zero after τ_{m+1}.
/// H_{τ_k} is the cell value at τ_k (what H uses right after τ_k).
SimplePredictableIntegrand sample_at(const GridIntegrand& h, const RandomPartition& sigma);

GridIntegrand to_grid(const SimplePredictableIntegrand& h);
GridIntegrand to_grid(const ElementaryIntegrand& h, std::size_t dimension);

/// The full-grid partition {t_0, …, t_M}.
RandomPartition full_partition(const TimeGrid& grid);

/// First node i whose cell value has p(cell(i)) > level, or never.
StoppingTime hitting_time(const GridIntegrand& h, double level, std::span<const double> weights);

/// τ_n = first node where p(cell) > level_n or t >= level_n.
std::vector<StoppingTime> localize(const GridIntegrand& h, std::span<const double> levels,
                                   std::span<const double> weights);

/// Exact max over scenarios and nodes of p(H), including H_0 and jump values.
double sup_seminorm(std::span<const GridIntegrand> hs, std::span<const double> weights);
double sup_seminorm(std::span<const SimplePredictableIntegrand> hs, std::span<const double> weights);

/// H = Y_-: cell(i) = Y_{t_i}, at(j) = Y_{t_j-}, H_0 = Y_0.
GridIntegrand left_limit_integrand(const CoordinatePaths& y);

/// H ≡ φ (including H_0 = φ).
GridIntegrand constant_integrand(const GridPtr& grid, std::size_t dimension, const FiniteSeq& phi);
/// H_t = t·φ sampled at the left end of each cell.
GridIntegrand linear_in_t_integrand(const GridPtr& grid, std::size_t dimension, const FiniteSeq& phi);

/// H·1_[0,τ].
GridIntegrand truncate(const GridIntegrand& h, StoppingTime tau);
/// g·H for a scalar step process g.
GridIntegrand multiply(const StepScalarProcess& g, const GridIntegrand& h);
GridIntegrand scale(double c, const GridIntegrand& h);
/// Σ c_k H_k on a shared grid and dimension.
GridIntegrand combine_integrands(std::span<const std::pair<double, GridIntegrand>> terms);

enum class PartitionKind { Dyadic, Jittered };

/// Levels k = 1..n_levels: dyadic times i·T/2^k (jittered: each interior
/// time moved by less than half a spacing), snapped up to grid nodes.
std::vector<RandomPartition> partition_sequence(const TimeGrid& grid, PartitionKind kind,
                                                std::size_t n_levels, std::uint64_t seed = 0);

}  // namespace cylint
