#pragma once

// Event grids, càdlàg scalar paths, scalar step integrals and the ucp/Emery
// seminorm estimators.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cylint {

/// Absolute tolerance used to identify two grid times.
inline constexpr double kTimeTolerance = 1e-12;

/// Monte Carlo carrier: scenario s draws from streams derived from
/// (master_seed, s), so any scenario can be regenerated on its own.
struct Ensemble {
  std::size_t scenario_count = 1;
  std::uint64_t master_seed = 0;

  std::uint64_t scenario_seed(std::size_t scenario) const;
};

/// Two paths or processes that must share an event grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Strictly increasing nodes 0 = t_0 < ... < t_M = horizon.
class TimeGrid {
 public:
  /// Uniform nodes of spacing horizon/base_steps merged with extra_times,
  /// deduplicated within kTimeTolerance.
  static std::shared_ptr<const TimeGrid> build(double horizon, std::size_t base_steps,
                                               std::span<const double> extra_times = {});
  /// Validates and adopts an explicit node list.
  static std::shared_ptr<const TimeGrid> from_nodes(std::vector<double> nodes);

  double horizon() const { return nodes_.back(); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t cells() const { return nodes_.size() - 1; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }
  double spacing(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
  double max_spacing() const;

  /// Index of the node equal to t within tolerance, if any.
  std::optional<std::size_t> find(double t) const;
  /// Smallest index with t_i >= t (within tolerance); size() when t is past
  /// the horizon.
  std::size_t snap_up(double t) const;
  /// Last index with t_i <= t (within tolerance); t must be >= 0.
  std::size_t last_at_or_before(double t) const;

  bool same_nodes(const TimeGrid& other) const { return nodes_ == other.nodes_; }
  /// True when every node of `coarse` is a node of this grid.
  bool refines(const TimeGrid& coarse) const;

 private:
  explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

bool same_grid(const GridPtr& a, const GridPtr& b);
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* context);

/// A grid-snapped stopping time: a node index or +infinity.
struct StoppingTime {
  static constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

  std::size_t node = kNever;

  static StoppingTime at(std::size_t node) { return StoppingTime{node}; }
  static StoppingTime never() { return StoppingTime{}; }
  bool finite() const { return node != kNever; }
  /// min(τ, last) as a node index.
  std::size_t clamp(std::size_t last) const { return node < last ? node : last; }

  friend bool operator==(StoppingTime, StoppingTime) = default;
};

/// Deterministic time t snapped up to the next node (+inf past the horizon).
StoppingTime deterministic_time(const TimeGrid& grid, double t);

struct Decomposition;

/// Càdlàg scalar path known at grid nodes. left(i) is z_{t_i-} (equal to z_0
/// at i = 0), right(i) is z_{t_i}. A jump at t_i is left(i) != right(i).
class ScalarPath {
 public:
  ScalarPath() = default;
  ScalarPath(GridPtr grid, std::vector<double> left, std::vector<double> right);

  static ScalarPath constant(GridPtr grid, double value);
  /// Path with no jumps.
  static ScalarPath continuous(GridPtr grid, std::vector<double> values);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return right_.size(); }

  double left(std::size_t i) const { return left_[i]; }
  double right(std::size_t i) const { return right_[i]; }
  double value(std::size_t i) const { return right_[i]; }
  double jump(std::size_t i) const { return right_[i] - left_[i]; }
  double initial() const { return right_.front(); }
  double terminal() const { return right_.back(); }
  std::span<const double> lefts() const { return left_; }
  std::span<const double> rights() const { return right_; }
  bool has_jumps() const;

  bool has_decomposition() const { return static_cast<bool>(parts_); }
  /// Requires has_decomposition().
  const Decomposition& decomposition() const;
  /// Attaches z - z_0 = cont_mart + jump_mart + fv; checks part grids, zero
  /// initial values and the node-wise sum (relative tolerance 1e-9).
  ScalarPath with_decomposition(Decomposition parts) const;
  ScalarPath without_decomposition() const;

  /// max |z| over left and right values of nodes 0..last.
  double sup_abs(std::size_t last) const;
  double sup_abs() const { return sup_abs(size() - 1); }

 private:
  GridPtr grid_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::shared_ptr<const Decomposition> parts_;
};

/// Semimartingale decomposition of z - z_0. The martingale part is split into
/// its continuous and purely discontinuous pieces.
struct Decomposition {
  ScalarPath continuous_martingale;
  ScalarPath jump_martingale;
  ScalarPath finite_variation;

  ScalarPath martingale() const;
};

/// Node-wise linear combination Σ c_k z_k on a shared grid. The result has a
/// decomposition when every term has one.
ScalarPath combine(std::span<const std::pair<double, ScalarPath>> terms);
ScalarPath operator+(const ScalarPath& a, const ScalarPath& b);
ScalarPath operator-(const ScalarPath& a, const ScalarPath& b);
ScalarPath operator*(double c, const ScalarPath& z);

/// Largest node-wise |a - b| over left and right values.
double max_node_distance(const ScalarPath& a, const ScalarPath& b);

/// z restricted to a coarser grid whose nodes are a subset of z's nodes.
ScalarPath restrict_to(const ScalarPath& z, const GridPtr& coarse);

/// Bounded predictable step process
///   h = value_at_zero 1_{0} + Σ_i a_i 1_(u_i, u_{i+1}]
/// with breakpoints u_0 = 0 <= u_1 <= ... <= u_n given as node indices.
struct StepScalarProcess {
  GridPtr grid;
  std::vector<std::size_t> breakpoints;
  std::vector<double> coefficients;
  double value_at_zero = 0.0;

  static StepScalarProcess constant(GridPtr grid, double a);
  /// 1_(t_a, t_b] for node indices a <= b.
  static StepScalarProcess indicator(GridPtr grid, std::size_t a, std::size_t b);

  void validate() const;
  double bound() const;
  /// c[j] = value of h on the cell (t_{j-1}, t_j] for j >= 1; c[0] is the
  /// value at time 0.
  std::vector<double> cell_values() const;
};

/// (h · z)_t = Σ_i a_i (z_{u_{i+1}∧t} - z_{u_i∧t}); starts at 0 and carries
/// (h·m^c, h·m^d, h·a) when z has a decomposition.
ScalarPath scalar_step_integral(const StepScalarProcess& h, const ScalarPath& z);

/// z^τ: frozen at z_τ after τ (the jump at τ itself is kept).
ScalarPath stop_path(const ScalarPath& z, StoppingTime tau);

inline constexpr std::size_t kDefaultUcpLevels = 8;

/// Σ_{n=1}^{N} 2^-n · mean_s(1 ∧ sup_{t <= min(n,T)} |z_t|) over the ensemble.
double ucp_seminorm(std::span<const ScalarPath> paths, std::size_t levels = kDefaultUcpLevels);

/// Lower-bound estimate of the Emery seminorm: the maximum of
/// ucp_seminorm(h · z) over h ≡ 1 and `trial_count` random step processes
/// with coefficients ±1 chosen from the sign of z at each breakpoint. Trial
/// k draws from its own stream derived from trial_seed, so the estimate is
/// nondecreasing in trial_count.
double emery_estimate(std::span<const ScalarPath> paths, std::size_t trial_count,
                      std::uint64_t trial_seed, std::size_t levels = kDefaultUcpLevels);

/// The k-th random ℰ₁ element used by emery_estimate, realized on z's grid.
StepScalarProcess emery_trial(const ScalarPath& z, std::uint64_t trial_seed, std::size_t k);

}  // namespace cylint
