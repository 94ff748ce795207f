#include "cylint/grid_paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cylint/rng.hpp"

namespace cylint {

namespace {

void require_finite(double t, const char* what) {
  if (!std::isfinite(t)) throw std::invalid_argument(std::string(what) + " is not finite");
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

std::uint64_t Ensemble::scenario_seed(std::size_t scenario) const {
  return derive_seed(master_seed, scenario);
}

// ---------------------------------------------------------------- TimeGrid

std::shared_ptr<const TimeGrid> TimeGrid::build(double horizon, std::size_t base_steps,
                                                std::span<const double> extra_times) {
  require_finite(horizon, "horizon");
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be positive");
  if (base_steps == 0) throw std::invalid_argument("base_steps must be at least 1");

  std::vector<double> nodes;
  nodes.reserve(base_steps + 1 + extra_times.size());
  for (std::size_t i = 0; i <= base_steps; ++i) {
    nodes.push_back(i == base_steps ? horizon
                                    : horizon * static_cast<double>(i) / static_cast<double>(base_steps));
  }
  for (double t : extra_times) {
    require_finite(t, "extra time");
    if (t < -kTimeTolerance || t > horizon + kTimeTolerance) {
      throw std::invalid_argument("extra time " + std::to_string(t) + " outside [0, horizon]");
    }
    nodes.push_back(std::clamp(t, 0.0, horizon));
  }
  std::sort(nodes.begin(), nodes.end());

  // Keep the first of each cluster, except that 0 and the horizon win.
  std::vector<double> merged;
  merged.reserve(nodes.size());
  for (double t : nodes) {
    if (!merged.empty() && t - merged.back() <= kTimeTolerance) continue;
    merged.push_back(t);
  }
  if (horizon - merged.back() <= kTimeTolerance) merged.back() = horizon;
  return std::shared_ptr<const TimeGrid>(new TimeGrid(std::move(merged)));
}

std::shared_ptr<const TimeGrid> TimeGrid::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("a grid needs at least two nodes");
  if (nodes.front() != 0.0) throw std::invalid_argument("first grid node must be 0");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require_finite(nodes[i], "grid node");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw std::invalid_argument("grid nodes must be strictly increasing");
    }
  }
  return std::shared_ptr<const TimeGrid>(new TimeGrid(std::move(nodes)));
}

double TimeGrid::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) h = std::max(h, spacing(i));
  return h;
}

std::optional<std::size_t> TimeGrid::find(double t) const {
  const std::size_t i = snap_up(t);
  if (i < nodes_.size() && std::abs(nodes_[i] - t) <= kTimeTolerance) return i;
  return std::nullopt;
}

std::size_t TimeGrid::snap_up(double t) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - kTimeTolerance);
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t TimeGrid::last_at_or_before(double t) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t + kTimeTolerance);
  if (it == nodes_.begin()) throw std::invalid_argument("time before the grid start");
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

bool TimeGrid::refines(const TimeGrid& coarse) const {
  for (double t : coarse.nodes_) {
    if (!find(t)) return false;
  }
  return true;
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b) return false;
  return a == b || a->same_nodes(*b);
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* context) {
  if (!same_grid(a, b)) throw GridMismatch(std::string(context) + ": grids differ");
}

StoppingTime deterministic_time(const TimeGrid& grid, double t) {
  require_finite(t, "stopping time");
  if (t < 0.0) throw std::invalid_argument("stopping time must be nonnegative");
  const std::size_t i = grid.snap_up(t);
  return i < grid.size() ? StoppingTime::at(i) : StoppingTime::never();
}

// -------------------------------------------------------------- ScalarPath

ScalarPath::ScalarPath(GridPtr grid, std::vector<double> left, std::vector<double> right)
    : grid_(std::move(grid)), left_(std::move(left)), right_(std::move(right)) {
  if (!grid_) throw std::invalid_argument("path without grid");
  if (left_.size() != grid_->size() || right_.size() != grid_->size()) {
    throw std::invalid_argument("path length does not match its grid");
  }
  left_.front() = right_.front();
}

ScalarPath ScalarPath::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return ScalarPath(std::move(grid), std::vector<double>(n, value), std::vector<double>(n, value));
}

ScalarPath ScalarPath::continuous(GridPtr grid, std::vector<double> values) {
  std::vector<double> left = values;
  return ScalarPath(std::move(grid), std::move(left), std::move(values));
}

bool ScalarPath::has_jumps() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (left_[i] != right_[i]) return true;
  }
  return false;
}

const Decomposition& ScalarPath::decomposition() const {
  if (!parts_) throw std::logic_error("path carries no decomposition");
  return *parts_;
}

ScalarPath ScalarPath::with_decomposition(Decomposition parts) const {
  const ScalarPath* pieces[] = {&parts.continuous_martingale, &parts.jump_martingale,
                                &parts.finite_variation};
  for (const ScalarPath* p : pieces) {
    require_same_grid(grid_, p->grid(), "decomposition");
    if (p->initial() != 0.0) throw std::invalid_argument("decomposition parts must start at 0");
  }
  const double z0 = initial();
  for (std::size_t i = 0; i < size(); ++i) {
    const double r = z0 + pieces[0]->right(i) + pieces[1]->right(i) + pieces[2]->right(i);
    const double l = z0 + pieces[0]->left(i) + pieces[1]->left(i) + pieces[2]->left(i);
    if (!close(r, right_[i], 1e-9) || !close(l, left_[i], 1e-9)) {
      throw std::invalid_argument("decomposition parts do not add up to the path");
    }
  }
  ScalarPath out = without_decomposition();
  for (ScalarPath* p : {&parts.continuous_martingale, &parts.jump_martingale, &parts.finite_variation}) {
    p->parts_.reset();
  }
  out.parts_ = std::make_shared<const Decomposition>(std::move(parts));
  return out;
}

ScalarPath ScalarPath::without_decomposition() const {
  ScalarPath out = *this;
  out.parts_.reset();
  return out;
}

double ScalarPath::sup_abs(std::size_t last) const {
  double s = 0.0;
  for (std::size_t i = 0; i <= last && i < size(); ++i) {
    s = std::max({s, std::abs(left_[i]), std::abs(right_[i])});
  }
  return s;
}

ScalarPath Decomposition::martingale() const { return continuous_martingale + jump_martingale; }

// ------------------------------------------------------------ arithmetic

ScalarPath combine(std::span<const std::pair<double, ScalarPath>> terms) {
  if (terms.empty()) throw std::invalid_argument("combine needs at least one term");
  const GridPtr& grid = terms.front().second.grid();
  bool all_parts = true;
  for (const auto& [c, z] : terms) {
    require_same_grid(grid, z.grid(), "combine");
    all_parts = all_parts && z.has_decomposition();
  }
  const std::size_t n = grid->size();
  std::vector<double> left(n, 0.0), right(n, 0.0);
  for (const auto& [c, z] : terms) {
    for (std::size_t i = 0; i < n; ++i) {
      left[i] += c * z.left(i);
      right[i] += c * z.right(i);
    }
  }
  ScalarPath out(grid, std::move(left), std::move(right));
  if (!all_parts) return out;

  std::vector<std::pair<double, ScalarPath>> cm, jm, fv;
  for (const auto& [c, z] : terms) {
    cm.emplace_back(c, z.decomposition().continuous_martingale);
    jm.emplace_back(c, z.decomposition().jump_martingale);
    fv.emplace_back(c, z.decomposition().finite_variation);
  }
  return out.with_decomposition({combine(cm), combine(jm), combine(fv)});
}

ScalarPath operator+(const ScalarPath& a, const ScalarPath& b) {
  const std::pair<double, ScalarPath> terms[] = {{1.0, a}, {1.0, b}};
  return combine(terms);
}

ScalarPath operator-(const ScalarPath& a, const ScalarPath& b) {
  const std::pair<double, ScalarPath> terms[] = {{1.0, a}, {-1.0, b}};
  return combine(terms);
}

ScalarPath operator*(double c, const ScalarPath& z) {
  const std::pair<double, ScalarPath> terms[] = {{c, z}};
  return combine(terms);
}

double max_node_distance(const ScalarPath& a, const ScalarPath& b) {
  require_same_grid(a.grid(), b.grid(), "max_node_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max({d, std::abs(a.left(i) - b.left(i)), std::abs(a.right(i) - b.right(i))});
  }
  return d;
}

ScalarPath restrict_to(const ScalarPath& z, const GridPtr& coarse) {
  const TimeGrid& fine = *z.grid();
  std::vector<double> left, right;
  left.reserve(coarse->size());
  right.reserve(coarse->size());
  for (double t : coarse->nodes()) {
    auto i = fine.find(t);
    if (!i) throw GridMismatch("restrict_to: coarse node is not a node of the path grid");
    left.push_back(z.left(*i));
    right.push_back(z.right(*i));
  }
  ScalarPath out(coarse, std::move(left), std::move(right));
  if (!z.has_decomposition()) return out;
  const Decomposition& p = z.decomposition();
  return out.with_decomposition({restrict_to(p.continuous_martingale, coarse),
                                 restrict_to(p.jump_martingale, coarse),
                                 restrict_to(p.finite_variation, coarse)});
}

// ------------------------------------------------------- step processes

StepScalarProcess StepScalarProcess::constant(GridPtr grid, double a) {
  const std::size_t last = grid->size() - 1;
  return StepScalarProcess{std::move(grid), {0, last}, {a}, 0.0};
}

StepScalarProcess StepScalarProcess::indicator(GridPtr grid, std::size_t a, std::size_t b) {
  const std::size_t last = grid->size() - 1;
  if (a > b || b > last) throw std::invalid_argument("indicator: need a <= b <= last node");
  return StepScalarProcess{std::move(grid), {0, a, b}, {0.0, 1.0}, 0.0};
}

void StepScalarProcess::validate() const {
  if (!grid) throw std::invalid_argument("step process without grid");
  if (breakpoints.empty() || breakpoints.front() != 0) {
    throw std::invalid_argument("step process breakpoints must start at node 0");
  }
  if (coefficients.size() + 1 != breakpoints.size()) {
    throw std::invalid_argument("step process needs one coefficient per interval");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (breakpoints[i] >= grid->size()) throw std::invalid_argument("breakpoint beyond grid");
    if (i > 0 && breakpoints[i] < breakpoints[i - 1]) {
      throw std::invalid_argument("breakpoints must be nondecreasing");
    }
  }
  for (double a : coefficients) {
    if (!std::isfinite(a)) throw std::invalid_argument("step coefficient is not finite");
  }
}

double StepScalarProcess::bound() const {
  double b = std::abs(value_at_zero);
  for (double a : coefficients) b = std::max(b, std::abs(a));
  return b;
}

std::vector<double> StepScalarProcess::cell_values() const {
  std::vector<double> c(grid->size(), 0.0);
  c[0] = value_at_zero;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    for (std::size_t j = breakpoints[i] + 1; j <= breakpoints[i + 1]; ++j) c[j] = coefficients[i];
  }
  return c;
}

ScalarPath scalar_step_integral(const StepScalarProcess& h, const ScalarPath& z) {
  h.validate();
  require_same_grid(h.grid, z.grid(), "scalar_step_integral");
  const std::size_t n = z.size();
  std::vector<double> left(n, 0.0), right(n, 0.0);

  // Completed intervals contribute a constant; the active one contributes
  // a_i (z_t - z_{u_i}).
  double completed = 0.0;
  std::size_t i = 0;
  const std::size_t intervals = h.coefficients.size();
  for (std::size_t j = 1; j < n; ++j) {
    while (i < intervals && h.breakpoints[i + 1] < j) {
      const std::size_t u0 = h.breakpoints[i], u1 = h.breakpoints[i + 1];
      completed += h.coefficients[i] * (z.right(u1) - z.right(u0));
      ++i;
    }
    if (i < intervals) {
      const double a = h.coefficients[i];
      const double base = z.right(h.breakpoints[i]);
      right[j] = completed + a * (z.right(j) - base);
      left[j] = completed + a * (z.left(j) - base);
    } else {
      right[j] = left[j] = completed;
    }
  }
  ScalarPath out(z.grid(), std::move(left), std::move(right));
  if (!z.has_decomposition()) return out;
  const Decomposition& p = z.decomposition();
  return out.with_decomposition({scalar_step_integral(h, p.continuous_martingale),
                                 scalar_step_integral(h, p.jump_martingale),
                                 scalar_step_integral(h, p.finite_variation)});
}

ScalarPath stop_path(const ScalarPath& z, StoppingTime tau) {
  if (!tau.finite() || tau.node >= z.size() - 1) return z;
  std::vector<double> left(z.lefts().begin(), z.lefts().end());
  std::vector<double> right(z.rights().begin(), z.rights().end());
  const double frozen = z.right(tau.node);
  for (std::size_t j = tau.node + 1; j < z.size(); ++j) left[j] = right[j] = frozen;
  ScalarPath out(z.grid(), std::move(left), std::move(right));
  if (!z.has_decomposition()) return out;
  const Decomposition& p = z.decomposition();
  return out.with_decomposition({stop_path(p.continuous_martingale, tau),
                                 stop_path(p.jump_martingale, tau),
                                 stop_path(p.finite_variation, tau)});
}

// ---------------------------------------------------------- seminorms

double ucp_seminorm(std::span<const ScalarPath> paths, std::size_t levels) {
  if (paths.empty()) throw std::invalid_argument("ucp_seminorm: empty ensemble");
  if (levels == 0) throw std::invalid_argument("ucp_seminorm: need at least one level");
  std::vector<double> level_mean(levels, 0.0);
  for (const ScalarPath& z : paths) {
    const TimeGrid& g = *z.grid();
    for (std::size_t n = 1; n <= levels; ++n) {
      const double cutoff = std::min(static_cast<double>(n), g.horizon());
      const double s = z.sup_abs(g.last_at_or_before(cutoff));
      level_mean[n - 1] += std::min(1.0, s);
    }
  }
  double total = 0.0;
  double weight = 0.5;
  for (std::size_t n = 0; n < levels; ++n, weight *= 0.5) {
    total += weight * (level_mean[n] / static_cast<double>(paths.size()));
  }
  return total;
}

StepScalarProcess emery_trial(const ScalarPath& z, std::uint64_t trial_seed, std::size_t k) {
  const TimeGrid& g = *z.grid();
  Rng rng(derive_seed(trial_seed, k));
  const std::size_t count = 1 + static_cast<std::size_t>(rng.uniform() * 8.0);
  std::vector<double> times(count);
  for (double& t : times) t = rng.uniform(0.0, g.horizon());
  std::sort(times.begin(), times.end());
  std::vector<int> signs(count + 1);
  for (int& s : signs) s = rng.sign();

  StepScalarProcess h{z.grid(), {0}, {}, 0.0};
  for (double t : times) h.breakpoints.push_back(std::min(g.snap_up(t), g.size() - 1));
  h.breakpoints.push_back(g.size() - 1);
  for (std::size_t i = 0; i + 1 < h.breakpoints.size(); ++i) {
    const double zu = z.right(h.breakpoints[i]);
    h.coefficients.push_back(signs[i] * (zu < 0.0 ? -1.0 : 1.0));
  }
  return h;
}

double emery_estimate(std::span<const ScalarPath> paths, std::size_t trial_count,
                      std::uint64_t trial_seed, std::size_t levels) {
  if (paths.empty()) throw std::invalid_argument("emery_estimate: empty ensemble");
  if (trial_count == 0) throw std::invalid_argument("emery_estimate: need at least one trial");
  std::vector<ScalarPath> integrals;
  integrals.reserve(paths.size());
  for (const ScalarPath& z : paths) {
    integrals.push_back(scalar_step_integral(StepScalarProcess::constant(z.grid(), 1.0), z));
  }
  double best = ucp_seminorm(integrals, levels);
  for (std::size_t k = 0; k < trial_count; ++k) {
    for (std::size_t s = 0; s < paths.size(); ++s) {
      integrals[s] = scalar_step_integral(emery_trial(paths[s], trial_seed, k), paths[s]);
    }
    best = std::max(best, ucp_seminorm(integrals, levels));
  }
  return best;
}

}  // namespace cylint
