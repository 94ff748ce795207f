#include "cylint/integrands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cylint/rng.hpp"

namespace cylint {

namespace {

void add_scaled(std::span<double> dst, double c, const FiniteSeq& phi) {
  for (const auto& [j, a] : phi.entries()) {
    if (j >= dst.size()) throw std::out_of_range("integrand coefficient outside dimension");
    dst[j] += c * a;
  }
}

void require_compatible(const GridIntegrand& a, const GridIntegrand& b, const char* context) {
  require_same_grid(a.grid(), b.grid(), context);
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument(std::string(context) + ": dimensions differ");
  }
}

}  // namespace

// ------------------------------------------------------------ GridIntegrand

GridIntegrand::GridIntegrand(GridPtr grid, std::size_t dimension)
    : grid_(std::move(grid)), dim_(dimension) {
  if (!grid_) throw std::invalid_argument("integrand without grid");
  if (dim_ == 0) throw std::invalid_argument("integrand dimension must be positive");
  cell_.assign(grid_->cells() * dim_, 0.0);
  initial_.assign(dim_, 0.0);
}

std::span<const double> GridIntegrand::at(std::size_t j) const {
  if (j == 0 || j > cells()) throw std::out_of_range("jump value index must be in 1..M");
  if (at_.empty()) return cell(j - 1);
  return {at_.data() + (j - 1) * dim_, dim_};
}

std::span<double> GridIntegrand::at_mut(std::size_t j) {
  if (j == 0 || j > cells()) throw std::out_of_range("jump value index must be in 1..M");
  if (at_.empty()) at_ = cell_;
  return {at_.data() + (j - 1) * dim_, dim_};
}

FiniteSeq GridIntegrand::evaluate(std::size_t i) const {
  return FiniteSeq::from_dense(i == 0 ? initial() : at(i));
}

bool GridIntegrand::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(cell_.begin(), cell_.end(), finite) && std::all_of(at_.begin(), at_.end(), finite) &&
         std::all_of(initial_.begin(), initial_.end(), finite);
}

// ----------------------------------------------------------- simple / partitions

void SimplePredictableIntegrand::validate() const {
  if (!grid) throw std::invalid_argument("simple integrand without grid");
  if (stop_times.empty() || stop_times.front() != 0) {
    throw std::invalid_argument("simple integrand stop times must start at node 0");
  }
  if (coefficients.size() + 1 != stop_times.size()) {
    throw std::invalid_argument("simple integrand needs one coefficient per interval");
  }
  for (std::size_t k = 0; k < stop_times.size(); ++k) {
    if (stop_times[k] >= grid->size()) throw std::invalid_argument("stop time beyond grid");
    if (k > 0 && stop_times[k] < stop_times[k - 1]) {
      throw std::invalid_argument("stop times must be nondecreasing");
    }
  }
  for (const FiniteSeq& a : coefficients) {
    if (a.support_bound() > dimension) throw std::out_of_range("coefficient outside dimension");
  }
  if (at_zero.support_bound() > dimension) throw std::out_of_range("value at zero outside dimension");
}

double RandomPartition::mesh(const TimeGrid& grid) const {
  double m = 0.0;
  for (std::size_t k = 1; k < nodes.size(); ++k) m = std::max(m, grid[nodes[k]] - grid[nodes[k - 1]]);
  return m;
}

double weighted_norm(std::span<const double> row, std::span<const double> weights) {
  double p = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double w = j < weights.size() ? weights[j] : 1.0;
    p = std::max(p, w * std::abs(row[j]));
  }
  return p;
}

SimplePredictableIntegrand sample_at(const GridIntegrand& h, const RandomPartition& sigma) {
  SimplePredictableIntegrand out{h.grid(), h.dimension(), sigma.nodes, {}, FiniteSeq::from_dense(h.initial())};
  if (sigma.nodes.empty() || sigma.nodes.front() != 0) {
    throw std::invalid_argument("partition must start at node 0");
  }
  for (std::size_t k = 0; k + 1 < sigma.nodes.size(); ++k) {
    const std::size_t tau = sigma.nodes[k];
    if (tau >= h.grid()->size()) throw std::invalid_argument("partition node beyond grid");
    out.coefficients.push_back(tau < h.cells() ? FiniteSeq::from_dense(h.cell(tau)) : FiniteSeq{});
  }
  out.validate();
  return out;
}

GridIntegrand to_grid(const SimplePredictableIntegrand& h) {
  h.validate();
  GridIntegrand g(h.grid, h.dimension);
  add_scaled(g.initial(), 1.0, h.at_zero);
  for (std::size_t k = 0; k < h.coefficients.size(); ++k) {
    for (std::size_t i = h.stop_times[k]; i < h.stop_times[k + 1]; ++i) add_scaled(g.cell(i), 1.0, h.coefficients[k]);
  }
  return g;
}

GridIntegrand to_grid(const ElementaryIntegrand& h, std::size_t dimension) {
  if (h.terms.empty()) throw std::invalid_argument("to_grid: empty elementary integrand has no grid");
  GridIntegrand g(h.terms.front().first.grid, dimension);
  for (const auto& [step, phi] : h.terms) {
    step.validate();
    require_same_grid(step.grid, g.grid(), "elementary integrand");
    const std::vector<double> c = step.cell_values();
    add_scaled(g.initial(), c[0], phi);
    for (std::size_t i = 0; i < g.cells(); ++i) add_scaled(g.cell(i), c[i + 1], phi);
  }
  return g;
}

RandomPartition full_partition(const TimeGrid& grid) {
  RandomPartition p;
  p.nodes.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p.nodes[i] = i;
  return p;
}

// ----------------------------------------------------------- localization

StoppingTime hitting_time(const GridIntegrand& h, double level, std::span<const double> weights) {
  for (std::size_t i = 0; i < h.cells(); ++i) {
    if (weighted_norm(h.cell(i), weights) > level) return StoppingTime::at(i);
  }
  return StoppingTime::never();
}

std::vector<StoppingTime> localize(const GridIntegrand& h, std::span<const double> levels,
                                   std::span<const double> weights) {
  std::vector<StoppingTime> out;
  out.reserve(levels.size());
  const TimeGrid& g = *h.grid();
  for (std::size_t n = 0; n < levels.size(); ++n) {
    if (n > 0 && !(levels[n] > levels[n - 1])) throw std::invalid_argument("localize: levels must increase");
    StoppingTime tau = hitting_time(h, levels[n], weights);
    const StoppingTime by_time = deterministic_time(g, levels[n]);
    if (by_time.node < tau.node) tau = by_time;
    out.push_back(tau);
  }
  return out;
}

double sup_seminorm(std::span<const GridIntegrand> hs, std::span<const double> weights) {
  double p = 0.0;
  for (const GridIntegrand& h : hs) {
    p = std::max(p, weighted_norm(h.initial(), weights));
    for (std::size_t i = 0; i < h.cells(); ++i) {
      p = std::max(p, weighted_norm(h.cell(i), weights));
      if (h.has_jump_values()) p = std::max(p, weighted_norm(h.at(i + 1), weights));
    }
  }
  return p;
}

double sup_seminorm(std::span<const SimplePredictableIntegrand> hs, std::span<const double> weights) {
  double p = 0.0;
  for (const SimplePredictableIntegrand& h : hs) {
    p = std::max(p, weighted_norm(h.at_zero.dense(h.dimension), weights));
    for (std::size_t k = 0; k < h.coefficients.size(); ++k) {
      if (h.stop_times[k + 1] > h.stop_times[k]) {
        p = std::max(p, weighted_norm(h.coefficients[k].dense(h.dimension), weights));
      }
    }
  }
  return p;
}

// --------------------------------------------------------------- builders

GridIntegrand left_limit_integrand(const CoordinatePaths& y) {
  GridIntegrand h(y.grid(), y.dimension());
  for (std::size_t k = 0; k < y.dimension(); ++k) {
    const ScalarPath& z = y.coordinate(k);
    h.initial()[k] = z.initial();
    for (std::size_t i = 0; i < h.cells(); ++i) h.cell(i)[k] = z.right(i);
  }
  // Explicit even for continuous Y: a jump of the integrator at t_j pairs
  // with Y_{t_j-}, which differs from the cell value Y_{t_{j-1}}.
  for (std::size_t j = 1; j <= h.cells(); ++j) {
    std::span<double> row = h.at_mut(j);
    for (std::size_t k = 0; k < y.dimension(); ++k) row[k] = y.coordinate(k).left(j);
  }
  return h;
}

GridIntegrand constant_integrand(const GridPtr& grid, std::size_t dimension, const FiniteSeq& phi) {
  GridIntegrand h(grid, dimension);
  add_scaled(h.initial(), 1.0, phi);
  for (std::size_t i = 0; i < h.cells(); ++i) add_scaled(h.cell(i), 1.0, phi);
  return h;
}

GridIntegrand linear_in_t_integrand(const GridPtr& grid, std::size_t dimension, const FiniteSeq& phi) {
  GridIntegrand h(grid, dimension);
  for (std::size_t i = 0; i < h.cells(); ++i) add_scaled(h.cell(i), (*grid)[i], phi);
  return h;
}

GridIntegrand truncate(const GridIntegrand& h, StoppingTime tau) {
  GridIntegrand out = h;
  if (!tau.finite()) return out;
  for (std::size_t i = tau.node; i < h.cells(); ++i) {
    std::fill(out.cell(i).begin(), out.cell(i).end(), 0.0);
  }
  if (h.has_jump_values()) {
    for (std::size_t j = tau.node + 1; j <= h.cells(); ++j) {
      std::span<double> row = out.at_mut(j);
      std::fill(row.begin(), row.end(), 0.0);
    }
  }
  return out;
}

GridIntegrand multiply(const StepScalarProcess& g, const GridIntegrand& h) {
  g.validate();
  require_same_grid(g.grid, h.grid(), "multiply");
  const std::vector<double> c = g.cell_values();
  GridIntegrand out = h;
  for (double& v : out.initial()) v *= c[0];
  for (std::size_t i = 0; i < h.cells(); ++i) {
    for (double& v : out.cell(i)) v *= c[i + 1];
  }
  if (h.has_jump_values()) {
    for (std::size_t j = 1; j <= h.cells(); ++j) {
      for (double& v : out.at_mut(j)) v *= c[j];
    }
  }
  return out;
}

GridIntegrand scale(double c, const GridIntegrand& h) {
  const std::pair<double, GridIntegrand> term{c, h};
  return combine_integrands(std::span(&term, 1));
}

GridIntegrand combine_integrands(std::span<const std::pair<double, GridIntegrand>> terms) {
  if (terms.empty()) throw std::invalid_argument("combine_integrands: no terms");
  const GridIntegrand& first = terms.front().second;
  GridIntegrand out(first.grid(), first.dimension());
  const bool jumps = std::any_of(terms.begin(), terms.end(),
                                 [](const auto& t) { return t.second.has_jump_values(); });
  for (const auto& [c, h] : terms) {
    require_compatible(first, h, "combine_integrands");
    for (std::size_t k = 0; k < h.dimension(); ++k) out.initial()[k] += c * h.initial()[k];
    for (std::size_t i = 0; i < h.cells(); ++i) {
      std::span<double> dst = out.cell(i);
      std::span<const double> src = h.cell(i);
      for (std::size_t k = 0; k < h.dimension(); ++k) dst[k] += c * src[k];
    }
  }
  if (jumps) {
    for (std::size_t j = 1; j <= out.cells(); ++j) {
      std::span<double> dst = out.at_mut(j);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (const auto& [c, h] : terms) {
        std::span<const double> src = h.at(j);
        for (std::size_t k = 0; k < h.dimension(); ++k) dst[k] += c * src[k];
      }
    }
  }
  return out;
}

std::vector<RandomPartition> partition_sequence(const TimeGrid& grid, PartitionKind kind,
                                                std::size_t n_levels, std::uint64_t seed) {
  if (n_levels == 0) throw std::invalid_argument("partition_sequence: need at least one level");
  if (n_levels > 40) throw std::invalid_argument("partition_sequence: too many levels");
  const double horizon = grid.horizon();
  const std::size_t last = grid.size() - 1;
  std::vector<RandomPartition> out;
  out.reserve(n_levels);
  for (std::size_t level = 1; level <= n_levels; ++level) {
    const std::size_t pieces = std::size_t{1} << level;
    const double spacing = horizon / static_cast<double>(pieces);
    Rng rng(derive_seed(seed, level));
    RandomPartition p;
    p.nodes.reserve(pieces + 1);
    p.nodes.push_back(0);
    for (std::size_t i = 1; i < pieces; ++i) {
      double t = spacing * static_cast<double>(i);
      if (kind == PartitionKind::Jittered) t += (rng.uniform() - 0.5) * spacing;
      p.nodes.push_back(std::max(p.nodes.back(), std::min(grid.snap_up(t), last)));
    }
    p.nodes.push_back(last);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace cylint
