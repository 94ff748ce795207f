#include "cylint/covariation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cylint/parallel.hpp"

namespace cylint {

namespace {

double jump_deviation(const ScalarPath& bracket, const CoordinatePaths& x, const CoordinatePaths& y) {
  double dev = 0.0;
  for (std::size_t i = 1; i < bracket.size(); ++i) {
    const DualVec dx = x.jump_at(i), dy = y.jump_at(i);
    double expected = 0.0;
    for (std::size_t k = 0; k < dx.size(); ++k) expected += dx[k] * dy[k];
    dev = std::max(dev, std::abs(bracket.jump(i) - expected));
  }
  return dev;
}

template <class P>
P stop_any(const CoordinatePaths& x, StoppingTime tau) {
  std::vector<ScalarPath> out;
  for (const ScalarPath& z : x.coordinates()) out.push_back(stop_path(z, tau));
  return P(std::move(out));
}

}  // namespace

ScalarPath bracket_residual(const CoordinatePaths& x, const CoordinatePaths& y) {
  if (x.dimension() != y.dimension()) throw std::invalid_argument("bracket_residual: dimensions differ");
  require_same_grid(x.grid(), y.grid(), "bracket_residual");
  const SeqPathPrimal xs(std::vector<ScalarPath>(x.coordinates().begin(), x.coordinates().end()));
  const SeqPathPrimal ys(std::vector<ScalarPath>(y.coordinates().begin(), y.coordinates().end()));
  const SeqPathPrimal xp = without_parts(xs), yp = without_parts(ys);
  const ScalarPath prod = pairing_path(xp, yp);
  const ScalarPath i_x = integrate_grid(left_limit_integrand(yp), xp).path;
  const ScalarPath i_y = integrate_grid(left_limit_integrand(xp), yp).path;
  const std::size_t n = prod.size();
  std::vector<double> left(n), right(n);
  for (std::size_t i = 0; i < n; ++i) {
    left[i] = prod.left(i) - i_x.left(i) - i_y.left(i);
    right[i] = prod.right(i) - i_x.right(i) - i_y.right(i);
  }
  return ScalarPath(x.grid(), std::move(left), std::move(right));
}

ScalarPath bracket_partition_sum(const CoordinatePaths& x, const CoordinatePaths& y,
                                 const RandomPartition& sigma) {
  if (x.dimension() != y.dimension()) throw std::invalid_argument("bracket_partition: dimensions differ");
  require_same_grid(x.grid(), y.grid(), "bracket_partition");
  const std::size_t n = x.grid()->size();
  const std::size_t d = x.dimension();
  if (sigma.nodes.empty() || sigma.nodes.front() != 0) {
    throw std::invalid_argument("partition must start at node 0");
  }
  auto cross = [&](std::size_t j, std::size_t base, bool left) {
    double v = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const ScalarPath& a = x.coordinate(k);
      const ScalarPath& b = y.coordinate(k);
      const double da = (left ? a.left(j) : a.right(j)) - a.right(base);
      const double db = (left ? b.left(j) : b.right(j)) - b.right(base);
      v += da * db;
    }
    return v;
  };
  double start = 0.0;
  for (std::size_t k = 0; k < d; ++k) start += x.coordinate(k).initial() * y.coordinate(k).initial();

  std::vector<double> left(n, start), right(n, start);
  double completed = start;
  std::size_t covered = 0;
  for (std::size_t k = 0; k + 1 < sigma.nodes.size(); ++k) {
    const std::size_t u0 = sigma.nodes[k], u1 = sigma.nodes[k + 1];
    if (u1 < u0 || u1 >= n) throw std::invalid_argument("partition nodes must be nondecreasing and on the grid");
    for (std::size_t j = u0 + 1; j <= u1; ++j) {
      right[j] = completed + cross(j, u0, false);
      left[j] = completed + cross(j, u0, true);
    }
    if (u1 > u0) completed += cross(u1, u0, false);
    covered = std::max(covered, u1);
  }
  for (std::size_t j = covered + 1; j < n; ++j) left[j] = right[j] = completed;
  return ScalarPath(x.grid(), std::move(left), std::move(right));
}

BracketResult bracket_partition(std::span<const SeqSemimartingale> x, std::span<const SeqPathPrimal> y,
                                std::span<const std::vector<RandomPartition>> partitions,
                                double threshold, double slack, std::size_t ucp_levels) {
  const std::size_t scenarios = x.size();
  if (scenarios == 0 || y.size() != scenarios || partitions.size() != scenarios) {
    throw std::invalid_argument("bracket_partition: ensemble sizes differ");
  }
  const std::size_t levels = partitions.front().size();
  BracketResult out;
  out.residual_paths.resize(scenarios);
  out.partition_paths.assign(levels, std::vector<ScalarPath>(scenarios));
  std::vector<std::vector<ScalarPath>> gaps(levels, std::vector<ScalarPath>(scenarios));
  parallel_for(scenarios, [&](std::size_t s) {
    if (partitions[s].size() != levels) throw std::invalid_argument("bracket_partition: level counts differ");
    out.residual_paths[s] = bracket_residual(x[s], y[s]);
    for (std::size_t n = 0; n < levels; ++n) {
      out.partition_paths[n][s] = bracket_partition_sum(x[s], y[s], partitions[s][n]);
      gaps[n][s] = out.partition_paths[n][s] - out.residual_paths[s];
    }
  });
  out.convergence.threshold = threshold;
  out.convergence.slack = slack;
  for (const auto& level : gaps) out.convergence.gaps.push_back(ucp_seminorm(level, ucp_levels));
  judge_gaps(out.convergence);
  return out;
}

double BracketProperties::max_deviation() const {
  double m = std::max({at_zero_deviation, jump_deviation, stop_x_deviation, stop_y_deviation,
                       stop_xy_deviation, stop_cross_deviation});
  if (continuity_deviation) m = std::max(m, *continuity_deviation);
  return m;
}

BracketProperties bracket_properties_check(const CoordinatePaths& x, const CoordinatePaths& y,
                                           StoppingTime tau) {
  const ScalarPath b = bracket_residual(x, y);
  const ScalarPath b_tau = stop_path(b, tau);
  const auto xt = stop_any<SeqSemimartingale>(x, tau);
  const auto yt = stop_any<SeqPathPrimal>(y, tau);
  const ScalarPath b_x = bracket_residual(xt, y);
  const ScalarPath b_y = bracket_residual(x, yt);
  const ScalarPath b_xy = bracket_residual(xt, yt);

  BracketProperties r;
  double x0y0 = 0.0;
  for (std::size_t k = 0; k < x.dimension(); ++k) x0y0 += x.coordinate(k).initial() * y.coordinate(k).initial();
  r.at_zero_deviation = std::abs(b.initial() - x0y0);
  r.jump_deviation = jump_deviation(b, x, y);
  r.stop_x_deviation = max_node_distance(b_x, b_tau);
  r.stop_y_deviation = max_node_distance(b_y, b_tau);
  r.stop_xy_deviation = max_node_distance(b_xy, b_tau);
  r.stop_cross_deviation = max_node_distance(b_x, b_y);
  if (!x.has_jumps() || !y.has_jumps()) {
    double c = 0.0;
    for (std::size_t i = 1; i < b.size(); ++i) c = std::max(c, std::abs(b.jump(i)));
    r.continuity_deviation = c;
  }
  return r;
}

void FiniteMeasureSpace::validate() const {
  if (points.size() != weights.size()) throw std::invalid_argument("measure space: one weight per point");
  if (points.empty()) throw std::invalid_argument("measure space: no points");
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("measure space: weights must be finite and >= 0");
  }
}

double FiniteMeasureSpace::total_mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

FubiniResult fubini_check(std::span<const GridIntegrand> family, const FiniteMeasureSpace& space,
                          const CoordinatePaths& x) {
  space.validate();
  if (family.size() != space.points.size()) throw std::invalid_argument("fubini_check: one integrand per point");
  std::vector<std::pair<double, ScalarPath>> lhs_terms;
  std::vector<std::pair<double, GridIntegrand>> mixed;
  for (std::size_t i = 0; i < family.size(); ++i) {
    lhs_terms.emplace_back(space.weights[i], integrate_grid(family[i], x).path.without_decomposition());
    mixed.emplace_back(space.weights[i], family[i]);
  }
  FubiniResult r;
  r.lhs = combine(lhs_terms);
  r.rhs = integrate_grid(combine_integrands(mixed), x).path.without_decomposition();
  r.deviation = max_node_distance(r.lhs, r.rhs);
  return r;
}

}  // namespace cylint
