#include "cylint/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cylint/parallel.hpp"

namespace cylint {

namespace {

using PathRefs = std::vector<const ScalarPath*>;

struct Sides {
  std::vector<double> left;
  std::vector<double> right;
};

void require_integrator(const GridPtr& grid, std::size_t dimension, const CoordinatePaths& x,
                        const char* context) {
  require_same_grid(grid, x.grid(), context);
  if (dimension != x.dimension()) {
    throw std::invalid_argument(std::string(context) + ": integrand and integrator dimensions differ");
  }
}

/// The coordinate paths of x, or of one of their decomposition parts.
std::vector<PathRefs> integrator_parts(const CoordinatePaths& x) {
  std::vector<PathRefs> parts(1);
  for (const ScalarPath& z : x.coordinates()) parts[0].push_back(&z);
  if (!x.has_decomposition()) return parts;
  parts.resize(4);
  for (const ScalarPath& z : x.coordinates()) {
    const Decomposition& d = z.decomposition();
    parts[1].push_back(&d.continuous_martingale);
    parts[2].push_back(&d.jump_martingale);
    parts[3].push_back(&d.finite_variation);
  }
  return parts;
}

ScalarPath assemble(const GridPtr& grid, std::vector<Sides> sides) {
  ScalarPath whole(grid, std::move(sides[0].left), std::move(sides[0].right));
  if (sides.size() == 1) return whole;
  return whole.with_decomposition({ScalarPath(grid, std::move(sides[1].left), std::move(sides[1].right)),
                                   ScalarPath(grid, std::move(sides[2].left), std::move(sides[2].right)),
                                   ScalarPath(grid, std::move(sides[3].left), std::move(sides[3].right))});
}

Sides grid_kernel(const GridIntegrand& h, const PathRefs& z) {
  const std::size_t n = h.grid()->size();
  const std::size_t d = z.size();
  Sides s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t j = 1; j < n; ++j) {
    std::span<const double> c = h.cell(j - 1);
    std::span<const double> a = h.at(j);
    double cont = 0.0, jump = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const ScalarPath& p = *z[k];
      cont += c[k] * (p.left(j) - p.right(j - 1));
      jump += a[k] * (p.right(j) - p.left(j));
    }
    s.left[j] = s.right[j - 1] + cont;
    s.right[j] = s.left[j] + jump;
  }
  return s;
}

Sides simple_kernel(const SimplePredictableIntegrand& h, const PathRefs& z) {
  const std::size_t n = h.grid->size();
  Sides s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  auto pair_at = [&](const FiniteSeq& a, std::size_t j, std::size_t base, bool left) {
    double v = 0.0;
    for (const auto& [k, c] : a.entries()) {
      const ScalarPath& p = *z[k];
      v += c * ((left ? p.left(j) : p.right(j)) - p.right(base));
    }
    return v;
  };
  double completed = 0.0;
  std::size_t covered = 0;
  for (std::size_t k = 0; k < h.coefficients.size(); ++k) {
    const std::size_t u0 = h.stop_times[k], u1 = h.stop_times[k + 1];
    const FiniteSeq& a = h.coefficients[k];
    for (std::size_t j = u0 + 1; j <= u1; ++j) {
      s.right[j] = completed + pair_at(a, j, u0, false);
      s.left[j] = completed + pair_at(a, j, u0, true);
    }
    if (u1 > u0) completed += pair_at(a, u1, u0, false);
    covered = std::max(covered, u1);
  }
  for (std::size_t j = covered + 1; j < n; ++j) s.left[j] = s.right[j] = completed;
  return s;
}

}  // namespace

const char* to_string(IntegrandKind kind) {
  switch (kind) {
    case IntegrandKind::Elementary: return "elementary";
    case IntegrandKind::Simple: return "simple";
    case IntegrandKind::Grid: return "grid";
  }
  return "unknown";
}

ScalarPath IntegralResult::with_value_at_zero() const {
  const std::pair<double, ScalarPath> terms[] = {{1.0, path.without_decomposition()},
                                                 {value_at_zero_term, ScalarPath::constant(path.grid(), 1.0)}};
  return combine(terms);
}

IntegralResult integrate_simple(const SimplePredictableIntegrand& h, const CoordinatePaths& x) {
  h.validate();
  require_integrator(h.grid, h.dimension, x, "integrate_simple");
  std::vector<Sides> sides;
  for (const PathRefs& part : integrator_parts(x)) sides.push_back(simple_kernel(h, part));
  return {assemble(x.grid(), std::move(sides)), pair(x.node_value(0), h.at_zero), IntegrandKind::Simple,
          std::nullopt};
}

IntegralResult integrate_elementary(const ElementaryIntegrand& h, const CoordinatePaths& x) {
  std::vector<std::pair<double, ScalarPath>> terms;
  double at_zero = 0.0;
  const DualVec x0 = x.node_value(0);
  for (const auto& [step, phi] : h.terms) {
    require_same_grid(step.grid, x.grid(), "integrate_elementary");
    terms.emplace_back(1.0, scalar_step_integral(step, evaluate(x, phi)));
    at_zero += step.value_at_zero * pair(x0, phi);
  }
  if (terms.empty()) {
    ScalarPath zero = ScalarPath::constant(x.grid(), 0.0);
    if (x.has_decomposition()) zero = zero.with_decomposition({zero, zero, zero});
    return {zero, 0.0, IntegrandKind::Elementary, std::nullopt};
  }
  return {combine(terms), at_zero, IntegrandKind::Elementary, std::nullopt};
}

IntegralResult integrate_grid(const GridIntegrand& h, const CoordinatePaths& x) {
  require_integrator(h.grid(), h.dimension(), x, "integrate_grid");
  std::vector<Sides> sides;
  for (const PathRefs& part : integrator_parts(x)) sides.push_back(grid_kernel(h, part));
  return {assemble(x.grid(), std::move(sides)), pair(x.node_value(0), FiniteSeq::from_dense(h.initial())),
          IntegrandKind::Grid, std::nullopt};
}

void judge_gaps(ConvergenceReport& report) {
  report.monotone = true;
  for (std::size_t n = 1; n < report.gaps.size(); ++n) {
    if (report.gaps[n] > report.slack * report.gaps[n - 1] + 1e-15) report.monotone = false;
  }
  report.below_threshold = !report.gaps.empty() && report.gaps.back() <= report.threshold;
  report.pass = report.monotone && report.below_threshold;
}

ConvergenceReport riemann_convergence(std::span<const GridIntegrand> h,
                                      std::span<const SeqSemimartingale> x,
                                      std::span<const std::vector<RandomPartition>> partitions,
                                      double threshold, double slack, std::size_t ucp_levels) {
  const std::size_t scenarios = x.size();
  if (scenarios == 0 || h.size() != scenarios || partitions.size() != scenarios) {
    throw std::invalid_argument("riemann_convergence: ensemble sizes differ");
  }
  const std::size_t levels = partitions.front().size();
  std::vector<std::vector<ScalarPath>> diffs(levels, std::vector<ScalarPath>(scenarios));
  parallel_for(scenarios, [&](std::size_t s) {
    if (partitions[s].size() != levels) throw std::invalid_argument("riemann_convergence: level counts differ");
    const ScalarPath reference = integrate_grid(h[s], without_parts(x[s])).path;
    for (std::size_t n = 0; n < levels; ++n) {
      const ScalarPath approx = integrate_simple(sample_at(h[s], partitions[s][n]), without_parts(x[s])).path;
      diffs[n][s] = approx - reference;
    }
  });
  ConvergenceReport report;
  report.threshold = threshold;
  report.slack = slack;
  for (const auto& level : diffs) report.gaps.push_back(ucp_seminorm(level, ucp_levels));
  judge_gaps(report);
  return report;
}

double associativity_residual(const StepScalarProcess& g, const GridIntegrand& h, const CoordinatePaths& x) {
  const ScalarPath z = integrate_grid(h, x).path.without_decomposition();
  const ScalarPath lhs = scalar_step_integral(g, z);
  const ScalarPath rhs = integrate_grid(multiply(g, h), x).path;
  return max_node_distance(lhs, rhs);
}

double unclipped_ucp(std::span<const ScalarPath> paths, std::size_t levels) {
  if (paths.empty()) throw std::invalid_argument("unclipped_ucp: empty ensemble");
  double total = 0.0;
  double weight = 0.5;
  for (std::size_t n = 1; n <= levels; ++n, weight *= 0.5) {
    double mean = 0.0;
    for (const ScalarPath& z : paths) {
      const TimeGrid& g = *z.grid();
      mean += z.sup_abs(g.last_at_or_before(std::min(static_cast<double>(n), g.horizon())));
    }
    total += weight * mean / static_cast<double>(paths.size());
  }
  return total;
}

GoodIntegratorReport good_integrator_diagnostic(std::span<const SeqSemimartingale> x,
                                                std::span<const GridIntegrand> h_base,
                                                std::span<const double> eps, std::size_t ucp_levels) {
  if (x.empty() || x.size() != h_base.size()) {
    throw std::invalid_argument("good_integrator_diagnostic: ensemble sizes differ");
  }
  for (std::size_t n = 0; n < eps.size(); ++n) {
    if (!(eps[n] >= 0.0) || (n > 0 && eps[n] > eps[n - 1])) {
      throw std::invalid_argument("good_integrator_diagnostic: eps must be nonnegative and nonincreasing");
    }
  }
  std::vector<ScalarPath> base(x.size());
  parallel_for(x.size(), [&](std::size_t s) {
    base[s] = integrate_grid(h_base[s], without_parts(x[s])).path;
  });
  double max_sup = 0.0;
  for (const ScalarPath& z : base) max_sup = std::max(max_sup, z.sup_abs());

  GoodIntegratorReport report;
  report.eps.assign(eps.begin(), eps.end());
  report.base = unclipped_ucp(base, ucp_levels);
  report.pass = true;
  for (std::size_t n = 0; n < eps.size(); ++n) {
    // ∫ εH dX is computed from the scaled integrand, not by scaling the path.
    std::vector<ScalarPath> scaled(x.size());
    parallel_for(x.size(), [&](std::size_t s) {
      scaled[s] = integrate_grid(scale(eps[n], h_base[s]), without_parts(x[s])).path;
    });
    const double v = ucp_seminorm(scaled, ucp_levels);
    report.seminorms.push_back(v);
    if (n > 0 && v > report.seminorms[n - 1] + 1e-15) report.pass = false;
    if (eps[n] * max_sup <= 1.0 && eps[n] > 0.0 && report.base > 0.0) {
      const double ratio = v / (eps[n] * report.base);
      if (ratio < 0.5 || ratio > 2.0) report.pass = false;
    }
  }
  return report;
}

}  // namespace cylint
