#include "cylint/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cylint {

namespace {

void require_dimension(const DiagonalSemigroup& s, std::size_t d, const char* context) {
  if (s.dimension() != d) throw std::invalid_argument(std::string(context) + ": semigroup dimension differs");
}

}  // namespace

DiagonalSemigroup DiagonalSemigroup::heat(std::size_t dimension) {
  DiagonalSemigroup s;
  for (std::size_t k = 0; k < dimension; ++k) s.eigenvalues.push_back(-static_cast<double>(k * k));
  return s;
}

void DiagonalSemigroup::validate() const {
  if (eigenvalues.empty()) throw std::invalid_argument("semigroup needs at least one eigenvalue");
  for (double l : eigenvalues) {
    if (!std::isfinite(l) || l > 0.0) throw std::invalid_argument("eigenvalues must be finite and <= 0");
  }
}

FiniteSeq semigroup_apply(const DiagonalSemigroup& s, double t, const FiniteSeq& phi) {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup_apply: t must be >= 0");
  std::vector<FiniteSeq::Entry> e;
  for (const auto& [k, a] : phi.entries()) {
    if (k >= s.dimension()) throw std::out_of_range("semigroup_apply: index outside dimension");
    e.emplace_back(k, a * std::exp(s.eigenvalues[k] * t));
  }
  return FiniteSeq(std::move(e));
}

FiniteSeq generator_apply(const DiagonalSemigroup& s, const FiniteSeq& phi) {
  std::vector<FiniteSeq::Entry> e;
  for (const auto& [k, a] : phi.entries()) {
    if (k >= s.dimension()) throw std::out_of_range("generator_apply: index outside dimension");
    e.emplace_back(k, a * s.eigenvalues[k]);
  }
  return FiniteSeq(std::move(e));
}

SeqSemimartingale stochastic_convolution(const SeqSemimartingale& x, const DiagonalSemigroup& s) {
  s.validate();
  require_dimension(s, x.dimension(), "stochastic_convolution");
  const TimeGrid& g = *x.grid();
  const std::size_t n = g.size();
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (std::size_t k = 0; k < x.dimension(); ++k) {
    const ScalarPath& z = x.coordinate(k);
    const double lambda = s.eigenvalues[k];
    std::vector<double> left(n), right(n);
    double conv = 0.0;  // left-point ∫_0^{t_i} e^{λ(t_i - s)} z_s ds
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        const double h = g.spacing(i - 1);
        conv = std::exp(lambda * h) * (conv + z.right(i - 1) * h);
      }
      const double decay = std::exp(lambda * g[i]) * z.initial();
      left[i] = z.left(i) - decay + lambda * conv;
      right[i] = z.right(i) - decay + lambda * conv;
    }
    out.emplace_back(x.grid(), std::move(left), std::move(right));
  }
  return SeqSemimartingale(std::move(out));
}

SEESolution mild_solution(const DualVec& eta, const SeqSemimartingale& x, const DiagonalSemigroup& s) {
  if (eta.size() != x.dimension()) throw std::invalid_argument("mild_solution: eta dimension differs");
  const SeqSemimartingale u = stochastic_convolution(x, s);
  const TimeGrid& g = *x.grid();
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (std::size_t k = 0; k < x.dimension(); ++k) {
    const ScalarPath& uk = u.coordinate(k);
    std::vector<double> left(g.size()), right(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double free = std::exp(s.eigenvalues[k] * g[i]) * eta[k];
      left[i] = free + uk.left(i);
      right[i] = free + uk.right(i);
    }
    out.emplace_back(x.grid(), std::move(left), std::move(right));
  }
  return {SeqSemimartingale(std::move(out)), eta, s};
}

ScalarPath weak_residual(const SEESolution& z, const SeqSemimartingale& x, const FiniteSeq& phi) {
  require_same_grid(z.process.grid(), x.grid(), "weak_residual");
  const TimeGrid& g = *x.grid();
  const FiniteSeq a_phi = generator_apply(z.semigroup, phi);
  const ScalarPath zp = evaluate(z.process, phi);
  const ScalarPath za = evaluate(z.process, a_phi);
  const ScalarPath xp = evaluate(without_parts(x), phi);
  const double eta_phi = pair(z.eta, phi);
  std::vector<double> left(g.size()), right(g.size());
  double drift = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i > 0) drift += za.right(i - 1) * g.spacing(i - 1);
    left[i] = zp.left(i) - eta_phi - drift - (xp.left(i) - xp.initial());
    right[i] = zp.right(i) - eta_phi - drift - (xp.right(i) - xp.initial());
  }
  return ScalarPath(x.grid(), std::move(left), std::move(right));
}

double SeeFubiniResult::max_deviation() const { return std::max({dev12, dev23, dev13}); }

SeeFubiniResult fubini_see_check(const SeqSemimartingale& x, const DiagonalSemigroup& s, const FiniteSeq& phi) {
  s.validate();
  require_dimension(s, x.dimension(), "fubini_see_check");
  const TimeGrid& g = *x.grid();
  const std::size_t n = g.size();
  SeeFubiniResult r;
  r.q1.assign(n, 0.0);
  r.q2.assign(n, 0.0);
  r.q3.assign(n, 0.0);
  for (const auto& [k, a] : phi.entries()) {
    if (k >= x.dimension()) throw std::out_of_range("fubini_see_check: index outside dimension");
    const ScalarPath& z = x.coordinate(k);
    const double lambda = s.eigenvalues[k];
    const double x0 = z.initial();
    double conv = 0.0;   // ∫_0^{t_i} e^{λ(t_i - r)} dz_r started at 0
    double outer = 0.0;  // left-point ∫_0^{t_i} λ(e^{λs} x_0 + conv(s)) ds
    double tail = 0.0;   // left-point ∫_0^{t_i} e^{λ(t_i - s)} λ z_s ds
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        const double h = g.spacing(i - 1);
        const double e = std::exp(lambda * h);
        outer += lambda * (std::exp(lambda * g[i - 1]) * x0 + conv) * h;
        tail = e * (tail + lambda * z.right(i - 1) * h);
        conv = e * (conv + z.left(i) - z.right(i - 1)) + z.jump(i);
      }
      r.q1[i] += a * outer;
      r.q2[i] += a * (conv + std::exp(lambda * g[i]) * x0 - z.right(i));
      r.q3[i] += a * tail;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    r.dev12 = std::max(r.dev12, std::abs(r.q1[i] - r.q2[i]));
    r.dev23 = std::max(r.dev23, std::abs(r.q2[i] - r.q3[i]));
    r.dev13 = std::max(r.dev13, std::abs(r.q1[i] - r.q3[i]));
  }
  return r;
}

double convolution_by_pairing(const SeqSemimartingale& x, const DiagonalSemigroup& s, const FiniteSeq& phi,
                              std::size_t node) {
  require_dimension(s, x.dimension(), "convolution_by_pairing");
  const TimeGrid& g = *x.grid();
  if (node >= g.size()) throw std::out_of_range("convolution_by_pairing: node beyond grid");
  GridIntegrand h(x.grid(), x.dimension());
  const double t = g[node];
  for (std::size_t i = 0; i < node; ++i) {
    const FiniteSeq cell = semigroup_apply(s, t - g[i], phi);
    for (const auto& [k, a] : cell.entries()) h.cell(i)[k] = a;
  }
  for (std::size_t j = 1; j <= g.cells(); ++j) {
    std::span<double> row = h.at_mut(j);
    std::fill(row.begin(), row.end(), 0.0);
    if (j > node) continue;
    const FiniteSeq v = semigroup_apply(s, t - g[j], phi);
    for (const auto& [k, a] : v.entries()) row[k] = a;
  }
  return integrate_grid(h, without_parts(x)).path.right(node);
}

}  // namespace cylint
