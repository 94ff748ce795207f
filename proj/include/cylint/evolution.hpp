#pragma once

// dY = A'Y dt + dX for a diagonal generator A e_k = λ_k e_k (heat modes on
// the torus: λ_k = -k²). All ds integrals use left-point quadrature.

#include <span>
#include <vector>

#include "cylint/cylsemi.hpp"
#include "cylint/integrate.hpp"

namespace cylint {

struct DiagonalSemigroup {
  std::vector<double> eigenvalues;

  /// λ_k = -k² for k = 0..d-1.
  static DiagonalSemigroup heat(std::size_t dimension);
  std::size_t dimension() const { return eigenvalues.size(); }
  void validate() const;
};

/// S(t)φ: coordinate k scaled by e^{λ_k t}.
FiniteSeq semigroup_apply(const DiagonalSemigroup& s, double t, const FiniteSeq& phi);
/// Aφ: coordinate k scaled by λ_k.
FiniteSeq generator_apply(const DiagonalSemigroup& s, const FiniteSeq& phi);

/// U^k_t = X^k_t - e^{λ_k t} X^k_0 + λ_k ∫_0^t e^{λ_k(t-s)} X^k_s ds.
SeqSemimartingale stochastic_convolution(const SeqSemimartingale& x, const DiagonalSemigroup& s);

struct SEESolution {
  SeqSemimartingale process;
  DualVec eta;
  DiagonalSemigroup semigroup;
};

/// Z^k_t = e^{λ_k t} η^k + U^k_t.
SEESolution mild_solution(const DualVec& eta, const SeqSemimartingale& x, const DiagonalSemigroup& s);

/// R_t = <Z_t,φ> - <η,φ> - ∫_0^t <Z_r,Aφ> dr - <X_t - X_0,φ>.
ScalarPath weak_residual(const SEESolution& z, const SeqSemimartingale& x, const FiniteSeq& phi);

/// The three sides of the convolution Fubini identity at every node:
///   q1 = ∫_0^t (∫_0^s S(s-r)Aφ dX_r) ds
///   q2 = ∫_0^t S(t-r)φ dX_r - <X_t,φ>
///   q3 = ∫_0^t (∫_0^s S(t-s)Aφ dX_r) ds
/// with stochastic integrals carrying the <X_0, ·> term.
struct SeeFubiniResult {
  std::vector<double> q1, q2, q3;
  double dev12 = 0.0, dev23 = 0.0, dev13 = 0.0;

  double max_deviation() const;
};

SeeFubiniResult fubini_see_check(const SeqSemimartingale& x, const DiagonalSemigroup& s, const FiniteSeq& phi);

/// ∫_0^{t_n} S(t_n - r)φ dX_r computed as a grid integral with the
/// integrand r ↦ S(t_n - r)φ; an independent route to <U_{t_n}, φ>.
double convolution_by_pairing(const SeqSemimartingale& x, const DiagonalSemigroup& s, const FiniteSeq& phi,
                              std::size_t node);

}  // namespace cylint
