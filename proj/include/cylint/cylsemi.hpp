#pragma once

// Truncated cylindrical semimartingale X(φ) = Σ a_j Z^j built from d
// coordinate paths, the finitely supported test sequences φ and the dense
// dual vectors they pair with.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "cylint/grid_paths.hpp"

namespace cylint {

/// φ = Σ a_j e_j with finitely many nonzero a_j, stored sorted by index.
class FiniteSeq {
 public:
  using Entry = std::pair<std::size_t, double>;

  FiniteSeq() = default;
  /// Duplicate indices are summed; zero values are dropped.
  FiniteSeq(std::initializer_list<Entry> entries);
  explicit FiniteSeq(std::vector<Entry> entries);

  static FiniteSeq basis(std::size_t j, double a = 1.0) { return FiniteSeq({{j, a}}); }
  /// Nonzero entries of a dense vector.
  static FiniteSeq from_dense(std::span<const double> values);

  std::span<const Entry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  double operator[](std::size_t j) const;
  /// One past the largest nonzero index (0 for the zero sequence).
  std::size_t support_bound() const { return entries_.empty() ? 0 : entries_.back().first + 1; }
  std::vector<double> dense(std::size_t dimension) const;

  friend FiniteSeq operator+(const FiniteSeq& a, const FiniteSeq& b);
  friend FiniteSeq operator*(double c, const FiniteSeq& a);
  friend bool operator==(const FiniteSeq&, const FiniteSeq&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Element of the d-dimensional truncation of ℝ^ℕ.
using DualVec = std::vector<double>;

/// Σ_j a_j x_j. Throws std::out_of_range when φ reaches past x.
double pair(std::span<const double> x, const FiniteSeq& phi);

/// d coordinate paths on one shared grid (one scenario).
class CoordinatePaths {
 public:
  std::size_t dimension() const { return coords_.size(); }
  const GridPtr& grid() const { return grid_; }
  const ScalarPath& coordinate(std::size_t k) const { return coords_.at(k); }
  std::span<const ScalarPath> coordinates() const { return coords_; }
  bool has_decomposition() const;
  bool has_jumps() const;

  /// (Z¹_t, …, Z^d_t) at node i: the regular càdlàg version.
  DualVec node_value(std::size_t i) const;
  DualVec left_value(std::size_t i) const;
  /// Right minus left coordinate values at node i.
  DualVec jump_at(std::size_t i) const;
  /// Same, for a time that must be a node.
  DualVec jump_at_time(double t) const;

 protected:
  CoordinatePaths() = default;
  explicit CoordinatePaths(std::vector<ScalarPath> coords);

  GridPtr grid_;
  std::vector<ScalarPath> coords_;
};

/// The integrator X, valued in the dual.
class SeqSemimartingale : public CoordinatePaths {
 public:
  SeqSemimartingale() = default;
  explicit SeqSemimartingale(std::vector<ScalarPath> coords) : CoordinatePaths(std::move(coords)) {}
};

/// A ⊕ℝ-valued càdlàg process Y with d active coordinates.
class SeqPathPrimal : public CoordinatePaths {
 public:
  SeqPathPrimal() = default;
  explicit SeqPathPrimal(std::vector<ScalarPath> coords) : CoordinatePaths(std::move(coords)) {}
};

/// X(φ) = Σ a_j Z^j with part-wise decomposition.
ScalarPath evaluate(const CoordinatePaths& x, const FiniteSeq& phi);

/// <x_t, y_t> node-wise for a dual/primal pair of equal dimension.
ScalarPath pairing_path(const CoordinatePaths& x, const CoordinatePaths& y);

template <class P>
P stopped(const P& x, StoppingTime tau) {
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (const ScalarPath& z : x.coordinates()) out.push_back(stop_path(z, tau));
  return P(std::move(out));
}

/// Coordinate-wise continuous local martingale parts; requires decompositions.
SeqSemimartingale continuous_mart_part(const SeqSemimartingale& x);

template <class P>
P add(const P& x, const P& y) {
  if (x.dimension() != y.dimension()) throw std::invalid_argument("add: dimensions differ");
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (std::size_t k = 0; k < x.dimension(); ++k) out.push_back(x.coordinate(k) + y.coordinate(k));
  return P(std::move(out));
}

template <class P>
P scale(double c, const P& x) {
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (const ScalarPath& z : x.coordinates()) out.push_back(c * z);
  return P(std::move(out));
}

template <class P>
P restrict_to(const P& x, const GridPtr& coarse) {
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (const ScalarPath& z : x.coordinates()) out.push_back(restrict_to(z, coarse));
  return P(std::move(out));
}

/// Same coordinates with decompositions dropped (cheaper to integrate).
template <class P>
P without_parts(const P& x) {
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (const ScalarPath& z : x.coordinates()) out.push_back(z.without_decomposition());
  return P(std::move(out));
}

/// The dual process read as a primal one (same coordinates): the mirrored
/// pair used for [X, X].
SeqPathPrimal mirror(const SeqSemimartingale& x);

/// First node where |X(φ)| >= level (right values), or never.
StoppingTime hitting_time(const CoordinatePaths& x, const FiniteSeq& phi, double level);

}  // namespace cylint
