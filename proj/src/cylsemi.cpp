#include "cylint/cylsemi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cylint {

namespace {

std::vector<FiniteSeq::Entry> normalize(std::vector<FiniteSeq::Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<FiniteSeq::Entry> out;
  out.reserve(entries.size());
  for (const auto& [j, a] : entries) {
    if (!std::isfinite(a)) throw std::invalid_argument("FiniteSeq entry is not finite");
    if (!out.empty() && out.back().first == j) {
      out.back().second += a;
    } else {
      out.emplace_back(j, a);
    }
  }
  std::erase_if(out, [](const auto& e) { return e.second == 0.0; });
  return out;
}

void require_index(std::size_t j, std::size_t dimension) {
  if (j >= dimension) {
    throw std::out_of_range("coordinate index " + std::to_string(j) + " outside dimension " +
                            std::to_string(dimension));
  }
}

}  // namespace

// ---------------------------------------------------------------- FiniteSeq

FiniteSeq::FiniteSeq(std::initializer_list<Entry> entries)
    : entries_(normalize(std::vector<Entry>(entries))) {}

FiniteSeq::FiniteSeq(std::vector<Entry> entries) : entries_(normalize(std::move(entries))) {}

FiniteSeq FiniteSeq::from_dense(std::span<const double> values) {
  std::vector<Entry> e;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] != 0.0) e.emplace_back(j, values[j]);
  }
  return FiniteSeq(std::move(e));
}

double FiniteSeq::operator[](std::size_t j) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                             [](const Entry& e, std::size_t k) { return e.first < k; });
  return it != entries_.end() && it->first == j ? it->second : 0.0;
}

std::vector<double> FiniteSeq::dense(std::size_t dimension) const {
  std::vector<double> v(dimension, 0.0);
  for (const auto& [j, a] : entries_) {
    require_index(j, dimension);
    v[j] = a;
  }
  return v;
}

FiniteSeq operator+(const FiniteSeq& a, const FiniteSeq& b) {
  std::vector<FiniteSeq::Entry> e(a.entries_);
  e.insert(e.end(), b.entries_.begin(), b.entries_.end());
  return FiniteSeq(std::move(e));
}

FiniteSeq operator*(double c, const FiniteSeq& a) {
  std::vector<FiniteSeq::Entry> e(a.entries_);
  for (auto& entry : e) entry.second *= c;
  return FiniteSeq(std::move(e));
}

double pair(std::span<const double> x, const FiniteSeq& phi) {
  double s = 0.0;
  for (const auto& [j, a] : phi.entries()) {
    require_index(j, x.size());
    s += a * x[j];
  }
  return s;
}

// ---------------------------------------------------------- CoordinatePaths

CoordinatePaths::CoordinatePaths(std::vector<ScalarPath> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("need at least one coordinate");
  grid_ = coords_.front().grid();
  for (const ScalarPath& z : coords_) require_same_grid(grid_, z.grid(), "coordinate paths");
}

bool CoordinatePaths::has_decomposition() const {
  return std::all_of(coords_.begin(), coords_.end(),
                     [](const ScalarPath& z) { return z.has_decomposition(); });
}

bool CoordinatePaths::has_jumps() const {
  return std::any_of(coords_.begin(), coords_.end(), [](const ScalarPath& z) { return z.has_jumps(); });
}

DualVec CoordinatePaths::node_value(std::size_t i) const {
  DualVec v(coords_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = coords_[k].right(i);
  return v;
}

DualVec CoordinatePaths::left_value(std::size_t i) const {
  DualVec v(coords_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = coords_[k].left(i);
  return v;
}

DualVec CoordinatePaths::jump_at(std::size_t i) const {
  if (i >= grid_->size()) throw std::out_of_range("jump_at: node index beyond grid");
  DualVec v(coords_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = coords_[k].jump(i);
  return v;
}

DualVec CoordinatePaths::jump_at_time(double t) const {
  auto i = grid_->find(t);
  if (!i) throw std::invalid_argument("jump_at: time " + std::to_string(t) + " is not a grid node");
  return jump_at(*i);
}

// ------------------------------------------------------------- operations

ScalarPath evaluate(const CoordinatePaths& x, const FiniteSeq& phi) {
  std::vector<std::pair<double, ScalarPath>> terms;
  for (const auto& [j, a] : phi.entries()) {
    require_index(j, x.dimension());
    terms.emplace_back(a, x.coordinate(j));
  }
  if (terms.empty()) {
    ScalarPath zero = ScalarPath::constant(x.grid(), 0.0);
    if (!x.has_decomposition()) return zero;
    return zero.with_decomposition({zero, zero, zero});
  }
  return combine(terms);
}

ScalarPath pairing_path(const CoordinatePaths& x, const CoordinatePaths& y) {
  if (x.dimension() != y.dimension()) throw std::invalid_argument("pairing: dimensions differ");
  require_same_grid(x.grid(), y.grid(), "pairing");
  const std::size_t n = x.grid()->size();
  std::vector<double> left(n, 0.0), right(n, 0.0);
  for (std::size_t k = 0; k < x.dimension(); ++k) {
    const ScalarPath& a = x.coordinate(k);
    const ScalarPath& b = y.coordinate(k);
    for (std::size_t i = 0; i < n; ++i) {
      left[i] += a.left(i) * b.left(i);
      right[i] += a.right(i) * b.right(i);
    }
  }
  return ScalarPath(x.grid(), std::move(left), std::move(right));
}

SeqSemimartingale continuous_mart_part(const SeqSemimartingale& x) {
  std::vector<ScalarPath> out;
  out.reserve(x.dimension());
  for (std::size_t k = 0; k < x.dimension(); ++k) {
    const ScalarPath& z = x.coordinate(k);
    if (!z.has_decomposition()) {
      throw std::invalid_argument("continuous_mart_part: coordinate " + std::to_string(k) +
                                  " has no decomposition");
    }
    const ScalarPath& c = z.decomposition().continuous_martingale;
    const ScalarPath zero = ScalarPath::constant(z.grid(), 0.0);
    out.push_back(c.with_decomposition({c.without_decomposition(), zero, zero}));
  }
  return SeqSemimartingale(std::move(out));
}

SeqPathPrimal mirror(const SeqSemimartingale& x) {
  return SeqPathPrimal(std::vector<ScalarPath>(x.coordinates().begin(), x.coordinates().end()));
}

StoppingTime hitting_time(const CoordinatePaths& x, const FiniteSeq& phi, double level) {
  const ScalarPath z = evaluate(x, phi);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (std::abs(z.right(i)) >= level) return StoppingTime::at(i);
  }
  return StoppingTime::never();
}

}  // namespace cylint
