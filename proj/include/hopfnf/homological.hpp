#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hopfnf/error.hpp"
#include "hopfnf/linalg.hpp"
#include "hopfnf/multi_index.hpp"
#include "hopfnf/polymap.hpp"
#include "hopfnf/subresonance.hpp"

namespace hopfnf {

inline constexpr double kDefaultResTol = 1e-9;
/// Divisors below this (relative to |lambda_j|) are flagged as small.
inline constexpr double kSmallDivisorWarn = 1e-6;

/// lambda^I = prod_k lambda_k^{i_k}.
inline Complex eigen_power(const MultiIndex& index, const SpectrumData& spectrum) {
  Complex v(1.0, 0.0);
  for (std::size_t k = 0; k < index.size(); ++k)
    for (int p = 0; p < index[k]; ++p) v *= spectrum.diag[k];
  return v;
}

/// Diagonal entry lambda^I - lambda_j of the homological operator at z^I e_j.
inline Complex homological_divisor(const TermKey& key, const SpectrumData& spectrum) {
  return eigen_power(key.index, spectrum) - spectrum.diag[static_cast<std::size_t>(key.component)];
}

inline bool is_resonant(const TermKey& key, const SpectrumData& spectrum, double res_tol = kDefaultResTol) {
  return std::abs(homological_divisor(key, spectrum)) <=
         res_tol * std::abs(spectrum.diag[static_cast<std::size_t>(key.component)]);
}

/// The basis B^q sorted ascending by <<, with ranks.
struct BasisOrdering {
  int q = 0;
  std::size_t n = 0;
  std::vector<TermKey> elements;
  std::map<TermKey, std::size_t, GradedTermLess> rank;

  std::size_t size() const noexcept { return elements.size(); }
};

inline BasisOrdering basis_ordering(std::size_t n, int q) {
  BasisOrdering b;
  b.q = q;
  b.n = n;
  for (auto& index : multi_indices_of_degree(n, q))
    for (std::size_t j = 0; j < n; ++j) b.elements.push_back({index, static_cast<int>(j)});
  for (std::size_t r = 0; r < b.elements.size(); ++r) b.rank.emplace(b.elements[r], r);
  return b;
}

/// M_L^q(h) = h o L - L o h, with L the adapted triangular matrix.
inline HomogeneousPart apply_M(const SpectrumData& spectrum, const HomogeneousPart& h,
                               double prune = kDefaultPrune) {
  if (h.map.dimension() != spectrum.n) throw Error(ErrorKind::DimensionMismatch, "apply_M");
  const int q = h.degree;
  const PolyJet l = PolyJet::linear(spectrum.t, q);
  PolyJet hl = compose_truncated(h.map, l, q, 0.0);
  PolyJet lh = apply_linear(spectrum.t, h.map.truncated(q), 0.0);
  PolyJet out = hl - lh;
  out.prune(prune);
  return {q, out};
}

inline HomogeneousPart basis_element(std::size_t n, const TermKey& key) {
  HomogeneousPart e{key.index.degree(), PolyJet(n, key.index.degree())};
  e.map.set(key, 1.0);
  return e;
}

/// Matrix of M_L^q in the <<-ordered basis of H^q.
struct OperatorMatrix {
  int q = 0;
  BasisOrdering ordering;
  ComplexMatrix entries;
  std::vector<Complex> diag;  ///< lambda^I - lambda_j along the ordering
};

inline OperatorMatrix build_matrix(const SpectrumData& spectrum, int q) {
  if (q < 2) throw Error(ErrorKind::DegreeOutOfRange, "build_matrix needs q >= 2");
  OperatorMatrix m;
  m.q = q;
  m.ordering = basis_ordering(spectrum.n, q);
  const auto size = static_cast<Eigen::Index>(m.ordering.size());
  m.entries = ComplexMatrix::Zero(size, size);
  for (Eigen::Index c = 0; c < size; ++c) {
    const TermKey& key = m.ordering.elements[static_cast<std::size_t>(c)];
    m.diag.push_back(homological_divisor(key, spectrum));
    const HomogeneousPart column = apply_M(spectrum, basis_element(spectrum.n, key), 0.0);
    for (const auto& [row_key, v] : column.map.terms())
      m.entries(static_cast<Eigen::Index>(m.ordering.rank.at(row_key)), c) = v;
  }
  return m;
}

/// Coordinates of a homogeneous map in the ordering of `b`.
inline ComplexVector to_coordinates(const BasisOrdering& b, const HomogeneousPart& h) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(b.size()));
  for (const auto& [key, c] : h.map.terms()) {
    if (key.index.degree() != b.q) throw Error(ErrorKind::DegreeMismatch, "to_coordinates");
    v(static_cast<Eigen::Index>(b.rank.at(key))) = c;
  }
  return v;
}

inline HomogeneousPart from_coordinates(const BasisOrdering& b, const ComplexVector& v) {
  HomogeneousPart h{b.q, PolyJet(b.n, b.q)};
  for (std::size_t r = 0; r < b.size(); ++r) h.map.set(b.elements[r], v(static_cast<Eigen::Index>(r)));
  return h;
}

struct DivisorWarning {
  TermKey position;
  double relative_divisor = 0.0;  ///< |lambda^I - lambda_j| / |lambda_j|
};

struct Splitting {
  HomogeneousPart kept;        ///< resonant part h, stays in the normal form
  HomogeneousPart eliminated;  ///< f with H = h + M(f)
  /// Smallest |lambda^I - lambda_j| / |lambda_j| actually divided by; +inf
  /// when nothing was divided.
  double min_relative_divisor = std::numeric_limits<double>::infinity();
  std::vector<DivisorWarning> warnings;
};

/**
 * Splits H = h + M_L^q(f) with h supported on resonant positions.
 *
 * Back-substitution over the << ranks, highest first: a non-resonant
 * position is divided into f and its operator column subtracted from the
 * residual; a resonant position moves into h. Columns of M only reach ranks
 * at or below their own, so each position is final once visited.
 */
inline Splitting split_homogeneous(const SpectrumData& spectrum, const HomogeneousPart& big_h,
                                   double res_tol = kDefaultResTol, double sr_tol = kDefaultSrTol,
                                   double prune = kDefaultPrune) {
  const int q = big_h.degree;
  if (q < 2) throw Error(ErrorKind::DegreeOutOfRange, "split_homogeneous needs q >= 2");
  const std::size_t n = spectrum.n;
  Splitting out;
  out.kept = {q, PolyJet(n, q)};
  out.eliminated = {q, PolyJet(n, q)};

  PolyJet residual = big_h.map.truncated(q);
  while (!residual.is_zero()) {
    const auto it = std::prev(residual.terms().end());
    const TermKey key = it->first;
    const Complex coeff = it->second;
    if (key.index.degree() != q) throw Error(ErrorKind::DegreeMismatch, "split_homogeneous input is not homogeneous");

    const Complex divisor = homological_divisor(key, spectrum);
    const double lambda_j = std::abs(spectrum.diag[static_cast<std::size_t>(key.component)]);
    const double relative = std::abs(divisor) / lambda_j;
    if (relative <= res_tol) {
      if (!is_subresonant_monomial(key, spectrum, sr_tol))
        throw Error(ErrorKind::IllConditionedResonance,
                    "resonant position is not sub-resonant; res_tol and sr_tol disagree for this spectrum");
      out.kept.map.set(key, coeff);
      residual.set(key, 0.0);
      continue;
    }

    const Complex f = coeff / divisor;
    out.eliminated.map.set(key, f);
    out.min_relative_divisor = std::min(out.min_relative_divisor, relative);
    if (relative < kSmallDivisorWarn) out.warnings.push_back({key, relative});
    HomogeneousPart column = apply_M(spectrum, basis_element(n, key), 0.0);
    residual -= f * column.map;
    residual.set(key, 0.0);
    residual.prune(0.0);
  }
  out.kept.map.prune(prune);
  out.eliminated.map.prune(prune);
  return out;
}

}  // namespace hopfnf
