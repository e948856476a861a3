#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hopfnf/error.hpp"

namespace hopfnf {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr std::size_t kMaxDimension = 16;
inline constexpr double kDefaultBlockTol = 1e-9;
inline constexpr double kDefaultMargin = 1e-9;
// Snap for ratios of logarithms that are integers in exact arithmetic,
// e.g. ln(1/8)/ln(1/2).
inline constexpr double kRatioSnap = 1e-9;

inline void check_square_finite(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
  if (a.rows() == 0) throw Error(ErrorKind::InvalidInput, "empty matrix");
  if (static_cast<std::size_t>(a.rows()) > kMaxDimension)
    throw Error(ErrorKind::InvalidInput, "dimension exceeds " + std::to_string(kMaxDimension));
  if (!a.allFinite()) throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
}

inline bool is_upper_triangular(const ComplexMatrix& a) {
  for (Eigen::Index i = 1; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (a(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

namespace detail {

// Swap the adjacent diagonal entries k, k+1 of the upper-triangular T by a
// Givens rotation G; T <- G^H T G and Q <- Q G keep A = Q T Q^H.
inline void swap_schur_pair(ComplexMatrix& t, ComplexMatrix& q, Eigen::Index k) {
  const Complex t11 = t(k, k);
  const Complex t22 = t(k + 1, k + 1);
  const Complex a = t(k, k + 1);
  const Complex b = t22 - t11;
  const double r = std::hypot(std::abs(a), std::abs(b));
  if (r == 0.0) return;
  Eigen::Matrix2cd g;
  g(0, 0) = a / r;
  g(1, 0) = b / r;
  g(0, 1) = -std::conj(b) / r;
  g(1, 1) = std::conj(a) / r;

  t.middleRows(k, 2) = (g.adjoint() * t.middleRows(k, 2)).eval();
  t.middleCols(k, 2) = (t.middleCols(k, 2) * g).eval();
  q.middleCols(k, 2) = (q.middleCols(k, 2) * g).eval();
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  t(k + 1, k) = Complex(0.0, 0.0);
}

}  // namespace detail

struct Triangularization {
  ComplexMatrix q;  ///< unitary, A = Q T Q^H
  ComplexMatrix t;  ///< upper triangular, diagonal moduli nondecreasing
};

/// Unitary triangularization with the diagonal sorted by nondecreasing
/// modulus. Equal moduli (within `tie_tol`, relative) keep their order.
/// An input that is already upper triangular and sorted returns Q = I.
inline Triangularization triangularize(const ComplexMatrix& a, double tie_tol = kDefaultBlockTol,
                                       int max_iterations = 0) {
  check_square_finite(a);
  const Eigen::Index n = a.rows();
  Triangularization out;
  if (is_upper_triangular(a)) {
    out.q = ComplexMatrix::Identity(n, n);
    out.t = a;
  } else {
    Eigen::ComplexSchur<ComplexMatrix> schur;
    if (max_iterations > 0) schur.setMaxIterations(max_iterations);
    schur.compute(a);
    if (schur.info() != Eigen::Success)
      throw Error(ErrorKind::NonConvergence, "Schur iteration did not converge");
    out.q = schur.matrixU();
    out.t = schur.matrixT().triangularView<Eigen::Upper>();
  }

  // Bubble sort by adjacent swaps is stable, which is what keeps ties in order.
  auto greater = [tie_tol](Complex x, Complex y) {
    return std::abs(x) > std::abs(y) * (1.0 + tie_tol);
  };
  for (Eigen::Index pass = 0; pass < n; ++pass) {
    bool swapped = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (greater(out.t(k, k), out.t(k + 1, k + 1))) {
        detail::swap_schur_pair(out.t, out.q, k);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  return out;
}

/// The adapted linear part L together with its modulus-block structure.
struct SpectrumData {
  std::size_t n = 0;
  ComplexMatrix t;                          ///< adapted upper-triangular L
  std::vector<Complex> diag;                ///< lambda_1..lambda_n
  std::vector<std::vector<int>> blocks;     ///< coordinates grouped by equal modulus
  std::vector<int> block_of;                ///< coordinate -> block
  std::vector<double> block_log_modulus;    ///< ln|lambda| per block
  int c0 = 1;                               ///< ceil(ln|lambda_1| / ln|lambda_n|)
  ComplexMatrix basis_change;               ///< Q, original -> adapted

  std::size_t block_count() const noexcept { return blocks.size(); }

  /// ln|lambda_1| / ln|lambda_n|, the degree bound for sub-resonant terms.
  double degree_bound() const {
    return block_log_modulus.front() / block_log_modulus.back();
  }

  /// Largest degree a sub-resonant monomial can have.
  int degree_cap() const { return static_cast<int>(std::floor(degree_bound() + kRatioSnap)); }

  double log_modulus(std::size_t coordinate) const {
    return block_log_modulus[static_cast<std::size_t>(block_of[coordinate])];
  }

  double max_modulus() const { return std::exp(block_log_modulus.back()); }
  double min_modulus() const { return std::exp(block_log_modulus.front()); }
};

inline bool same_spectrum(const SpectrumData& a, const SpectrumData& b) {
  return a.n == b.n && a.t == b.t && a.blocks == b.blocks;
}

/// Validates that T is upper triangular, contracting, and sorted by modulus,
/// and groups its coordinates into modulus blocks.
inline SpectrumData analyze_spectrum(const ComplexMatrix& t, double block_tol = kDefaultBlockTol,
                                     double margin = kDefaultMargin) {
  check_square_finite(t);
  if (!is_upper_triangular(t))
    throw Error(ErrorKind::NotTriangular, "linear part has nonzero subdiagonal entries");

  SpectrumData s;
  s.n = static_cast<std::size_t>(t.rows());
  s.t = t;
  s.basis_change = ComplexMatrix::Identity(t.rows(), t.cols());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const Complex lambda = t(i, i);
    const double m = std::abs(lambda);
    if (!(m > margin) || !(m < 1.0 - margin))
      throw Error(ErrorKind::NotContracting, "eigenvalue modulus " + std::to_string(m) +
                                                 " is outside (0, 1)");
    s.diag.push_back(lambda);
  }

  s.block_of.assign(s.n, 0);
  double block_modulus = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double m = std::abs(s.diag[i]);
    if (i > 0 && m < block_modulus * (1.0 - block_tol))
      throw Error(ErrorKind::UnorderedSpectrum, "diagonal moduli are not nondecreasing");
    if (i == 0 || m > block_modulus * (1.0 + block_tol)) {
      s.blocks.emplace_back();
      s.block_log_modulus.push_back(std::log(m));
      block_modulus = m;
    }
    s.blocks.back().push_back(static_cast<int>(i));
    s.block_of[i] = static_cast<int>(s.blocks.size() - 1);
  }
  s.c0 = std::max(1, static_cast<int>(std::ceil(s.degree_bound() - kRatioSnap)));
  return s;
}

struct NilpotentRescaling {
  ComplexMatrix s;       ///< diag(1, delta, delta^2, ...)
  ComplexMatrix t;       ///< S^{-1} T S
  double delta = 1.0;
};

/// Conjugates T by a diagonal scaling so every strictly upper entry is at most
/// eps in modulus. Diagonal entries are untouched.
inline NilpotentRescaling rescale_nilpotent(const ComplexMatrix& t, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "rescale_nilpotent needs eps > 0");
  if (!is_upper_triangular(t)) throw Error(ErrorKind::NotTriangular, "rescale_nilpotent");
  const Eigen::Index n = t.rows();
  double largest = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) largest = std::max(largest, std::abs(t(i, j)));

  NilpotentRescaling out;
  out.delta = largest > eps ? eps / largest : 1.0;
  out.s = ComplexMatrix::Identity(n, n);
  out.t = t;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.s(i, i) = std::pow(out.delta, static_cast<double>(i));
    for (Eigen::Index j = i + 1; j < n; ++j)
      out.t(i, j) = t(i, j) * std::pow(out.delta, static_cast<double>(j - i));
  }
  return out;
}

/// Inverse with a conditioning guard; throws `kind` when singular or worse
/// than `max_condition`.
inline ComplexMatrix checked_inverse(const ComplexMatrix& a, ErrorKind kind,
                                     double max_condition = 1e12) {
  check_square_finite(a);
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || smax / smin > max_condition)
    throw Error(kind, "matrix is singular or ill-conditioned");
  return a.inverse();
}

/// Numerical rank by fully pivoted elimination; pivots below
/// `threshold * max pivot` count as zero.
inline Eigen::Index numeric_rank(const ComplexMatrix& m, double threshold) {
  Eigen::FullPivLU<ComplexMatrix> lu(m);
  lu.setThreshold(threshold);
  return lu.rank();
}

}  // namespace hopfnf
