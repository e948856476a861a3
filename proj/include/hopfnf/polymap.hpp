#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hopfnf/error.hpp"
#include "hopfnf/linalg.hpp"
#include "hopfnf/multi_index.hpp"

namespace hopfnf {

/// Relative threshold (per degree) below which arithmetic results are
/// dropped. Zero disables pruning except for exact zeros.
inline constexpr double kDefaultPrune = 1e-14;

/**
 * A polynomial map C^n -> C^n fixing the origin, truncated at degree D:
 * sum over (I, j) of c_{I,j} z^I e_j with 1 <= |I| <= D.
 *
 * Terms are stored sparsely in graded-then-<< order with no exact zeros, so
 * two jets compare equal exactly when their term lists agree. D is the
 * order of the jet; it does not take part in equality.
 */
class PolyJet {
 public:
  using TermMap = std::map<TermKey, Complex, GradedTermLess>;

  PolyJet() = default;
  PolyJet(std::size_t n, int degree) : n_(n), degree_(degree) {
    if (n == 0 || n > kMaxDimension)
      throw Error(ErrorKind::InvalidInput, "dimension must be in 1.." + std::to_string(kMaxDimension));
    if (degree < 1) throw Error(ErrorKind::DegreeOutOfRange, "truncation degree must be >= 1");
  }

  static PolyJet identity(std::size_t n, int degree) {
    PolyJet id(n, degree);
    for (std::size_t k = 0; k < n; ++k) id.set({MultiIndex::unit(n, k), static_cast<int>(k)}, 1.0);
    return id;
  }

  /// The linear map z -> A z as a jet; entry A(j, k) is the coefficient of z_k e_j.
  static PolyJet linear(const ComplexMatrix& a, int degree) {
    check_square_finite(a);
    const auto n = static_cast<std::size_t>(a.rows());
    PolyJet out(n, degree);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        out.set({MultiIndex::unit(n, k), static_cast<int>(j)}, a(static_cast<Eigen::Index>(j),
                                                                 static_cast<Eigen::Index>(k)));
    return out;
  }

  std::size_t dimension() const noexcept { return n_; }
  int truncation_degree() const noexcept { return degree_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  /// Highest degree actually present (0 for the zero map).
  int max_degree() const noexcept { return terms_.empty() ? 0 : terms_.rbegin()->first.index.degree(); }

  Complex coefficient(const TermKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
  }

  void set(const TermKey& key, Complex value) {
    validate(key);
    if (value == Complex(0.0, 0.0)) {
      terms_.erase(key);
    } else {
      terms_[key] = value;
    }
  }

  void add(const TermKey& key, Complex value) {
    validate(key);
    if (value == Complex(0.0, 0.0)) return;
    auto [it, inserted] = terms_.try_emplace(key, value);
    if (!inserted) {
      it->second += value;
      if (it->second == Complex(0.0, 0.0)) terms_.erase(it);
    }
  }

  /// Linear part as a matrix: entry (j, k) is the coefficient of z_k e_j.
  ComplexMatrix linear_part() const {
    const auto n = static_cast<Eigen::Index>(n_);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (const auto& [key, c] : terms_) {
      if (key.index.degree() != 1) break;
      std::size_t k = 0;
      while (key.index[k] == 0) ++k;
      a(key.component, static_cast<Eigen::Index>(k)) = c;
    }
    return a;
  }

  /// Same terms up to degree `d`, with order `d`.
  PolyJet truncated(int d) const {
    PolyJet out(n_, d);
    for (const auto& [key, c] : terms_) {
      if (key.index.degree() > d) break;
      out.terms_.emplace_hint(out.terms_.end(), key, c);
    }
    return out;
  }

  /// Re-labels the order; terms above `d` must not exist.
  PolyJet with_degree(int d) const {
    if (max_degree() > d) throw Error(ErrorKind::DegreeOutOfRange, "jet has terms above the new order");
    PolyJet out(*this);
    out.degree_ = d;
    return out;
  }

  /// Drops coefficients smaller than `rel` times the largest coefficient of
  /// the same degree.
  void prune(double rel) {
    if (rel <= 0.0) return;
    std::vector<double> largest(static_cast<std::size_t>(max_degree()) + 1, 0.0);
    for (const auto& [key, c] : terms_) {
      auto& m = largest[static_cast<std::size_t>(key.index.degree())];
      m = std::max(m, std::abs(c));
    }
    std::erase_if(terms_, [&](const auto& kv) {
      return std::abs(kv.second) < rel * largest[static_cast<std::size_t>(kv.first.index.degree())];
    });
  }

  PolyJet& operator+=(const PolyJet& other) {
    check_same_dimension(other);
    degree_ = std::max(degree_, other.degree_);
    for (const auto& [key, c] : other.terms_) add(key, c);
    return *this;
  }

  PolyJet& operator-=(const PolyJet& other) {
    check_same_dimension(other);
    degree_ = std::max(degree_, other.degree_);
    for (const auto& [key, c] : other.terms_) add(key, -c);
    return *this;
  }

  PolyJet& operator*=(Complex s) {
    if (s == Complex(0.0, 0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [key, c] : terms_) c *= s;
    std::erase_if(terms_, [](const auto& kv) { return kv.second == Complex(0.0, 0.0); });
    return *this;
  }

  friend PolyJet operator+(PolyJet a, const PolyJet& b) { return a += b; }
  friend PolyJet operator-(PolyJet a, const PolyJet& b) { return a -= b; }
  friend PolyJet operator*(Complex s, PolyJet a) { return a *= s; }

  friend bool operator==(const PolyJet& a, const PolyJet& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  void check_same_dimension(const PolyJet& other) const {
    if (other.n_ != n_) throw Error(ErrorKind::DimensionMismatch, "jets have different dimensions");
  }

 private:
  void validate(const TermKey& key) const {
    if (key.index.size() != n_) throw Error(ErrorKind::DimensionMismatch, "multi-index length");
    if (key.component < 0 || static_cast<std::size_t>(key.component) >= n_)
      throw Error(ErrorKind::InvalidInput, "component out of range");
    const int d = key.index.degree();
    if (d < 1 || d > degree_)
      throw Error(ErrorKind::DegreeOutOfRange,
                  "term degree " + std::to_string(d) + " outside 1.." + std::to_string(degree_));
  }

  std::size_t n_ = 0;
  int degree_ = 1;
  TermMap terms_;
};

/// A jet whose terms all have one degree q.
struct HomogeneousPart {
  int degree = 1;
  PolyJet map;
};

/// Largest coefficient modulus of a - b over the union of supports.
inline double max_abs_difference(const PolyJet& a, const PolyJet& b) {
  a.check_same_dimension(b);
  double worst = 0.0;
  for (const auto& [key, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coefficient(key)));
  for (const auto& [key, c] : b.terms())
    if (a.terms().find(key) == a.terms().end()) worst = std::max(worst, std::abs(c));
  return worst;
}

inline double max_abs_coefficient(const PolyJet& f) {
  double m = 0.0;
  for (const auto& [key, c] : f.terms()) m = std::max(m, std::abs(c));
  return m;
}

namespace detail {

/// Dense indexing of all monomials of degree <= D in n variables, graded by
/// degree, ranked within a degree by the combinatorial number system.
class MonomialSpace {
 public:
  MonomialSpace(std::size_t n, int max_degree) : n_(n), max_degree_(max_degree) {
    const std::size_t top = static_cast<std::size_t>(max_degree) + n + 1;
    binom_.assign(top + 1, std::vector<std::size_t>(n + 1, 0));
    for (std::size_t a = 0; a <= top; ++a)
      for (std::size_t b = 0; b <= n; ++b) binom_[a][b] = binomial(a, b);
    size_ = binom_[n + static_cast<std::size_t>(max_degree)][n];
    exps_.resize(size_ * n_);
    degree_of_.resize(size_);
    for (int d = 0; d <= max_degree; ++d) {
      for (const auto& mi : multi_indices_of_degree(n, d)) {
        const std::size_t r = rank(mi.exponents());
        std::copy(mi.exponents().begin(), mi.exponents().end(), exps_.begin() + static_cast<std::ptrdiff_t>(r * n_));
        degree_of_[r] = d;
      }
    }
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t n() const noexcept { return n_; }
  int max_degree() const noexcept { return max_degree_; }
  int degree_of(std::size_t r) const { return degree_of_[r]; }
  std::span<const int> exponents(std::size_t r) const { return {exps_.data() + r * n_, n_}; }

  /// Index of the first monomial of degree d.
  std::size_t degree_begin(int d) const { return binom_[n_ + static_cast<std::size_t>(d) - 1][n_]; }

  std::size_t rank(std::span<const int> e) const {
    std::size_t d = 0;
    for (int x : e) d += static_cast<std::size_t>(x);
    std::size_t r = d == 0 ? 0 : binom_[n_ + d - 1][n_];
    std::size_t prefix = 0;
    for (std::size_t k = 0; k + 1 < n_; ++k) {
      prefix += static_cast<std::size_t>(e[k]);
      r += binom_[prefix + k][k + 1];
    }
    return r;
  }

  /// Rank of the product monomial a * b (sum of exponents).
  std::size_t product_rank(std::size_t a, std::size_t b) const {
    const int* ea = exps_.data() + a * n_;
    const int* eb = exps_.data() + b * n_;
    std::size_t d = static_cast<std::size_t>(degree_of_[a] + degree_of_[b]);
    std::size_t r = d == 0 ? 0 : binom_[n_ + d - 1][n_];
    std::size_t prefix = 0;
    for (std::size_t k = 0; k + 1 < n_; ++k) {
      prefix += static_cast<std::size_t>(ea[k] + eb[k]);
      r += binom_[prefix + k][k + 1];
    }
    return r;
  }

 private:
  std::size_t n_;
  int max_degree_;
  std::size_t size_ = 0;
  std::vector<std::vector<std::size_t>> binom_;
  std::vector<int> exps_;
  std::vector<int> degree_of_;
};

/// Sparse scalar polynomial over a MonomialSpace, as (rank, coefficient) pairs.
using SparseSeries = std::vector<std::pair<std::size_t, Complex>>;

inline SparseSeries multiply_truncated(const MonomialSpace& space, const SparseSeries& a,
                                       const SparseSeries& b, std::vector<Complex>& scratch) {
  scratch.assign(space.size(), Complex(0.0, 0.0));
  std::vector<char> touched(space.size(), 0);
  const int top = space.max_degree();
  for (const auto& [ra, ca] : a) {
    const int da = space.degree_of(ra);
    for (const auto& [rb, cb] : b) {
      if (da + space.degree_of(rb) > top) continue;
      const std::size_t r = space.product_rank(ra, rb);
      scratch[r] += ca * cb;
      touched[r] = 1;
    }
  }
  SparseSeries out;
  for (std::size_t r = 0; r < space.size(); ++r)
    if (touched[r] && scratch[r] != Complex(0.0, 0.0)) out.emplace_back(r, scratch[r]);
  return out;
}

}  // namespace detail

/// Evaluates the stored polynomial at z (no truncation beyond stored terms).
inline ComplexVector evaluate(const PolyJet& f, const ComplexVector& z) {
  if (static_cast<std::size_t>(z.size()) != f.dimension())
    throw Error(ErrorKind::DimensionMismatch, "point dimension differs from jet dimension");
  const auto n = f.dimension();
  const int top = f.max_degree();
  std::vector<std::vector<Complex>> powers(n, std::vector<Complex>(static_cast<std::size_t>(top) + 1, 1.0));
  for (std::size_t k = 0; k < n; ++k)
    for (int p = 1; p <= top; ++p) powers[k][static_cast<std::size_t>(p)] = powers[k][static_cast<std::size_t>(p) - 1] * z(static_cast<Eigen::Index>(k));

  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [key, c] : f.terms()) {
    Complex m = c;
    for (std::size_t k = 0; k < n; ++k)
      if (key.index[k] != 0) m *= powers[k][static_cast<std::size_t>(key.index[k])];
    out(key.component) += m;
  }
  return out;
}

/// A o f, i.e. the linear map applied to every coefficient vector of f.
inline PolyJet apply_linear(const ComplexMatrix& a, const PolyJet& f, double prune = kDefaultPrune) {
  const auto n = f.dimension();
  if (static_cast<std::size_t>(a.rows()) != n || a.cols() != a.rows())
    throw Error(ErrorKind::DimensionMismatch, "apply_linear");
  PolyJet out(n, f.truncation_degree());
  for (const auto& [key, c] : f.terms())
    for (std::size_t i = 0; i < n; ++i) {
      const Complex v = a(static_cast<Eigen::Index>(i), key.component) * c;
      if (v != Complex(0.0, 0.0)) out.add({key.index, static_cast<int>(i)}, v);
    }
  out.prune(prune);
  return out;
}

/**
 * Jet of f o g with every term of degree > D discarded.
 *
 * Each monomial z^I of f is expanded as a product of powers of the
 * components of g; products are memoized along I - e_k chains so that every
 * distinct prefix is multiplied once.
 */
inline PolyJet compose_truncated(const PolyJet& f, const PolyJet& g, int d,
                                 double prune = kDefaultPrune) {
  f.check_same_dimension(g);
  if (d < 1) throw Error(ErrorKind::DegreeOutOfRange, "composition order must be >= 1");
  const auto n = f.dimension();
  PolyJet out(n, d);
  if (f.is_zero()) return out;

  const detail::MonomialSpace space(n, d);
  std::vector<detail::SparseSeries> comps(n);
  for (const auto& [key, c] : g.terms()) {
    if (key.index.degree() > d) break;
    comps[static_cast<std::size_t>(key.component)].emplace_back(space.rank(key.index.exponents()), c);
  }
  for (auto& s : comps) std::sort(s.begin(), s.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  std::unordered_map<std::size_t, detail::SparseSeries> memo;
  memo[0] = {{0, Complex(1.0, 0.0)}};
  std::vector<Complex> scratch;

  // Product series for the monomial with the given exponents.
  std::function<const detail::SparseSeries&(std::vector<int>&)> product =
      [&](std::vector<int>& e) -> const detail::SparseSeries& {
    const std::size_t r = space.rank(e);
    if (auto it = memo.find(r); it != memo.end()) return it->second;
    std::size_t k = n;
    while (k-- > 0)
      if (e[k] != 0) break;
    --e[k];
    const detail::SparseSeries& prefix = product(e);
    ++e[k];
    detail::SparseSeries value = detail::multiply_truncated(space, prefix, comps[k], scratch);
    return memo.emplace(r, std::move(value)).first->second;
  };

  std::vector<int> e(n);
  std::vector<Complex> acc(space.size() * n, Complex(0.0, 0.0));
  for (const auto& [key, c] : f.terms()) {
    // A monomial of degree m composes to terms of degree >= m.
    if (key.index.degree() > d) break;
    std::copy(key.index.exponents().begin(), key.index.exponents().end(), e.begin());
    const auto& series = product(e);
    for (const auto& [r, v] : series) acc[r * n + static_cast<std::size_t>(key.component)] += c * v;
  }
  for (std::size_t r = space.degree_begin(1); r < space.size(); ++r) {
    const auto ex = space.exponents(r);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = acc[r * n + j];
      if (v != Complex(0.0, 0.0)) out.set({MultiIndex(std::vector<int>(ex.begin(), ex.end())), static_cast<int>(j)}, v);
    }
  }
  out.prune(prune);
  return out;
}

/// Two-sided inverse jet of f through degree D.
inline PolyJet jet_inverse(const PolyJet& f, int d, double prune = kDefaultPrune) {
  const auto n = f.dimension();
  const ComplexMatrix a_inv = checked_inverse(f.linear_part(), ErrorKind::SingularLinearPart);
  PolyJet nonlinear(n, std::max(d, f.truncation_degree()));
  for (const auto& [key, c] : f.terms())
    if (key.index.degree() >= 2) nonlinear.set(key, c);

  // g = A^{-1} (Id - N o g); each pass fixes one more degree.
  const PolyJet id = PolyJet::identity(n, d);
  PolyJet g = PolyJet::linear(a_inv, d);
  if (nonlinear.is_zero()) return g;
  for (int pass = 2; pass <= d; ++pass) {
    g = apply_linear(a_inv, id - compose_truncated(nonlinear, g, d, prune), prune);
  }
  return g;
}

/// Q^{-1} o f o Q truncated at D.
inline PolyJet linear_conjugate(const PolyJet& f, const ComplexMatrix& q, int d,
                                double prune = kDefaultPrune) {
  const ComplexMatrix q_inv = checked_inverse(q, ErrorKind::SingularMatrix);
  const PolyJet inner = compose_truncated(f, PolyJet::linear(q, d), d, prune);
  return apply_linear(q_inv, inner, prune);
}

inline HomogeneousPart homogeneous_part(const PolyJet& f, int q) {
  if (q < 1 || q > f.truncation_degree())
    throw Error(ErrorKind::DegreeOutOfRange, "homogeneous_part degree " + std::to_string(q));
  HomogeneousPart h{q, PolyJet(f.dimension(), f.truncation_degree())};
  for (const auto& [key, c] : f.terms())
    if (key.index.degree() == q) h.map.set(key, c);
  return h;
}

}  // namespace hopfnf
