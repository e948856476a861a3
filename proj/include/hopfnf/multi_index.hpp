#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "hopfnf/error.hpp"

namespace hopfnf {

/// Exponent vector I = (i_1, ..., i_n) of the monomial z^I.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_) {
      if (e < 0) throw Error(ErrorKind::InvalidInput, "negative exponent in multi-index");
      degree_ += e;
    }
  }
  MultiIndex(std::initializer_list<int> exponents) : MultiIndex(std::vector<int>(exponents)) {}

  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }
  static MultiIndex unit(std::size_t n, std::size_t k) {
    std::vector<int> e(n, 0);
    e.at(k) = 1;
    return MultiIndex(std::move(e));
  }

  std::size_t size() const noexcept { return exps_.size(); }
  int degree() const noexcept { return degree_; }
  int operator[](std::size_t k) const { return exps_[k]; }
  std::span<const int> exponents() const noexcept { return exps_; }

  MultiIndex operator+(const MultiIndex& other) const {
    if (other.size() != size()) throw Error(ErrorKind::DimensionMismatch, "multi-index sizes differ");
    std::vector<int> e(exps_);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += other.exps_[k];
    return MultiIndex(std::move(e));
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.exps_ == b.exps_; }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// The dominance order on multi-indices of equal length: I' << I when the last
/// exponent of I' is larger, ties broken by the previous exponent, and so on.
/// This is the order that makes the homological operator upper triangular.
inline std::strong_ordering dominance_compare(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "multi-index sizes differ");
  for (std::size_t k = a.size(); k-- > 0;) {
    if (a[k] != b[k]) return a[k] > b[k] ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

/// Basis element z^I e_j of the space of homogeneous maps; `component` is 0-based.
struct TermKey {
  MultiIndex index;
  int component = 0;

  friend bool operator==(const TermKey&, const TermKey&) = default;
};

/// Pairs ordered by << on the multi-index, then by component.
inline std::strong_ordering order_compare(const TermKey& a, const TermKey& b) {
  if (a.index.degree() != b.index.degree())
    throw Error(ErrorKind::DegreeMismatch, "order_compare needs equal degrees");
  if (auto c = dominance_compare(a.index, b.index); c != 0) return c;
  return a.component <=> b.component;
}

/// Storage order for jets: graded by degree, then <<, then component.
struct GradedTermLess {
  bool operator()(const TermKey& a, const TermKey& b) const {
    if (a.index.degree() != b.index.degree()) return a.index.degree() < b.index.degree();
    return order_compare(a, b) < 0;
  }
};

struct GradedIndexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return dominance_compare(a, b) < 0;
  }
};

/// All multi-indices of length n and degree q, ascending in <<.
inline std::vector<MultiIndex> multi_indices_of_degree(std::size_t n, int q) {
  std::vector<MultiIndex> out;
  if (n == 0 || q < 0) return out;
  std::vector<int> e(n, 0);
  // Walk i_n from q downward, then i_{n-1}, ...; this yields << order directly.
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int remaining) {
    if (k == 0) {
      e[0] = remaining;
      out.emplace_back(e);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      e[k] = v;
      rec(k - 1, remaining - v);
    }
    e[k] = 0;
  };
  rec(n - 1, q);
  return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// dim H^q = n * C(q + n - 1, n - 1).
inline std::size_t homogeneous_dimension(std::size_t n, int q) {
  return n * binomial(static_cast<std::size_t>(q) + n - 1, n - 1);
}

}  // namespace hopfnf
