#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <optional>
#include <vector>

#include "hopfnf/error.hpp"
#include "hopfnf/linalg.hpp"
#include "hopfnf/multi_index.hpp"
#include "hopfnf/polymap.hpp"

namespace hopfnf {

/// Log-space slack for the sub-resonance inequality; keeps resonant
/// equalities from being lost to rounding.
inline constexpr double kDefaultSrTol = 1e-9;
/// Terms above the degree bound that survive a composition are rounding
/// noise below this modulus and a defect above it.
inline constexpr double kExcessTermTol = 1e-10;

/// Block-grouped exponent profile s = (s_1, ..., s_l) of a monomial.
struct TypeVector {
  std::vector<int> s;

  int total() const {
    int t = 0;
    for (int v : s) t += v;
    return t;
  }
  friend bool operator==(const TypeVector&, const TypeVector&) = default;
};

inline TypeVector monomial_type(const MultiIndex& index, const SpectrumData& spectrum) {
  if (index.size() != spectrum.n) throw Error(ErrorKind::DimensionMismatch, "monomial_type");
  TypeVector type{std::vector<int>(spectrum.block_count(), 0)};
  for (std::size_t k = 0; k < index.size(); ++k)
    type.s[static_cast<std::size_t>(spectrum.block_of[k])] += index[k];
  return type;
}

/// ln|lambda_{block(j)}| <= sum_m s_m ln|lambda_m| + tol.
inline bool is_subresonant_monomial(const MultiIndex& index, int component,
                                    const SpectrumData& spectrum, double tol = kDefaultSrTol) {
  const TypeVector type = monomial_type(index, spectrum);
  double rhs = 0.0;
  for (std::size_t m = 0; m < type.s.size(); ++m) rhs += type.s[m] * spectrum.block_log_modulus[m];
  return spectrum.log_modulus(static_cast<std::size_t>(component)) <= rhs + tol;
}

inline bool is_subresonant_monomial(const TermKey& key, const SpectrumData& spectrum,
                                    double tol = kDefaultSrTol) {
  return is_subresonant_monomial(key.index, key.component, spectrum, tol);
}

/// Basis of SR_r(L): all sub-resonant z^I e_j with |I| = r, ascending in <<.
inline std::vector<TermKey> enumerate_subresonant_basis(const SpectrumData& spectrum, int r,
                                                        double tol = kDefaultSrTol) {
  if (r < 1) throw Error(ErrorKind::DegreeOutOfRange, "enumerate_subresonant_basis needs r >= 1");
  std::vector<TermKey> out;
  // Past the degree bound nothing is sub-resonant.
  if (r > spectrum.degree_cap()) return out;
  for (auto& index : multi_indices_of_degree(spectrum.n, r))
    for (std::size_t j = 0; j < spectrum.n; ++j)
      if (is_subresonant_monomial(index, static_cast<int>(j), spectrum, tol))
        out.push_back({index, static_cast<int>(j)});
  return out;
}

struct Certification;

/// A polynomial map every monomial of which is sub-resonant relative to a
/// fixed spectrum. Only obtainable through certification.
class SubResonantMap {
 public:
  const PolyJet& jet() const noexcept { return jet_; }
  const SpectrumData& spectrum() const noexcept { return spectrum_; }
  std::size_t dimension() const noexcept { return spectrum_.n; }

  friend bool operator==(const SubResonantMap& a, const SubResonantMap& b) {
    return a.jet_ == b.jet_ && same_spectrum(a.spectrum_, b.spectrum_);
  }

 private:
  SubResonantMap(PolyJet jet, SpectrumData spectrum)
      : jet_(std::move(jet)), spectrum_(std::move(spectrum)) {}

  friend Certification certify_subresonant(const PolyJet&, const SpectrumData&, double);

  PolyJet jet_;
  SpectrumData spectrum_;
};

struct Certification {
  std::vector<TermKey> offenders;
  std::optional<SubResonantMap> map;  ///< set exactly when offenders is empty

  bool ok() const noexcept { return offenders.empty(); }
  const SubResonantMap& value() const;
};

inline const SubResonantMap& Certification::value() const {
  if (!ok()) throw Error(ErrorKind::CertificationFailure, "map is not sub-resonant");
  return *map;
}

/// Certifies f against the spectrum; on failure returns every offending
/// monomial. The certified jet is re-labelled with order = degree cap.
inline Certification certify_subresonant(const PolyJet& f, const SpectrumData& spectrum,
                                         double tol = kDefaultSrTol) {
  if (f.dimension() != spectrum.n) throw Error(ErrorKind::DimensionMismatch, "certify_subresonant");
  Certification out;
  for (const auto& [key, c] : f.terms())
    if (!is_subresonant_monomial(key, spectrum, tol)) out.offenders.push_back(key);
  if (out.ok()) {
    const int order = std::max({1, spectrum.degree_cap(), f.max_degree()});
    out.map = SubResonantMap(f.with_degree(order), spectrum);
  }
  return out;
}

/// Certification that treats failure as a defect rather than a value.
inline SubResonantMap require_subresonant(const PolyJet& f, const SpectrumData& spectrum,
                                          const std::string& context, double tol = kDefaultSrTol) {
  Certification c = certify_subresonant(f, spectrum, tol);
  if (!c.ok())
    throw Error(ErrorKind::CertificationFailure,
                context + ": " + std::to_string(c.offenders.size()) + " non-sub-resonant term(s)");
  return *c.map;
}

/// True iff A maps each coordinate e_k into the span of coordinates whose
/// block is not below block(k); this is the flag-preservation criterion.
inline bool is_linear_subresonant(const ComplexMatrix& a, const SpectrumData& spectrum) {
  if (static_cast<std::size_t>(a.rows()) != spectrum.n || a.rows() != a.cols())
    throw Error(ErrorKind::DimensionMismatch, "is_linear_subresonant");
  for (std::size_t j = 0; j < spectrum.n; ++j)
    for (std::size_t k = 0; k < spectrum.n; ++k)
      if (spectrum.block_of[j] > spectrum.block_of[k] &&
          a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) != Complex(0.0, 0.0))
        return false;
  return true;
}

namespace detail {

// Composition of certified maps: sub-resonant terms never exceed the degree
// cap, so the product is computed one degree past the cap and that extra
// degree is required to vanish.
inline PolyJet compose_within_cap(const PolyJet& f, const PolyJet& g, const SpectrumData& spectrum,
                                  double prune) {
  const int cap = std::max(1, spectrum.degree_cap());
  PolyJet full = compose_truncated(f, g, cap + 1, prune);
  PolyJet kept(full.dimension(), cap);
  for (const auto& [key, c] : full.terms()) {
    if (key.index.degree() <= cap) {
      kept.set(key, c);
    } else if (std::abs(c) > kExcessTermTol) {
      throw Error(ErrorKind::CertificationFailure,
                  "composition produced a term above the degree bound with modulus " +
                      std::to_string(std::abs(c)));
    }
  }
  return kept;
}

}  // namespace detail

inline SubResonantMap sr_compose(const SubResonantMap& f, const SubResonantMap& g,
                                 double tol = kDefaultSrTol, double prune = kDefaultPrune) {
  if (!same_spectrum(f.spectrum(), g.spectrum()))
    throw Error(ErrorKind::SpectrumMismatch, "sr_compose needs a common spectrum");
  PolyJet h = detail::compose_within_cap(f.jet(), g.jet(), f.spectrum(), prune);
  return require_subresonant(h, f.spectrum(), "sr_compose", tol);
}

struct InversionTrace {
  std::vector<SubResonantMap> factors;  ///< P_1, P_2, ..., P_m
};

/**
 * Exact inverse in SR*(L) by finite elimination. P_1 inverts the linear part;
 * while F o P_1 o ... o P_k still has a lowest nonlinear homogeneous block
 * S, the next factor is Id - S. The inverse is P_1 o ... o P_m.
 */
inline SubResonantMap sr_inverse(const SubResonantMap& f, InversionTrace* trace = nullptr,
                                 double tol = kDefaultSrTol, double prune = kDefaultPrune) {
  const SpectrumData& spectrum = f.spectrum();
  const std::size_t n = spectrum.n;
  const int cap = std::max(1, spectrum.degree_cap());

  const ComplexMatrix a_inv = checked_inverse(f.jet().linear_part(), ErrorKind::SingularLinearPart);
  std::vector<SubResonantMap> factors;
  factors.push_back(require_subresonant(PolyJet::linear(a_inv, cap), spectrum, "sr_inverse P_1", tol));

  PolyJet current = detail::compose_within_cap(f.jet(), factors.back().jet(), spectrum, prune);
  const PolyJet id = PolyJet::identity(n, cap);
  for (int k = 2; k <= cap; ++k) {
    const HomogeneousPart lowest = homogeneous_part(current, k);
    if (lowest.map.is_zero()) continue;
    factors.push_back(require_subresonant(id - lowest.map, spectrum, "sr_inverse P_k", tol));
    current = detail::compose_within_cap(current, factors.back().jet(), spectrum, prune);
  }

  PolyJet inverse = factors.front().jet();
  for (std::size_t i = 1; i < factors.size(); ++i)
    inverse = detail::compose_within_cap(inverse, factors[i].jet(), spectrum, prune);
  if (trace != nullptr) trace->factors = factors;
  return require_subresonant(inverse, spectrum, "sr_inverse", tol);
}

}  // namespace hopfnf
