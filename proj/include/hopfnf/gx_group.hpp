#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "hopfnf/error.hpp"
#include "hopfnf/linalg.hpp"
#include "hopfnf/normal_form.hpp"
#include "hopfnf/polymap.hpp"
#include "hopfnf/subresonance.hpp"

namespace hopfnf {

/// h(z + tau) - h(tau): the sub-resonant part of t_{-h(tau)} o h o t_tau.
inline SubResonantMap translate_conjugate(const SubResonantMap& h, const ComplexVector& tau,
                                          double tol = kDefaultSrTol, double prune = kDefaultPrune) {
  const std::size_t n = h.dimension();
  if (static_cast<std::size_t>(tau.size()) != n) throw Error(ErrorKind::DimensionMismatch, "translate_conjugate");
  if (tau.isZero(0.0)) return h;

  // Expand each monomial prod_k (z_k + tau_k)^{i_k} binomially; the constant
  // term is exactly the h(tau) being subtracted, so it is skipped.
  const int order = h.jet().truncation_degree();
  PolyJet out(n, order);
  for (const auto& [key, c] : h.jet().terms()) {
    std::vector<int> pick(n, 0);
    while (true) {
      int degree = 0;
      Complex coeff = c;
      for (std::size_t k = 0; k < n; ++k) {
        degree += pick[k];
        const int rest = key.index[k] - pick[k];
        coeff *= static_cast<double>(binomial(static_cast<std::size_t>(key.index[k]), static_cast<std::size_t>(pick[k])));
        if (rest > 0) coeff *= std::pow(tau(static_cast<Eigen::Index>(k)), rest);
      }
      if (degree > 0) out.add({MultiIndex(pick), key.component}, coeff);
      std::size_t k = 0;
      while (k < n && pick[k] == key.index[k]) pick[k++] = 0;
      if (k == n) break;
      ++pick[k];
    }
  }
  out.prune(prune);
  return require_subresonant(out, h.spectrum(), "translate_conjugate", tol);
}

/// z -> tau + h(z), the element t_tau o h of G = C^n x| SR*(L).
class GroupElement {
 public:
  GroupElement(ComplexVector tau, SubResonantMap h) : tau_(std::move(tau)), h_(std::move(h)) {
    if (static_cast<std::size_t>(tau_.size()) != h_.dimension())
      throw Error(ErrorKind::DimensionMismatch, "translation and map dimensions differ");
    checked_inverse(h_.jet().linear_part(), ErrorKind::SingularLinearPart);
  }

  static GroupElement identity(const SpectrumData& spectrum) {
    return {ComplexVector::Zero(static_cast<Eigen::Index>(spectrum.n)),
            require_subresonant(PolyJet::identity(spectrum.n, std::max(1, spectrum.degree_cap())), spectrum,
                                "identity")};
  }

  const ComplexVector& tau() const noexcept { return tau_; }
  const SubResonantMap& map() const noexcept { return h_; }
  const SpectrumData& spectrum() const noexcept { return h_.spectrum(); }

  ComplexVector operator()(const ComplexVector& z) const { return tau_ + evaluate(h_.jet(), z); }

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.tau_ == b.tau_ && a.h_ == b.h_;
  }

 private:
  ComplexVector tau_;
  SubResonantMap h_;
};

/// Canonical form of g1 o g2: (tau1 + h1(tau2), translate_conjugate(h1, tau2) o h2).
inline GroupElement group_mul(const GroupElement& g1, const GroupElement& g2) {
  if (!same_spectrum(g1.spectrum(), g2.spectrum()))
    throw Error(ErrorKind::SpectrumMismatch, "group_mul needs a common spectrum");
  const ComplexVector tau = g1.tau() + evaluate(g1.map().jet(), g2.tau());
  return {tau, sr_compose(translate_conjugate(g1.map(), g2.tau()), g2.map())};
}

/// Functional inverse w -> h^{-1}(w - tau) in canonical form.
inline GroupElement group_inv(const GroupElement& g) {
  const SubResonantMap h_inv = sr_inverse(g.map());
  const ComplexVector shift = -g.tau();
  return {evaluate(h_inv.jet(), shift), translate_conjugate(h_inv, shift)};
}

/// Largest coefficient gap between two elements (translation and map).
inline double max_abs_difference(const GroupElement& a, const GroupElement& b) {
  const double t = (a.tau() - b.tau()).cwiseAbs().maxCoeff();
  return std::max(t, max_abs_difference(a.map().jet(), b.map().jet()));
}

struct Holonomy {
  GroupElement generator;
  NormalFormResult result;
};

/// Generator (0, P) of the holonomy of the Hopf manifold defined by the germ.
inline Holonomy hopf_holonomy(const GermInput& germ, const NormalFormOptions& opts = {}) {
  NormalFormResult result = poincare_dulac(germ, opts);
  GroupElement generator(ComplexVector::Zero(static_cast<Eigen::Index>(result.spectrum.n)), result.normal_form);
  return {std::move(generator), std::move(result)};
}

struct OrbitReport {
  std::vector<ComplexVector> points;
  std::vector<double> norms;
  /// First index from which norms decrease with ratio at most `ratio_bound`;
  /// -1 when that never happens within the sampled orbit.
  int contracting_from = -1;
  double ratio_bound = 0.0;
  double max_ratio_after = 0.0;
};

/// z, g(z), ..., g^k(z) with norm diagnostics.
inline OrbitReport orbit(const GroupElement& g, const ComplexVector& z, int k, double ratio_bound = -1.0) {
  if (k < 0) throw Error(ErrorKind::InvalidInput, "orbit length must be >= 0");
  OrbitReport out;
  out.ratio_bound = ratio_bound > 0.0 ? ratio_bound : (1.0 + g.spectrum().max_modulus()) / 2.0;
  ComplexVector w = z;
  out.points.push_back(w);
  out.norms.push_back(w.norm());
  for (int i = 0; i < k; ++i) {
    w = g(w);
    out.points.push_back(w);
    out.norms.push_back(w.norm());
  }
  // Longest tail along which every step contracts by at most ratio_bound.
  int from = k;
  for (int i = k - 1; i >= 0; --i) {
    const double prev = out.norms[static_cast<std::size_t>(i)];
    const double next = out.norms[static_cast<std::size_t>(i) + 1];
    const double ratio = prev > 0.0 ? next / prev : (next > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > out.ratio_bound) break;
    out.max_ratio_after = std::max(out.max_ratio_after, ratio);
    from = i;
  }
  out.contracting_from = (k > 0 && from == k) ? -1 : from;
  return out;
}

struct AnnulusReport {
  double inner = 0.0;
  double outer = 0.0;
  std::size_t points_checked = 0;
  double max_image_ratio = 0.0;   ///< max ||g(w)|| / ||w|| over the sampled annulus
  double max_image_norm = 0.0;
  bool disjoint_on_samples = false;  ///< every sampled image lies inside ||w|| < inner
  bool certified = false;            ///< max ratio * outer < inner
};

/// Sampled check that g moves the annulus {inner <= ||w|| <= outer} off itself.
inline AnnulusReport annulus_diagnostic(const GroupElement& g, double inner, double outer,
                                        std::size_t shells = 8, std::size_t per_shell = 64,
                                        std::uint64_t seed = 0) {
  if (!(inner > 0.0) || !(outer > inner)) throw Error(ErrorKind::InvalidInput, "annulus needs 0 < inner < outer");
  AnnulusReport out{inner, outer};
  out.disjoint_on_samples = true;
  for (std::size_t s = 0; s < shells; ++s) {
    const double radius = inner + (outer - inner) * static_cast<double>(s) / static_cast<double>(std::max<std::size_t>(1, shells - 1));
    for (const auto& w : sample_sphere(g.spectrum().n, radius, per_shell, seed + s)) {
      const double image = g(w).norm();
      out.max_image_norm = std::max(out.max_image_norm, image);
      out.max_image_ratio = std::max(out.max_image_ratio, image / radius);
      if (image >= inner) out.disjoint_on_samples = false;
      ++out.points_checked;
    }
  }
  out.certified = out.max_image_ratio * outer < inner;
  return out;
}

}  // namespace hopfnf
