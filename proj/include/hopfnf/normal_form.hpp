#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hopfnf/error.hpp"
#include "hopfnf/homological.hpp"
#include "hopfnf/linalg.hpp"
#include "hopfnf/polymap.hpp"
#include "hopfnf/subresonance.hpp"

namespace hopfnf {

enum class Frame { Original, Adapted };

/// A contracting germ fixing 0, as a jet of order D_in.
struct GermInput {
  PolyJet jet;
  Frame frame = Frame::Original;
};

struct NormalFormOptions {
  std::optional<int> degree;  ///< truncation D; defaults to c0 + 1
  double res_tol = kDefaultResTol;
  double sr_tol = kDefaultSrTol;
  double block_tol = kDefaultBlockTol;
  double margin = kDefaultMargin;
  double prune = kDefaultPrune;
};

/// A germ moved into adapted coordinates, with the ball on which its orbits
/// provably stay.
struct AdaptedGerm {
  SpectrumData spectrum;
  PolyJet jet;  ///< Q^{-1} o F o Q, linear part exactly T, all input degrees kept
  double contraction_radius = 0.0;  ///< sup-norm radius in adapted coordinates
  double contraction_ratio = 0.0;   ///< ||F(z)|| <= ratio ||z|| on that ball (rescaled norm)
};

namespace detail {

inline PolyJet replace_linear_part(const PolyJet& f, const ComplexMatrix& t) {
  PolyJet out(f.dimension(), f.truncation_degree());
  for (const auto& [key, c] : f.terms())
    if (key.index.degree() >= 2) out.set(key, c);
  return out + PolyJet::linear(t, f.truncation_degree());
}

// Sup-norm ball that F maps into itself: in coordinates where the nilpotent
// part of T is at most eps entrywise, |F_j(z)| <= (|lambda_n| + (n-1) eps) r
// + C r^2 with C the largest nonlinear coefficient mass of a component.
inline void contraction_ball(AdaptedGerm& germ) {
  const std::size_t n = germ.spectrum.n;
  const double top = germ.spectrum.max_modulus();
  const double eps = (1.0 - top) / (4.0 * static_cast<double>(std::max<std::size_t>(1, n - 1)));
  const NilpotentRescaling r = rescale_nilpotent(germ.spectrum.t, eps);
  const double eps_nil = static_cast<double>(n - 1) * eps;
  const PolyJet rescaled = linear_conjugate(germ.jet, r.s, germ.jet.truncation_degree(), 0.0);

  std::vector<double> mass(n, 0.0);
  for (const auto& [key, c] : rescaled.terms())
    if (key.index.degree() >= 2) mass[static_cast<std::size_t>(key.component)] += std::abs(c);
  const double c_mass = *std::max_element(mass.begin(), mass.end());
  const double slack = 1.0 - top - eps_nil;
  const double radius = c_mass > 0.0 ? std::min(1.0, slack / (2.0 * c_mass)) : 1.0;

  double smallest_scale = 1.0;
  for (Eigen::Index k = 0; k < r.s.rows(); ++k) smallest_scale = std::min(smallest_scale, std::abs(r.s(k, k)));
  germ.contraction_radius = radius * smallest_scale;
  germ.contraction_ratio = (1.0 + top + eps_nil) / 2.0;
}

}  // namespace detail

/// Validates the linear part and moves the germ into adapted coordinates.
inline AdaptedGerm adapt_germ(const GermInput& germ, const NormalFormOptions& opts = {}) {
  const ComplexMatrix a = germ.jet.linear_part();
  AdaptedGerm out;
  if (germ.frame == Frame::Adapted) {
    out.spectrum = analyze_spectrum(a, opts.block_tol, opts.margin);
    out.jet = germ.jet;
  } else {
    const Triangularization tri = triangularize(a, opts.block_tol);
    out.spectrum = analyze_spectrum(tri.t, opts.block_tol, opts.margin);
    out.spectrum.basis_change = tri.q;
    // The conjugated linear part is T up to rounding; pin it to T exactly.
    out.jet = detail::replace_linear_part(
        linear_conjugate(germ.jet, tri.q, germ.jet.truncation_degree(), opts.prune), tri.t);
  }
  detail::contraction_ball(out);
  return out;
}

/// psi^{-1} o F o psi with psi = Id + f_q, truncated at D.
inline PolyJet conjugate_step(const PolyJet& f, const HomogeneousPart& f_q, int d,
                              double prune = kDefaultPrune) {
  if (f_q.map.is_zero()) return f.truncated(d);
  const PolyJet psi = PolyJet::identity(f.dimension(), d) + f_q.map.truncated(std::min(d, f_q.degree));
  const PolyJet psi_inv = jet_inverse(psi, d, prune);
  return compose_truncated(psi_inv, compose_truncated(f, psi, d, prune), d, prune);
}

struct StepRecord {
  int degree = 0;
  HomogeneousPart kept;        ///< h_q, resonant terms left in P
  HomogeneousPart eliminated;  ///< f_q, psi_q = Id + f_q
  double min_relative_divisor = std::numeric_limits<double>::infinity();
  std::vector<DivisorWarning> warnings;
};

struct ResidualReport {
  double coefficient_max = 0.0;    ///< max |F o Phi - Phi o P| through degree D
  double coefficient_scale = 0.0;  ///< max coefficient of F o Phi
};

struct NormalFormResult {
  SpectrumData spectrum;
  SubResonantMap normal_form;  ///< P = T + sum h_q
  std::vector<StepRecord> steps;
  PolyJet conjugacy;           ///< Phi = psi_2 o ... o psi_D, tangent to the identity
  AdaptedGerm germ;
  int degree = 0;
  ResidualReport residuals;
};

inline ResidualReport coefficient_residual(const PolyJet& f, const PolyJet& phi, const PolyJet& p, int d,
                                           double prune = kDefaultPrune) {
  const PolyJet lhs = compose_truncated(f.truncated(std::min(d, f.truncation_degree())), phi, d, prune);
  const PolyJet rhs = compose_truncated(phi, p, d, prune);
  return {max_abs_difference(lhs, rhs), max_abs_coefficient(lhs)};
}

/**
 * Poincare-Dulac reduction through degree D: for q = 2..D the degree-q part
 * is split into a resonant piece and an operator image, and the image is
 * removed by conjugating with Id + f_q. What remains is the polynomial
 * normal form in SR*(L); Phi is the accumulated coordinate change, with
 * F o Phi = Phi o P through degree D.
 */
inline NormalFormResult poincare_dulac(const GermInput& germ, const NormalFormOptions& opts = {}) {
  AdaptedGerm adapted = adapt_germ(germ, opts);
  const SpectrumData& spectrum = adapted.spectrum;
  const std::size_t n = spectrum.n;
  const int d = opts.degree.value_or(spectrum.c0 + 1);
  if (d < spectrum.c0 + 1)
    throw Error(ErrorKind::DegreeOutOfRange, "truncation degree " + std::to_string(d) +
                                                 " is below c0 + 1 = " + std::to_string(spectrum.c0 + 1));

  PolyJet current = adapted.jet.truncated(d);
  PolyJet phi = PolyJet::identity(n, d);
  PolyJet p = PolyJet::linear(spectrum.t, d);
  std::vector<StepRecord> steps;
  for (int q = 2; q <= d; ++q) {
    Splitting split = split_homogeneous(spectrum, homogeneous_part(current, q), opts.res_tol, opts.sr_tol,
                                        opts.prune);
    if (!split.eliminated.map.is_zero()) {
      current = conjugate_step(current, split.eliminated, d, opts.prune);
      phi = compose_truncated(phi, PolyJet::identity(n, d) + split.eliminated.map, d, opts.prune);
    }
    p += split.kept.map;
    steps.push_back({q, std::move(split.kept), std::move(split.eliminated), split.min_relative_divisor,
                     std::move(split.warnings)});
  }

  SubResonantMap normal_form = require_subresonant(p, spectrum, "poincare_dulac", opts.sr_tol);
  ResidualReport residuals = coefficient_residual(adapted.jet, phi, normal_form.jet(), d, opts.prune);
  return NormalFormResult{spectrum, std::move(normal_form), std::move(steps), std::move(phi),
                          std::move(adapted), d, residuals};
}

struct PhiOptions {
  int p_max = 60;
  std::optional<double> cauchy_tol;  ///< defaults to 1e-12 * max(1, ||z||)
  /// Once the gaps start growing again, the best iterate is accepted if its
  /// gap is below stall_tol * max(1, ||z||) or within noise_factor of the
  /// rounding floor estimated at that step.
  double stall_tol = 1e-9;
  double noise_factor = 16.0;
};

struct PhiEvaluation {
  ComplexVector value;
  int iterations = 0;
  double last_gap = 0.0;
  /// Rough error growth |lambda_1|^{-p} * eps * ||F^p(z)|| of the inverse iterates.
  double amplification = 0.0;
};

/// Evaluates psi = lim_p P^{-p} o F^p, which satisfies psi o F = P o psi.
class PhiEvaluator {
 public:
  PhiEvaluator(PolyJet germ, const SubResonantMap& normal_form, PhiOptions opts = {})
      : germ_(std::move(germ)),
        normal_form_(normal_form.jet()),
        inverse_(sr_inverse(normal_form).jet()),
        min_modulus_(normal_form.spectrum().min_modulus()),
        opts_(opts),
        trivial_(germ_ == normal_form_) {}

  PhiEvaluation operator()(const ComplexVector& z) const {
    if (static_cast<std::size_t>(z.size()) != germ_.dimension())
      throw Error(ErrorKind::DimensionMismatch, "phi_numeric point dimension");
    PhiEvaluation out;
    out.value = z;
    if (trivial_ || z.isZero(0.0)) return out;

    const double scale = std::max(1.0, z.norm());
    const double tol = opts_.cauchy_tol.value_or(1e-12 * scale);
    const double accept = std::max(tol, opts_.stall_tol * scale);

    // P^{-p} expands rounding error by about (|lambda_n| / |lambda_1|)^p, so
    // the gaps shrink, bottom out and then grow. The smallest gap wins.
    PhiEvaluation best;
    best.last_gap = std::numeric_limits<double>::infinity();
    ComplexVector orbit = z;
    ComplexVector previous = z;
    int rising = 0;
    for (int p = 1; p <= opts_.p_max; ++p) {
      orbit = evaluate(germ_, orbit);
      ComplexVector w = orbit;
      for (int k = 0; k < p; ++k) w = evaluate(inverse_, w);
      if (!w.allFinite()) break;
      const double gap = (w - previous).norm();
      const double amplification =
          std::pow(min_modulus_, -p) * std::numeric_limits<double>::epsilon() * orbit.norm();
      if (gap < best.last_gap) {
        best = {w, p, gap, amplification};
        rising = 0;
        if (gap <= tol) return best;
      } else if (++rising >= 3 && settled(best, accept)) {
        return best;
      }
      previous = std::move(w);
    }
    if (settled(best, accept)) return best;
    throw Error(ErrorKind::NoConvergence, "phi iteration did not stabilize within " + std::to_string(opts_.p_max) +
                                              " steps; smallest gap " + std::to_string(best.last_gap));
  }

  const PolyJet& germ() const noexcept { return germ_; }
  const PolyJet& normal_form() const noexcept { return normal_form_; }

 private:
  bool settled(const PhiEvaluation& best, double accept) const {
    return best.last_gap <= std::max(accept, opts_.noise_factor * best.amplification);
  }

  PolyJet germ_;
  PolyJet normal_form_;
  PolyJet inverse_;
  double min_modulus_;
  PhiOptions opts_;
  bool trivial_;
};

inline PhiEvaluation phi_numeric(const PolyJet& f, const SubResonantMap& p, const ComplexVector& z,
                                 PhiOptions opts = {}) {
  return PhiEvaluator(f, p, opts)(z);
}

/// `count` points with Euclidean norm `radius`, reproducible from `seed`.
inline std::vector<ComplexVector> sample_sphere(std::size_t n, double radius, std::size_t count,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<ComplexVector> out;
  for (std::size_t s = 0; s < count; ++s) {
    ComplexVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v(k) = Complex(re, im);
    }
    const double norm = v.norm();
    out.push_back(norm > 0.0 ? ComplexVector(v * (radius / norm)) : v);
  }
  return out;
}

struct SampleCheck {
  ComplexVector point;
  double jet_residual = 0.0;         ///< ||F(Phi(z)) - Phi(P(z))||
  double functional_residual = 0.0;  ///< ||psi(F(z)) - P(psi(z))||
  /// ||psi(Phi(z)) - z||. Not a residual: with resonances psi and Phi^{-1}
  /// may differ by a nonlinear map commuting with P.
  double consistency = 0.0;
  bool converged = true;
  int iterations = 0;
  bool inside_ball = true;
  std::string error;
};

struct VerificationReport {
  ResidualReport coefficients;
  std::vector<SampleCheck> samples;
  double max_jet_residual = 0.0;
  double max_functional_residual = 0.0;
  double max_consistency = 0.0;
  bool all_converged = true;
};

/// Coefficient and pointwise conjugacy checks for a pipeline result. Failed
/// phi evaluations are recorded in the report rather than thrown.
inline VerificationReport verify_conjugacy(const PolyJet& f, const NormalFormResult& result,
                                           const std::vector<ComplexVector>& samples, PhiOptions opts = {}) {
  VerificationReport report;
  report.coefficients = coefficient_residual(f, result.conjugacy, result.normal_form.jet(), result.degree);
  const PhiEvaluator psi(f, result.normal_form, opts);
  const PolyJet& p = result.normal_form.jet();
  for (const auto& z : samples) {
    SampleCheck check;
    check.point = z;
    check.inside_ball = z.cwiseAbs().maxCoeff() <= result.germ.contraction_radius;
    check.jet_residual =
        (evaluate(f, evaluate(result.conjugacy, z)) - evaluate(result.conjugacy, evaluate(p, z))).norm();
    try {
      const PhiEvaluation at_z = psi(z);
      const PhiEvaluation at_fz = psi(evaluate(f, z));
      const PhiEvaluation at_phi = psi(evaluate(result.conjugacy, z));
      check.functional_residual = (at_fz.value - evaluate(p, at_z.value)).norm();
      check.consistency = (at_phi.value - z).norm();
      check.iterations = std::max({at_z.iterations, at_fz.iterations, at_phi.iterations});
    } catch (const Error& e) {
      check.converged = false;
      check.error = e.what();
      report.all_converged = false;
    }
    report.max_jet_residual = std::max(report.max_jet_residual, check.jet_residual);
    report.max_functional_residual = std::max(report.max_functional_residual, check.functional_residual);
    report.max_consistency = std::max(report.max_consistency, check.consistency);
    report.samples.push_back(std::move(check));
  }
  return report;
}

}  // namespace hopfnf
