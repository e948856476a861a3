#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopfnf/error.hpp"
#include "hopfnf/gx_group.hpp"
#include "hopfnf/homological.hpp"
#include "hopfnf/linalg.hpp"
#include "hopfnf/normal_form.hpp"
#include "hopfnf/polymap.hpp"
#include "hopfnf/subresonance.hpp"

// JSON interchange. Coefficients are [re, im] pairs of IEEE doubles, written
// with shortest round-trip formatting; components and blocks are 1-based.

namespace hopfnf::io {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::InvalidInput, where + ": " + what);
}

inline Json to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

inline Complex complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    invalid(where, "expected [re, im]");
  const Complex c(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) invalid(where, "non-finite coefficient");
  return c;
}

inline int integer_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) invalid(where, "expected an integer");
  return j.get<int>();
}

inline double number_from_json(const Json& j, const std::string& where) {
  if (!j.is_number()) invalid(where, "expected a number");
  return j.get<double>();
}

inline const Json& field(const Json& doc, const char* name, const std::string& where) {
  if (!doc.is_object()) invalid(where, "expected an object");
  auto it = doc.find(name);
  if (it == doc.end()) invalid(where, std::string("missing field \"") + name + "\"");
  return *it;
}

inline Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(to_json(v(k)));
  return out;
}

inline ComplexVector vector_from_json(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) invalid(where, "expected " + std::to_string(n) + " complex entries");
  ComplexVector v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k)
    v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

inline Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) invalid(where, "expected " + std::to_string(n) + " rows");
  ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const ComplexVector row = vector_from_json(j[r], n, where + "[" + std::to_string(r) + "]");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

inline Json to_json(const TermKey& key) {
  Json e = Json::array();
  for (int x : key.index.exponents()) e.push_back(x);
  return Json{{"exponents", std::move(e)}, {"component", key.component + 1}};
}

inline Json to_json(const PolyJet& f) {
  Json terms = Json::array();
  for (const auto& [key, c] : f.terms()) {
    Json t = to_json(key);
    t["coeff"] = to_json(c);
    terms.push_back(std::move(t));
  }
  return Json{{"dimension", f.dimension()}, {"degree", f.truncation_degree()}, {"terms", std::move(terms)}};
}

inline TermKey term_key_from_json(const Json& t, std::size_t n, const std::string& where) {
  const Json& ex = field(t, "exponents", where);
  if (!ex.is_array() || ex.size() != n)
    invalid(where + ".exponents", "expected " + std::to_string(n) + " exponents");
  std::vector<int> e;
  for (std::size_t k = 0; k < n; ++k) {
    const int v = integer_from_json(ex[k], where + ".exponents[" + std::to_string(k) + "]");
    if (v < 0) invalid(where + ".exponents", "negative exponent");
    e.push_back(v);
  }
  const int component = integer_from_json(field(t, "component", where), where + ".component");
  if (component < 1 || static_cast<std::size_t>(component) > n)
    invalid(where + ".component", "must be in 1.." + std::to_string(n));
  MultiIndex index(std::move(e));
  if (index.degree() < 1) invalid(where + ".exponents", "constant terms are not allowed");
  return {std::move(index), component - 1};
}

/// Parses {dimension, degree, terms[, linear_matrix]}; duplicate keys are
/// rejected and a linear_matrix replaces every degree-1 term.
inline PolyJet jet_from_json(const Json& doc, const std::string& where = "jet") {
  const int dim = integer_from_json(field(doc, "dimension", where), where + ".dimension");
  if (dim < 1 || static_cast<std::size_t>(dim) > kMaxDimension)
    invalid(where + ".dimension", "must be in 1.." + std::to_string(kMaxDimension));
  const int degree = integer_from_json(field(doc, "degree", where), where + ".degree");
  if (degree < 1) invalid(where + ".degree", "must be >= 1");
  const auto n = static_cast<std::size_t>(dim);

  const Json& terms = field(doc, "terms", where);
  if (!terms.is_array()) invalid(where + ".terms", "expected an array");
  PolyJet f(n, degree);
  std::set<TermKey, GradedTermLess> seen;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string at = where + ".terms[" + std::to_string(i) + "]";
    TermKey key = term_key_from_json(terms[i], n, at);
    if (key.index.degree() > degree) invalid(at, "term degree exceeds the declared degree");
    if (!seen.insert(key).second) invalid(at, "duplicate (exponents, component)");
    f.set(key, complex_from_json(field(terms[i], "coeff", at), at + ".coeff"));
  }
  if (auto it = doc.find("linear_matrix"); it != doc.end()) {
    const ComplexMatrix a = matrix_from_json(*it, n, where + ".linear_matrix");
    PolyJet nonlinear(n, degree);
    for (const auto& [key, c] : f.terms())
      if (key.index.degree() >= 2) nonlinear.set(key, c);
    f = PolyJet::linear(a, degree) + nonlinear;
  }
  return f;
}

inline GermInput germ_from_json(const Json& doc) {
  GermInput germ{jet_from_json(doc, "germ")};
  if (auto it = doc.find("coordinates"); it != doc.end()) {
    if (*it == "adapted") {
      germ.frame = Frame::Adapted;
    } else if (*it != "original") {
      invalid("germ.coordinates", "must be \"original\" or \"adapted\"");
    }
  }
  return germ;
}

inline Json to_json(const GermInput& germ) {
  Json out = to_json(germ.jet);
  out["coordinates"] = germ.frame == Frame::Adapted ? "adapted" : "original";
  return out;
}

inline Json to_json(const SpectrumData& s) {
  Json eig = Json::array();
  Json moduli = Json::array();
  for (const auto& l : s.diag) {
    eig.push_back(to_json(l));
    moduli.push_back(std::abs(l));
  }
  Json blocks = Json::array();
  for (const auto& b : s.blocks) {
    Json block = Json::array();
    for (int k : b) block.push_back(k + 1);
    blocks.push_back(std::move(block));
  }
  return Json{{"dimension", s.n},
              {"eigenvalues", std::move(eig)},
              {"moduli", std::move(moduli)},
              {"blocks", std::move(blocks)},
              {"c0", s.c0},
              {"degree_bound", s.degree_bound()},
              {"matrix", to_json(s.t)},
              {"basis_change", to_json(s.basis_change)}};
}

/// A spectrum from either {dimension, matrix[, basis_change]} or a jet/germ
/// document whose linear part is taken as the adapted L.
inline SpectrumData spectrum_from_json(const Json& doc, double block_tol = kDefaultBlockTol,
                                       double margin = kDefaultMargin) {
  const int dim = integer_from_json(field(doc, "dimension", "spectrum"), "spectrum.dimension");
  if (dim < 1 || static_cast<std::size_t>(dim) > kMaxDimension)
    invalid("spectrum.dimension", "must be in 1.." + std::to_string(kMaxDimension));
  const auto n = static_cast<std::size_t>(dim);
  if (auto it = doc.find("matrix"); it != doc.end()) {
    SpectrumData s = analyze_spectrum(matrix_from_json(*it, n, "spectrum.matrix"), block_tol, margin);
    if (auto q = doc.find("basis_change"); q != doc.end()) s.basis_change = matrix_from_json(*q, n, "spectrum.basis_change");
    return s;
  }
  return analyze_spectrum(jet_from_json(doc, "spectrum").linear_part(), block_tol, margin);
}

/// Certifies a parsed jet; non-sub-resonant input is invalid input.
inline SubResonantMap subresonant_from_json(const Json& doc, const SpectrumData& s, double tol,
                                            const std::string& where = "map") {
  const PolyJet f = jet_from_json(doc, where);
  if (f.dimension() != s.n) invalid(where, "dimension differs from the spectrum");
  Certification c = certify_subresonant(f, s, tol);
  if (!c.ok()) invalid(where, std::to_string(c.offenders.size()) + " monomial(s) are not sub-resonant");
  return *c.map;
}

inline Json to_json(const HomogeneousPart& h) {
  Json out = to_json(h.map);
  out["degree"] = h.degree;
  return out;
}

inline Json to_json(const NormalFormResult& r) {
  Json steps = Json::array();
  for (const auto& step : r.steps) {
    Json warnings = Json::array();
    for (const auto& w : step.warnings) {
      Json item = to_json(w.position);
      item["relative_divisor"] = w.relative_divisor;
      warnings.push_back(std::move(item));
    }
    Json s{{"degree", step.degree}, {"kept", to_json(step.kept)}, {"eliminated", to_json(step.eliminated)}};
    if (std::isfinite(step.min_relative_divisor)) {
      s["min_relative_divisor"] = step.min_relative_divisor;
    } else {
      s["min_relative_divisor"] = nullptr;
    }
    s["warnings"] = std::move(warnings);
    steps.push_back(std::move(s));
  }
  return Json{{"dimension", r.spectrum.n},
              {"truncation_degree", r.degree},
              {"spectrum", to_json(r.spectrum)},
              {"normal_form", to_json(r.normal_form.jet())},
              {"steps", std::move(steps)},
              {"conjugacy", to_json(r.conjugacy)},
              {"residuals",
               {{"coefficient_max", r.residuals.coefficient_max},
                {"coefficient_scale", r.residuals.coefficient_scale}}},
              {"contraction_radius", r.germ.contraction_radius},
              {"contraction_ratio", r.germ.contraction_ratio},
              {"basis_change", to_json(r.spectrum.basis_change)}};
}

inline Json to_json(const VerificationReport& v) {
  Json samples = Json::array();
  for (const auto& s : v.samples) {
    Json item{{"point", to_json(s.point)},
              {"inside_contraction_ball", s.inside_ball},
              {"jet_residual", s.jet_residual},
              {"converged", s.converged}};
    if (s.converged) {
      item["functional_residual"] = s.functional_residual;
      item["consistency"] = s.consistency;
      item["iterations"] = s.iterations;
    } else {
      item["error"] = s.error;
    }
    samples.push_back(std::move(item));
  }
  return Json{{"coefficient_residual", v.coefficients.coefficient_max},
              {"coefficient_scale", v.coefficients.coefficient_scale},
              {"max_jet_residual", v.max_jet_residual},
              {"max_functional_residual", v.max_functional_residual},
              {"max_consistency", v.max_consistency},
              {"all_converged", v.all_converged},
              {"samples", std::move(samples)}};
}

inline Json to_json(const GroupElement& g) {
  return Json{{"dimension", g.spectrum().n},
              {"spectrum", {{"dimension", g.spectrum().n}, {"matrix", to_json(g.spectrum().t)}}},
              {"tau", to_json(g.tau())},
              {"map", to_json(g.map().jet())}};
}

inline GroupElement group_element_from_json(const Json& doc, double sr_tol = kDefaultSrTol,
                                            double block_tol = kDefaultBlockTol) {
  const SpectrumData s = spectrum_from_json(field(doc, "spectrum", "element"), block_tol);
  const ComplexVector tau = vector_from_json(field(doc, "tau", "element"), s.n, "element.tau");
  return {tau, subresonant_from_json(field(doc, "map", "element"), s, sr_tol, "element.map")};
}

inline Json to_json(const OperatorMatrix& m) {
  Json basis = Json::array();
  for (const auto& key : m.ordering.elements) basis.push_back(to_json(key));
  Json diag = Json::array();
  for (const auto& d : m.diag) diag.push_back(to_json(d));
  return Json{{"degree", m.q},
              {"dimension", m.ordering.n},
              {"basis", std::move(basis)},
              {"diagonal", std::move(diag)},
              {"matrix", to_json(m.entries)}};
}

inline Json to_json(const OrbitReport& o) {
  Json points = Json::array();
  for (const auto& p : o.points) points.push_back(to_json(p));
  return Json{{"points", std::move(points)},
              {"norms", o.norms},
              {"contracting_from", o.contracting_from},
              {"ratio_bound", o.ratio_bound},
              {"max_ratio_after", o.max_ratio_after}};
}

inline Json to_json(const AnnulusReport& a) {
  return Json{{"inner", a.inner},
              {"outer", a.outer},
              {"points_checked", a.points_checked},
              {"max_image_ratio", a.max_image_ratio},
              {"max_image_norm", a.max_image_norm},
              {"disjoint_on_samples", a.disjoint_on_samples},
              {"certified", a.certified}};
}

/// Parses text, turning syntax errors into InvalidInput with line/column.
inline Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, source + ": " + e.what());
  }
}

}  // namespace hopfnf::io
