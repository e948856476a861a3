#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hopfnf/error.hpp"
#include "hopfnf/gx_group.hpp"
#include "hopfnf/homological.hpp"
#include "hopfnf/io.hpp"
#include "hopfnf/normal_form.hpp"
#include "hopfnf/subresonance.hpp"

// Command layer behind the hopfnf executable. Every command maps JSON
// documents to one JSON document plus an exit code, and delegates to a single
// library operation.

namespace hopfnf::cli {

using io::Json;

enum ExitCode : int { kOk = 0, kInvalidInput = 2, kNumerical = 3 };

struct RunConfig {
  double res_tol = kDefaultResTol;
  double sr_tol = kDefaultSrTol;
  double block_tol = kDefaultBlockTol;
  std::optional<double> cauchy_tol;
  std::optional<int> degree;
  int p_max = 60;
  bool prune = true;
  std::size_t sample_count = 8;
  double sample_radius = 0.05;
  std::uint64_t seed = 0;

  NormalFormOptions normal_form_options() const {
    NormalFormOptions o;
    o.degree = degree;
    o.res_tol = res_tol;
    o.sr_tol = sr_tol;
    o.block_tol = block_tol;
    o.prune = prune ? kDefaultPrune : 0.0;
    return o;
  }

  PhiOptions phi_options() const {
    PhiOptions o;
    o.p_max = p_max;
    o.cauchy_tol = cauchy_tol;
    return o;
  }

  void validate() const {
    for (double t : {res_tol, sr_tol, block_tol, cauchy_tol.value_or(1.0), sample_radius})
      if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "tolerances and radii must be positive");
    if (p_max < 1) throw Error(ErrorKind::InvalidInput, "--p-max must be >= 1");
    if (degree && *degree < 1) throw Error(ErrorKind::InvalidInput, "--trunc-degree must be >= 1");
  }
};

struct CommandOutput {
  Json document;
  int exit_code = kOk;
  std::string message;  ///< diagnostic for stderr; empty on success
};

inline Json error_document(const Error& e) {
  return Json{{"status", "error"}, {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
}

/// Runs a command, mapping library errors onto the exit-code contract:
/// 2 for invalid input, 3 for numerical conditions (with a diagnostic
/// document still produced).
inline CommandOutput guarded(const RunConfig& cfg, const std::function<CommandOutput()>& body) {
  try {
    cfg.validate();
    return body();
  } catch (const Error& e) {
    if (is_numerical_condition(e.kind()) || e.kind() == ErrorKind::CertificationFailure)
      return {error_document(e), kNumerical, e.what()};
    return {Json(), kInvalidInput, e.what()};
  } catch (const Json::exception& e) {
    return {Json(), kInvalidInput, std::string("InvalidInput: ") + e.what()};
  }
}

inline CommandOutput ok(Json doc) { return {std::move(doc), kOk, {}}; }

inline SpectrumData spectrum_or_linear_part(const Json* spectrum_doc, const Json& map_doc, const RunConfig& cfg) {
  return io::spectrum_from_json(spectrum_doc != nullptr ? *spectrum_doc : map_doc, cfg.block_tol);
}

inline CommandOutput cmd_normal_form(const Json& germ_doc, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const NormalFormResult r = poincare_dulac(io::germ_from_json(germ_doc), cfg.normal_form_options());
    Json doc = io::to_json(r);
    return ok(Json{{"status", "ok"}, {"result", std::move(doc)}});
  });
}

inline CommandOutput cmd_verify(const Json& germ_doc, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const NormalFormResult r = poincare_dulac(io::germ_from_json(germ_doc), cfg.normal_form_options());
    const auto samples = sample_sphere(r.spectrum.n, cfg.sample_radius, cfg.sample_count, cfg.seed);
    const VerificationReport v = verify_conjugacy(r.germ.jet, r, samples, cfg.phi_options());
    Json doc{{"status", v.all_converged ? "ok" : "error"},
             {"seed", cfg.seed},
             {"sample_radius", cfg.sample_radius},
             {"contraction_radius", r.germ.contraction_radius},
             {"normal_form", io::to_json(r.normal_form.jet())},
             {"report", io::to_json(v)}};
    if (!v.all_converged) return CommandOutput{std::move(doc), kNumerical, "NoConvergence: phi iteration did not stabilize"};
    return ok(std::move(doc));
  });
}

inline CommandOutput cmd_check_sr(const Json& map_doc, const Json* spectrum_doc, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const SpectrumData s = spectrum_or_linear_part(spectrum_doc, map_doc, cfg);
    const PolyJet f = io::jet_from_json(map_doc, "map");
    const Certification c = certify_subresonant(f, s, cfg.sr_tol);
    Json offenders = Json::array();
    for (const auto& key : c.offenders) offenders.push_back(io::to_json(key));
    return ok(Json{{"certified", c.ok()},
                   {"degree_cap", s.degree_cap()},
                   {"linear_flag_preserved", is_linear_subresonant(f.linear_part(), s)},
                   {"offenders", std::move(offenders)}});
  });
}

inline CommandOutput cmd_enumerate_sr(const Json& spectrum_doc, int r, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const SpectrumData s = io::spectrum_from_json(spectrum_doc, cfg.block_tol);
    Json basis = Json::array();
    for (const auto& key : enumerate_subresonant_basis(s, r, cfg.sr_tol)) basis.push_back(io::to_json(key));
    return ok(Json{{"degree", r}, {"degree_bound", s.degree_bound()}, {"basis", std::move(basis)}});
  });
}

inline CommandOutput cmd_sr_invert(const Json& map_doc, const Json* spectrum_doc, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const SpectrumData s = spectrum_or_linear_part(spectrum_doc, map_doc, cfg);
    const SubResonantMap f = io::subresonant_from_json(map_doc, s, cfg.sr_tol);
    InversionTrace trace;
    const SubResonantMap inv = sr_inverse(f, &trace, cfg.sr_tol);
    Json factors = Json::array();
    for (const auto& p : trace.factors) factors.push_back(io::to_json(p.jet()));
    return ok(Json{{"inverse", io::to_json(inv.jet())}, {"factors", std::move(factors)}});
  });
}

inline CommandOutput cmd_sr_compose(const Json& f_doc, const Json& g_doc, const Json* spectrum_doc,
                                    const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const SpectrumData s = spectrum_or_linear_part(spectrum_doc, f_doc, cfg);
    const SubResonantMap f = io::subresonant_from_json(f_doc, s, cfg.sr_tol, "f");
    const SubResonantMap g = io::subresonant_from_json(g_doc, s, cfg.sr_tol, "g");
    return ok(Json{{"composition", io::to_json(sr_compose(f, g, cfg.sr_tol).jet())}});
  });
}

inline CommandOutput cmd_m_matrix(const Json& spectrum_doc, int q, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const SpectrumData s = io::spectrum_from_json(spectrum_doc, cfg.block_tol);
    return ok(io::to_json(build_matrix(s, q)));
  });
}

inline CommandOutput cmd_group_mul(const Json& a, const Json& b, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const GroupElement g1 = io::group_element_from_json(a, cfg.sr_tol, cfg.block_tol);
    const GroupElement g2 = io::group_element_from_json(b, cfg.sr_tol, cfg.block_tol);
    return ok(io::to_json(group_mul(g1, g2)));
  });
}

inline CommandOutput cmd_group_inv(const Json& a, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    return ok(io::to_json(group_inv(io::group_element_from_json(a, cfg.sr_tol, cfg.block_tol))));
  });
}

inline CommandOutput cmd_conjugate_translation(const Json& map_doc, const Json& tau_doc, const Json* spectrum_doc,
                                               const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const SpectrumData s = spectrum_or_linear_part(spectrum_doc, map_doc, cfg);
    const SubResonantMap h = io::subresonant_from_json(map_doc, s, cfg.sr_tol);
    const ComplexVector tau = io::vector_from_json(tau_doc, s.n, "tau");
    return ok(Json{{"map", io::to_json(translate_conjugate(h, tau, cfg.sr_tol).jet())}});
  });
}

inline CommandOutput cmd_holonomy(const Json& germ_doc, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const Holonomy h = hopf_holonomy(io::germ_from_json(germ_doc), cfg.normal_form_options());
    return ok(Json{{"status", "ok"}, {"generator", io::to_json(h.generator)}, {"result", io::to_json(h.result)}});
  });
}

inline CommandOutput cmd_orbit(const Json& element_doc, const Json& point_doc, int steps,
                               std::optional<std::pair<double, double>> annulus, const RunConfig& cfg) {
  return guarded(cfg, [&] {
    const GroupElement g = io::group_element_from_json(element_doc, cfg.sr_tol, cfg.block_tol);
    const ComplexVector z = io::vector_from_json(point_doc, g.spectrum().n, "point");
    Json doc = io::to_json(orbit(g, z, steps));
    if (annulus) doc["annulus"] = io::to_json(annulus_diagnostic(g, annulus->first, annulus->second, 8, 64, cfg.seed));
    return ok(std::move(doc));
  });
}

/// Output text for a document: two-space indented JSON plus newline.
inline std::string render(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace hopfnf::cli
