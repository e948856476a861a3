// hopfnf command-line driver. Each subcommand reads JSON documents (a path,
// or "-" for stdin), runs one library operation and writes one JSON document.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hopfnf/cli.hpp"

namespace {

using hopfnf::cli::CommandOutput;
using hopfnf::cli::Json;
using hopfnf::cli::RunConfig;

Json load(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw hopfnf::Error(hopfnf::ErrorKind::InvalidInput, "cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return hopfnf::io::parse(text, path == "-" ? "<stdin>" : path);
}

// Inline JSON when the argument looks like a document, otherwise a file path.
Json load_inline(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '[' || arg.front() == '{')) return hopfnf::io::parse(arg, "<argument>");
  return load(arg);
}

int emit(const CommandOutput& out, const std::string& output_path) {
  if (!out.message.empty()) std::cerr << "hopfnf: " << out.message << "\n";
  if (out.document.is_null()) return out.exit_code;
  const std::string text = hopfnf::cli::render(out.document);
  if (output_path.empty() || output_path == "-") {
    std::cout << text;
  } else {
    std::ofstream os(output_path, std::ios::binary);
    if (!os) {
      std::cerr << "hopfnf: cannot write " << output_path << "\n";
      return hopfnf::cli::kInvalidInput;
    }
    os << text;
  }
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poincare-Dulac normal forms of contracting germs and Hopf holonomy"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::optional<double> cauchy_tol;
  std::optional<int> degree;
  bool no_prune = false;
  std::string output;

  app.add_option("--res-tol", cfg.res_tol, "relative resonance tolerance");
  app.add_option("--sr-tol", cfg.sr_tol, "sub-resonance tolerance");
  app.add_option("--block-tol", cfg.block_tol, "relative modulus tolerance for spectral blocks");
  app.add_option("--cauchy-tol", cauchy_tol, "stopping gap for the phi iteration");
  app.add_option("--trunc-degree", degree, "truncation degree D of the normal form");
  app.add_option("--p-max", cfg.p_max, "maximum phi iterations");
  app.add_flag("--no-prune", no_prune, "keep tiny coefficients");
  app.add_option("--samples", cfg.sample_count, "number of verification samples");
  app.add_option("--sample-radius", cfg.sample_radius, "radius of verification samples");
  app.add_option("--seed", cfg.seed, "sampling seed");
  app.add_option("-o,--output", output, "output path (default stdout)");

  std::string a_path, b_path, spectrum_path, tau_arg, point_arg;
  int q = 2;
  int steps = 20;
  std::vector<double> annulus;
  std::function<CommandOutput()> action;

  const auto spectrum_ptr = [&](Json& holder) -> const Json* {
    if (spectrum_path.empty()) return nullptr;
    holder = load(spectrum_path);
    return &holder;
  };

  auto* normal_form = app.add_subcommand("normal-form", "compute the normal form P and conjugacy Phi");
  normal_form->add_option("germ", a_path, "germ document")->required();
  normal_form->callback([&] { action = [&] { return hopfnf::cli::cmd_normal_form(load(a_path), cfg); }; });

  auto* verify = app.add_subcommand("verify", "normal form plus pointwise and coefficient checks");
  verify->add_option("germ", a_path, "germ document")->required();
  verify->callback([&] { action = [&] { return hopfnf::cli::cmd_verify(load(a_path), cfg); }; });

  auto* check_sr = app.add_subcommand("check-sr", "certify a map as sub-resonant");
  check_sr->add_option("map", a_path, "map document")->required();
  check_sr->add_option("--spectrum", spectrum_path, "spectrum document (default: linear part of map)");
  check_sr->callback([&] {
    action = [&] {
      Json s;
      return hopfnf::cli::cmd_check_sr(load(a_path), spectrum_ptr(s), cfg);
    };
  });

  auto* enumerate = app.add_subcommand("enumerate-sr", "list sub-resonant monomials of one degree");
  enumerate->add_option("spectrum", a_path, "spectrum document")->required();
  enumerate->add_option("--degree", q, "monomial degree")->required();
  enumerate->callback([&] { action = [&] { return hopfnf::cli::cmd_enumerate_sr(load(a_path), q, cfg); }; });

  auto* invert = app.add_subcommand("sr-invert", "inverse of an invertible sub-resonant map");
  invert->add_option("map", a_path, "map document")->required();
  invert->add_option("--spectrum", spectrum_path, "spectrum document (default: linear part of map)");
  invert->callback([&] {
    action = [&] {
      Json s;
      return hopfnf::cli::cmd_sr_invert(load(a_path), spectrum_ptr(s), cfg);
    };
  });

  auto* compose = app.add_subcommand("sr-compose", "composition f o g of sub-resonant maps");
  compose->add_option("f", a_path, "outer map")->required();
  compose->add_option("g", b_path, "inner map")->required();
  compose->add_option("--spectrum", spectrum_path, "spectrum document (default: linear part of f)");
  compose->callback([&] {
    action = [&] {
      Json s;
      return hopfnf::cli::cmd_sr_compose(load(a_path), load(b_path), spectrum_ptr(s), cfg);
    };
  });

  auto* m_matrix = app.add_subcommand("m-matrix", "matrix of the homological operator on degree q");
  m_matrix->add_option("spectrum", a_path, "spectrum document")->required();
  m_matrix->add_option("--degree", q, "homogeneous degree q >= 2")->required();
  m_matrix->callback([&] { action = [&] { return hopfnf::cli::cmd_m_matrix(load(a_path), q, cfg); }; });

  auto* group = app.add_subcommand("group", "operations in C^n x| SR*(L)");
  group->require_subcommand(1);
  group->fallthrough();
  auto* mul = group->add_subcommand("mul", "product g1 g2");
  mul->add_option("g1", a_path, "element document")->required();
  mul->add_option("g2", b_path, "element document")->required();
  mul->callback([&] { action = [&] { return hopfnf::cli::cmd_group_mul(load(a_path), load(b_path), cfg); }; });
  auto* inv = group->add_subcommand("inv", "inverse element");
  inv->add_option("g", a_path, "element document")->required();
  inv->callback([&] { action = [&] { return hopfnf::cli::cmd_group_inv(load(a_path), cfg); }; });
  auto* translate = group->add_subcommand("conjugate-translation", "h(z + tau) - h(tau)");
  translate->add_option("map", a_path, "map document")->required();
  translate->add_option("--tau", tau_arg, "translation vector (inline JSON or path)")->required();
  translate->add_option("--spectrum", spectrum_path, "spectrum document (default: linear part of map)");
  translate->callback([&] {
    action = [&] {
      Json s;
      return hopfnf::cli::cmd_conjugate_translation(load(a_path), load_inline(tau_arg), spectrum_ptr(s), cfg);
    };
  });

  auto* holonomy = app.add_subcommand("holonomy", "holonomy generator of the Hopf manifold of a germ");
  holonomy->add_option("germ", a_path, "germ document")->required();
  holonomy->callback([&] { action = [&] { return hopfnf::cli::cmd_holonomy(load(a_path), cfg); }; });

  auto* orbit = app.add_subcommand("orbit", "forward orbit of a point under a group element");
  orbit->add_option("g", a_path, "element document")->required();
  orbit->add_option("--point", point_arg, "start point (inline JSON or path)")->required();
  orbit->add_option("--steps", steps, "number of iterations");
  orbit->add_option("--annulus", annulus, "inner and outer radius for the annulus check")->expected(2);
  orbit->callback([&] {
    action = [&] {
      std::optional<std::pair<double, double>> ring;
      if (annulus.size() == 2) ring = std::make_pair(annulus[0], annulus[1]);
      return hopfnf::cli::cmd_orbit(load(a_path), load_inline(point_arg), steps, ring, cfg);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hopfnf::cli::kInvalidInput;
  }

  cfg.cauchy_tol = cauchy_tol;
  cfg.degree = degree;
  cfg.prune = !no_prune;
  // Loading happens inside the guard so read and parse errors also map to exit 2.
  return emit(hopfnf::cli::guarded(cfg, action), output);
}
