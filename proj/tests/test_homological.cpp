#include <gtest/gtest.h>

#include "hopfnf/homological.hpp"
#include "support/oracle.hpp"
#include "support/random.hpp"

using namespace hopfnf;
namespace ht = hopfnf::testing;

namespace {

SpectrumData spectrum2(Complex l1, Complex l2, Complex coupling = 0.0) {
  ComplexMatrix t(2, 2);
  t << l1, coupling, 0.0, l2;
  return analyze_spectrum(t);
}

HomogeneousPart monomial(std::size_t n, const TermKey& key, Complex c = 1.0) {
  HomogeneousPart h = basis_element(n, key);
  h.map *= c;
  return h;
}

// M(h) = h o L - L o h through the schoolbook oracle.
PolyJet oracle_m(const SpectrumData& s, const HomogeneousPart& h) {
  const PolyJet l = PolyJet::linear(s.t, h.degree);
  return oracle::compose(h.map, l, h.degree) - oracle::compose(l, h.map, h.degree);
}

}  // namespace

TEST(ApplyM, HandCases) {
  const auto s = spectrum2(0.25, 0.5);
  EXPECT_TRUE(apply_M(s, monomial(2, {{0, 2}, 0})).map.is_zero());
  const auto image = apply_M(s, monomial(2, {{2, 0}, 1}));
  EXPECT_EQ(image.map.term_count(), 1u);
  EXPECT_DOUBLE_EQ(image.map.coefficient({{2, 0}, 1}).real(), -7.0 / 16.0);

  const auto jordan = spectrum2(0.25, 0.5, 1.0);
  EXPECT_TRUE(apply_M(jordan, monomial(2, {{0, 2}, 0})).map.is_zero());
}

TEST(ApplyM, MatchesOracle) {
  ht::Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = ht::random_spectrum(rng, static_cast<std::size_t>(ht::uniform_int(rng, 2, 3)));
    const int q = ht::uniform_int(rng, 2, 4);
    HomogeneousPart h{q, PolyJet(s.n, q)};
    for (const auto& key : basis_ordering(s.n, q).elements)
      if (ht::uniform(rng, 0, 1) < 0.5) h.map.set(key, ht::random_complex(rng));
    EXPECT_LT(oracle::distance(apply_M(s, h, 0.0).map, oracle_m(s, h)), 1e-13);
  }
}

TEST(BuildMatrix, DiagonalLIsDiagonal) {
  const auto s = spectrum2(Complex(0.1, 0.2), -0.5);
  const auto m = build_matrix(s, 3);
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
      if (i == j) {
        EXPECT_LT(std::abs(m.entries(i, i) - homological_divisor(m.ordering.elements[static_cast<std::size_t>(i)], s)), 1e-15);
      } else {
        EXPECT_EQ(m.entries(i, j), Complex(0.0));
      }
    }
}

TEST(BuildMatrix, UpperTriangularForJordanCoupling) {
  ht::Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = ht::random_spectrum(rng, 3);
    for (int q = 2; q <= 4; ++q) {
      const auto m = build_matrix(s, q);
      EXPECT_EQ(static_cast<std::size_t>(m.entries.rows()), homogeneous_dimension(3, q));
      for (Eigen::Index i = 0; i < m.entries.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) EXPECT_EQ(m.entries(i, j), Complex(0.0));
    }
  }
}

TEST(BuildMatrix, RejectsLowDegree) { EXPECT_THROW(build_matrix(spectrum2(0.25, 0.5), 1), Error); }

TEST(Coordinates, RoundTrip) {
  ht::Rng rng(41);
  const auto b = basis_ordering(3, 3);
  ComplexVector v(static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = ht::random_complex(rng);
  EXPECT_EQ(to_coordinates(b, from_coordinates(b, v)), v);
}

TEST(Split, HandCase) {
  const auto s = spectrum2(0.25, 0.5);
  HomogeneousPart h{2, PolyJet(2, 2)};
  h.map.set({{1, 1}, 0}, 1.0);
  h.map.set({{0, 2}, 0}, 1.0);
  h.map.set({{2, 0}, 1}, 1.0);
  const auto split = split_homogeneous(s, h);

  PolyJet kept(2, 2);
  kept.set({{0, 2}, 0}, 1.0);
  EXPECT_EQ(split.kept.map, kept);
  EXPECT_NEAR(std::abs(split.eliminated.map.coefficient({{1, 1}, 0}) - Complex(-8.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(split.eliminated.map.coefficient({{2, 0}, 1}) - Complex(-16.0 / 7.0)), 0.0, 1e-14);
  EXPECT_EQ(split.eliminated.map.term_count(), 2u);
  EXPECT_LT(max_abs_difference(split.kept.map + apply_M(s, split.eliminated).map, h.map), 1e-14);
}

TEST(Split, ResonantInputIsKept) {
  const auto s = spectrum2(0.25, 0.5);
  HomogeneousPart h{2, PolyJet(2, 2)};
  h.map.set({{0, 2}, 0}, Complex(2.0, -1.0));
  const auto split = split_homogeneous(s, h);
  EXPECT_EQ(split.kept.map, h.map);
  EXPECT_TRUE(split.eliminated.map.is_zero());
}

TEST(Split, ReconstructsRandomInput) {
  ht::Rng rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = ht::random_spectrum(rng, static_cast<std::size_t>(ht::uniform_int(rng, 2, 3)));
    const int q = ht::uniform_int(rng, 2, 4);
    HomogeneousPart h{q, PolyJet(s.n, q)};
    for (const auto& key : basis_ordering(s.n, q).elements) h.map.set(key, ht::random_complex(rng));
    const auto split = split_homogeneous(s, h, kDefaultResTol, kDefaultSrTol, 0.0);
    const PolyJet rebuilt = split.kept.map + apply_M(s, split.eliminated, 0.0).map;
    EXPECT_LT(max_abs_difference(rebuilt, h.map), 1e-10 * std::max(1.0, max_abs_coefficient(split.eliminated.map)));
    for (const auto& [key, c] : split.kept.map.terms()) {
      EXPECT_TRUE(is_resonant(key, s));
      EXPECT_TRUE(is_subresonant_monomial(key, s));
    }
  }
}

TEST(Split, SmallDivisorIsReported) {
  // lambda_1 close to lambda_2^2: z2^2 e1 is nearly resonant.
  const auto s = spectrum2(0.25 * (1.0 + 1e-8), 0.5);
  HomogeneousPart h{2, PolyJet(2, 2)};
  h.map.set({{0, 2}, 0}, 1.0);
  const auto split = split_homogeneous(s, h);
  ASSERT_EQ(split.warnings.size(), 1u);
  EXPECT_LT(split.min_relative_divisor, kSmallDivisorWarn);
}
