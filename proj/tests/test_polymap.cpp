#include <gtest/gtest.h>

#include "hopfnf/polymap.hpp"
#include "support/oracle.hpp"
#include "support/random.hpp"

using namespace hopfnf;
namespace ht = hopfnf::testing;

namespace {

PolyJet one_d(std::initializer_list<Complex> coeffs, int d) {
  PolyJet f(1, d);
  int q = 1;
  for (Complex c : coeffs) f.set({{q++}, 0}, c);
  return f;
}

ComplexVector vec(std::initializer_list<Complex> xs) {
  ComplexVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (Complex x : xs) v(k++) = x;
  return v;
}

// (z1/4 + z1 z2 + z2^2, z2/2 + z1^2)
PolyJet hopf_germ() {
  PolyJet f(2, 2);
  f.set({{1, 0}, 0}, 0.25);
  f.set({{1, 1}, 0}, 1.0);
  f.set({{0, 2}, 0}, 1.0);
  f.set({{0, 1}, 1}, 0.5);
  f.set({{2, 0}, 1}, 1.0);
  return f;
}

}  // namespace

TEST(Evaluate, IdentityAndHandValue) {
  EXPECT_EQ(evaluate(PolyJet::identity(2, 3), vec({1.0, 2.0})), vec({1.0, 2.0}));
  EXPECT_EQ(evaluate(one_d({0.5, 1.0}, 2), vec({1.0})), vec({1.5}));
}

TEST(Evaluate, OriginIsFixed) {
  ht::Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const PolyJet f = ht::random_jet(rng, 3, 4);
    EXPECT_TRUE(evaluate(f, ComplexVector::Zero(3)).isZero(0.0));
  }
}

TEST(Compose, HandExpansions) {
  const Complex lambda(0.3, 0.1);
  const PolyJet f = one_d({lambda, 1.0}, 2);
  const PolyJet g = one_d({1.0, 1.0}, 2);
  EXPECT_EQ(compose_truncated(f, g, 2), one_d({lambda, lambda + 1.0}, 2));
  EXPECT_EQ(compose_truncated(g, g, 2), one_d({1.0, 2.0}, 2));
}

TEST(Compose, MatchesSchoolbookOracle) {
  ht::Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = static_cast<std::size_t>(ht::uniform_int(rng, 1, 3));
    const int d = ht::uniform_int(rng, 1, 5);
    const PolyJet f = ht::random_jet(rng, n, d, 0.4);
    const PolyJet g = ht::random_jet(rng, n, d, 0.4);
    EXPECT_LT(oracle::distance(compose_truncated(f, g, d, 0.0), oracle::compose(f, g, d)), 1e-13);
  }
}

TEST(Compose, AssociativeUpToTruncation) {
  ht::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const PolyJet f = ht::random_jet(rng, 2, 4), g = ht::random_jet(rng, 2, 4), h = ht::random_jet(rng, 2, 4);
    const PolyJet left = compose_truncated(compose_truncated(f, g, 4, 0.0), h, 4, 0.0);
    const PolyJet right = compose_truncated(f, compose_truncated(g, h, 4, 0.0), 4, 0.0);
    EXPECT_LT(max_abs_difference(left, right), 1e-12);
  }
}

TEST(JetInverse, HandCases) {
  EXPECT_EQ(jet_inverse(PolyJet::identity(2, 3), 3), PolyJet::identity(2, 3));
  EXPECT_EQ(jet_inverse(one_d({1.0, 1.0}, 3), 3), one_d({1.0, -1.0, 2.0}, 3));
  EXPECT_EQ(jet_inverse(one_d({0.5}, 1), 1), one_d({2.0}, 1));
}

TEST(JetInverse, SingularLinearPart) {
  PolyJet f(2, 2);
  f.set({{1, 0}, 0}, 1.0);
  f.set({{0, 2}, 1}, 1.0);
  try {
    (void)jet_inverse(f, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularLinearPart);
  }
}

TEST(JetInverse, TwoSidedOnRandomJets) {
  ht::Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(ht::uniform_int(rng, 1, 3));
    const int d = ht::uniform_int(rng, 2, 5);
    PolyJet f = ht::random_jet(rng, n, d, 0.5);
    f += PolyJet::linear(ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) * 2.0, d) -
         PolyJet::linear(f.linear_part(), d);
    const PolyJet g = jet_inverse(f, d, 0.0);
    const PolyJet id = PolyJet::identity(n, d);
    EXPECT_LT(oracle::distance(oracle::compose(f, g, d), id), 1e-12);
    EXPECT_LT(oracle::distance(oracle::compose(g, f, d), id), 1e-12);
  }
}

TEST(LinearConjugate, HandCases) {
  const PolyJet f = hopf_germ();
  EXPECT_EQ(linear_conjugate(f, ComplexMatrix::Identity(2, 2), 2), f);

  ComplexMatrix a(2, 2);
  a << 1, 2, 3, 4;
  ComplexMatrix q(2, 2);
  q << 2, 1, 1, 1;
  EXPECT_LT(max_abs_difference(linear_conjugate(PolyJet::linear(a, 1), q, 1, 0.0),
                               PolyJet::linear(q.inverse() * a * q, 1)),
            1e-13);

  PolyJet p(2, 2);
  p.set({{1, 0}, 0}, 0.25);
  p.set({{0, 2}, 0}, 1.0);
  p.set({{0, 1}, 1}, 0.5);
  ComplexMatrix s = ComplexMatrix::Identity(2, 2);
  s(1, 1) = 2.0;
  PolyJet expected = p;
  expected.set({{0, 2}, 0}, 4.0);
  EXPECT_EQ(linear_conjugate(p, s, 2), expected);
}

TEST(HomogeneousPart, Filtering) {
  const PolyJet f = hopf_germ();
  EXPECT_EQ(homogeneous_part(f, 1).map, PolyJet::linear(f.linear_part(), 2));
  PolyJet quad(2, 2);
  quad.set({{1, 1}, 0}, 1.0);
  quad.set({{0, 2}, 0}, 1.0);
  quad.set({{2, 0}, 1}, 1.0);
  EXPECT_EQ(homogeneous_part(f, 2).map, quad);
  EXPECT_TRUE(homogeneous_part(f.with_degree(3), 3).map.is_zero());
  EXPECT_THROW(homogeneous_part(f, 3), Error);
}

TEST(PolyJet, Validation) {
  PolyJet f(2, 2);
  EXPECT_THROW(f.set({{0, 0}, 0}, 1.0), Error);
  EXPECT_THROW(f.set({{1, 2}, 0}, 1.0), Error);
  EXPECT_THROW(f.set({{1, 0}, 2}, 1.0), Error);
  EXPECT_THROW(f.set({{1, 0, 0}, 0}, 1.0), Error);
  EXPECT_THROW(PolyJet(0, 1), Error);
}

TEST(PolyJet, ArithmeticCancelsExactly) {
  ht::Rng rng(13);
  const PolyJet f = ht::random_jet(rng, 3, 3);
  EXPECT_TRUE((f - f).is_zero());
  EXPECT_EQ(f + PolyJet(3, 1), f);
}

TEST(Evaluate, MatchesOracle) {
  ht::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const PolyJet f = ht::random_jet(rng, 3, 4);
    const ComplexVector z = ht::random_vector(rng, 3);
    EXPECT_LT((evaluate(f, z) - oracle::evaluate(f, z)).norm(), 1e-13);
  }
}
