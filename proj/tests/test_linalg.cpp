#include <gtest/gtest.h>

#include <cmath>

#include "hopfnf/linalg.hpp"
#include "support/random.hpp"

using namespace hopfnf;
using hopfnf::testing::Rng;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Coefficients of det(xI - A) for 2x2: x^2 - tr x + det.
std::pair<Complex, Complex> char_poly(const ComplexMatrix& m) { return {m.trace(), m.determinant()}; }

}  // namespace

TEST(Triangularize, AlreadyAdaptedIsUntouched) {
  const ComplexMatrix a = mat2(0.25, 0, 0, 0.5);
  const auto tri = triangularize(a);
  EXPECT_EQ(tri.q, ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(tri.t, a);
}

TEST(Triangularize, ReordersUpperTriangular) {
  const ComplexMatrix a = mat2(0.5, 3, 0, 0.25);
  const auto tri = triangularize(a);
  EXPECT_NEAR(std::abs(tri.t(0, 0)), 0.25, 1e-14);
  EXPECT_NEAR(std::abs(tri.t(1, 1)), 0.5, 1e-14);
  EXPECT_EQ(tri.t(1, 0), Complex(0.0));
  EXPECT_LT((tri.q.adjoint() * tri.q - ComplexMatrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_LT((tri.q.adjoint() * a * tri.q - tri.t).norm(), 1e-13);
}

TEST(Triangularize, LowerTriangularKeepsEigenvalues) {
  const ComplexMatrix a = mat2(0.5, 0, 1, 0.25);
  const auto tri = triangularize(a);
  EXPECT_TRUE(is_upper_triangular(tri.t));
  EXPECT_NEAR(std::abs(tri.t(0, 0)), 0.25, 1e-14);
  EXPECT_NEAR(std::abs(tri.t(1, 1)), 0.5, 1e-14);
  const auto [tr_a, det_a] = char_poly(a);
  const auto [tr_t, det_t] = char_poly(tri.t);
  EXPECT_LT(std::abs(tr_a - tr_t), 1e-14);
  EXPECT_LT(std::abs(det_a - det_t), 1e-14);
}

TEST(Triangularize, RandomSimilarityAndOrder) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<Eigen::Index>(hopfnf::testing::uniform_int(rng, 2, 5));
    ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = hopfnf::testing::random_complex(rng, 0.3);
    const auto tri = triangularize(a);
    EXPECT_TRUE(is_upper_triangular(tri.t));
    EXPECT_LT((tri.q * tri.t * tri.q.adjoint() - a).norm(), 1e-12);
    for (Eigen::Index k = 0; k + 1 < n; ++k)
      EXPECT_LE(std::abs(tri.t(k, k)), std::abs(tri.t(k + 1, k + 1)) * (1 + 1e-9));
  }
}

TEST(Spectrum, BlocksAndC0) {
  const auto s = analyze_spectrum(mat2(0.25, 0, 0, 0.5));
  EXPECT_EQ(s.c0, 2);
  ASSERT_EQ(s.blocks.size(), 2u);
  EXPECT_EQ(s.blocks[0], std::vector<int>{0});
  EXPECT_EQ(s.blocks[1], std::vector<int>{1});
}

TEST(Spectrum, ExactRatioSnaps) {
  const auto s = analyze_spectrum(mat2(0.125, 0, 0, 0.5));
  EXPECT_EQ(s.c0, 3);
  EXPECT_EQ(s.degree_cap(), 3);
}

TEST(Spectrum, EqualModuliShareBlock) {
  const auto s = analyze_spectrum(mat2(Complex(0, 0.5), 1, 0, -0.5));
  ASSERT_EQ(s.blocks.size(), 1u);
  EXPECT_EQ(s.c0, 1);
}

TEST(Spectrum, Rejections) {
  const auto kind_of = [](const ComplexMatrix& m) {
    try {
      (void)analyze_spectrum(m);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidInput;
  };
  EXPECT_EQ(kind_of(mat2(0.5, 0, 0, 2)), ErrorKind::NotContracting);
  EXPECT_EQ(kind_of(mat2(0, 0, 0, 0.5)), ErrorKind::NotContracting);
  EXPECT_EQ(kind_of(mat2(0.25, 0, 0.1, 0.5)), ErrorKind::NotTriangular);
  EXPECT_EQ(kind_of(mat2(0.5, 0, 0, 0.25)), ErrorKind::UnorderedSpectrum);
}

TEST(Rescale, DiagonalUnchanged) {
  const ComplexMatrix t = mat2(0.25, 0, 0, 0.5);
  const auto r = rescale_nilpotent(t, 0.01);
  EXPECT_EQ(r.s, ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(r.t, t);
}

TEST(Rescale, JordanBlock2) {
  const ComplexMatrix t = mat2(0.5, 1, 0, 0.5);
  const auto r = rescale_nilpotent(t, 0.01);
  EXPECT_LE(std::abs(r.t(0, 1)), 0.01 + 1e-15);
  EXPECT_LT((r.s.inverse() * t * r.s - r.t).norm(), 1e-15);
}

TEST(Rescale, JordanBlock3) {
  ComplexMatrix t(3, 3);
  t << 0.5, 1, 2, 0, 0.5, 1, 0, 0, 0.5;
  const auto r = rescale_nilpotent(t, 0.1);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) EXPECT_LE(std::abs(r.t(i, j)), 0.1 + 1e-15);
  EXPECT_LT((r.s.inverse() * t * r.s - r.t).norm(), 1e-14);
}

TEST(CheckedInverse, SingularThrows) {
  EXPECT_THROW(checked_inverse(mat2(1, 2, 2, 4), ErrorKind::SingularMatrix), Error);
  EXPECT_LT((checked_inverse(mat2(2, 1, 0, 1), ErrorKind::SingularMatrix) * mat2(2, 1, 0, 1) -
             ComplexMatrix::Identity(2, 2)).norm(), 1e-15);
}
