#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "switchrad/matrix.hpp"

using namespace switchrad;

namespace {

Matrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
  return m;
}

double oracle_spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> oracle_singulars(const Matrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  std::vector<double> s(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST(SinCosPi, ExactAtHalfIntegers) {
  EXPECT_EQ(sinpi(1.0), 0.0);
  EXPECT_EQ(sinpi(-2.0), 0.0);
  EXPECT_EQ(cospi(0.5), 0.0);
  EXPECT_EQ(cospi(1.5), 0.0);
  EXPECT_EQ(sinpi(0.5), 1.0);
  EXPECT_EQ(cospi(1.0), -1.0);
  for (double x = -3.0; x <= 3.0; x += 0.0137) {
    EXPECT_NEAR(sinpi(x), std::sin(std::numbers::pi * x), 1e-14);
    EXPECT_NEAR(cospi(x), std::cos(std::numbers::pi * x), 1e-14);
  }
}

TEST(Matrix, RejectsOversizedDimensions) {
  EXPECT_THROW(Matrix(9, 9), Error);
  try {
    Matrix(2, 12);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_size);
  }
}

TEST(MatrixSet, ValidatesMembers) {
  EXPECT_THROW(MatrixSet({Matrix::identity(2), Matrix::identity(3)}), Error);
  Matrix bad = Matrix::identity(2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(MatrixSet({bad}), Error);
  EXPECT_THROW(MatrixSet(std::vector<Matrix>{}), Error);
  MatrixSet ok{Matrix::identity(3), Matrix::identity(3)};
  EXPECT_EQ(ok.size(), 2u);
  EXPECT_EQ(ok.dim(), 3u);
}

TEST(Eigen2x2, DiagonalSingular) {
  const auto e = eigen2x2(Matrix::diagonal({2.0, 0.0}));
  EXPECT_EQ(e[0].value, std::complex<double>(2.0));
  EXPECT_EQ(e[1].value, std::complex<double>(0.0));
  EXPECT_NEAR(std::abs(e[0].vector[0]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e[0].vector[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e[1].vector[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e[1].vector[1]), 1.0, 1e-15);
}

TEST(Eigen2x2, RotationSpectrum) {
  const auto e = eigen2x2(scaled_rotation(1.0, 1.0 / 3.0));
  const auto expect = std::polar(1.0, std::numbers::pi / 3);
  EXPECT_NEAR(std::abs(e[0].value - expect), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e[1].value - std::conj(expect)), 0.0, 1e-15);
}

TEST(Eigen2x2, AllOnes) {
  const Matrix m = Matrix::from_rows({{1, 1}, {1, 1}});
  const auto e = eigen2x2(m);
  EXPECT_NEAR(e[0].value.real(), 2.0, 1e-15);
  EXPECT_NEAR(std::abs(e[1].value), 0.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e[0].vector[0].real()), r, 1e-15);
  EXPECT_NEAR(e[0].vector[0].real(), e[0].vector[1].real(), 1e-15);
  EXPECT_NEAR(e[1].vector[0].real(), -e[1].vector[1].real(), 1e-15);
}

TEST(Eigen2x2, ResidualAndNormProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix m = random_matrix(2, rng);
    for (const auto& pair : eigen2x2(m)) {
      const auto& v = pair.vector;
      const double nv = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
      EXPECT_NEAR(nv, 1.0, 1e-12);
      const std::complex<double> r0 = m(0, 0) * v[0] + m(0, 1) * v[1] - pair.value * v[0];
      const std::complex<double> r1 = m(1, 0) * v[0] + m(1, 1) * v[1] - pair.value * v[1];
      EXPECT_LE(std::sqrt(std::norm(r0) + std::norm(r1)), 1e-12 * std::max(1.0, frobenius_norm(m)));
    }
  }
}

TEST(SingularValues, Examples) {
  auto s = singular_values(Matrix::identity(3));
  ASSERT_EQ(s.singulars.size(), 3u);
  for (double v : s.singulars) EXPECT_NEAR(v, 1.0, 1e-14);
  EXPECT_EQ(s.kernel_dim, 0u);

  s = singular_values(Matrix::diagonal({2.0, 0.0}));
  EXPECT_EQ(s.singulars[0], 0.0);
  EXPECT_EQ(s.singulars[1], 2.0);
  EXPECT_EQ(s.kernel_dim, 1u);

  s = singular_values(Matrix::from_rows({{1, 1}, {0, 1}}));
  EXPECT_NEAR(s.singulars[0], (std::sqrt(5.0) - 1) / 2, 1e-15);
  EXPECT_NEAR(s.singulars[1], (std::sqrt(5.0) + 1) / 2, 1e-15);

  s = singular_values(Matrix(4, 4));
  EXPECT_EQ(s.kernel_dim, 4u);
}

TEST(SingularValues, AgreeWithIterativeSolver) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix m = random_matrix(n, rng);
      const auto s = singular_values(m);
      const auto o = oracle_singulars(m);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(s.singulars[i], o[i], 1e-10 * o.back());
    }
  }
}

TEST(SingularValues, SquaresAreEigenvaluesOfGram) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix m = random_matrix(3, rng);
    const Eigen::MatrixXd g = to_eigen(m).transpose() * to_eigen(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const auto s = singular_values(m);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.singulars[i] * s.singulars[i], es.eigenvalues()[i], 1e-10 * es.eigenvalues()[2]);
  }
}

TEST(SingularValues, RankDeficientThreeByThree) {
  const Matrix m = Matrix::from_rows({{2, 0, 0}, {0, 0, 0.5}, {0, 0, 0}});
  const auto s = singular_values(m);
  EXPECT_EQ(s.kernel_dim, 1u);
  EXPECT_NEAR(s.singulars[1], 0.5, 1e-15);
  EXPECT_NEAR(s.singulars[2], 2.0, 1e-15);
}

TEST(SpectralRadius, Examples) {
  EXPECT_NEAR(spectral_radius(scaled_rotation(1.0, 1.0 / 3.0)), 1.0, 1e-15);
  EXPECT_EQ(spectral_radius(Matrix::diagonal({2.0, 0.5})), 2.0);
}

TEST(SpectralRadius, RankOneCycleProductEqualsTraceMagnitude) {
  const double lambda2 = 2.0, rho3 = 1.3, alpha = 0.37, beta = 0.21;
  // Kernel on the first axis, image along angle beta pi.
  const Matrix m1 = Matrix::from_rows({{0.0, lambda2 * cospi(beta) / sinpi(beta)}, {0.0, lambda2}});
  const Matrix j = scaled_rotation(rho3, alpha);
  Matrix jl = Matrix::identity(2);
  for (int l = 0; l <= 12; ++l) {
    const Matrix prod = m1 * jl;
    const double expect = lambda2 * std::pow(rho3, l) * std::abs(sinpi(l * alpha - beta)) / sinpi(beta);
    EXPECT_NEAR(spectral_radius(prod), expect, 1e-12 * std::max(1.0, expect));
    EXPECT_NEAR(spectral_radius(prod), std::abs(prod(0, 0) + prod(1, 1)), 1e-12 * std::max(1.0, expect));
    jl = j * jl;
  }
}

TEST(SpectralRadius, AgreesWithIterativeSolver) {
  std::mt19937_64 rng(13);
  for (std::size_t n = 2; n <= 7; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix m = random_matrix(n, rng);
      EXPECT_NEAR(spectral_radius(m), oracle_spectral_radius(m), 1e-10 * frobenius_norm(m));
    }
  }
}

TEST(SpectralRadius, NilpotentProductsSnapToZero) {
  const Matrix n2 = Matrix::from_rows({{0, 1}, {0, 0}});
  EXPECT_EQ(spectral_radius(n2), 0.0);
  const Matrix n3 = Matrix::from_rows({{0, 1, 3}, {0, 0, 1}, {0, 0, 0}});
  EXPECT_EQ(spectral_radius(n3), 0.0);
  // diag(2,0) after a quarter turn: the product maps the image into the kernel.
  const Matrix m1 = Matrix::diagonal({2.0, 0.0});
  const Matrix p = m1 * scaled_rotation(1.0, 0.5) * m1;
  EXPECT_EQ(spectral_radius(p), 0.0);
}

TEST(SpectralRadius, SimilarityInvariance) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const Matrix a = random_matrix(n, rng);
    Matrix p = random_matrix(n, rng);
    for (std::size_t i = 0; i < n; ++i) p(i, i) += 3.0;
    const Eigen::MatrixXd pinv = to_eigen(p).inverse();
    Matrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q(i, j) = pinv(i, j);
    EXPECT_NEAR(spectral_radius(q * a * p), spectral_radius(a), 1e-8 * std::max(1.0, spectral_radius(a)));
  }
}

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(Matrix::identity(2)), 1.0, 1e-15);
  EXPECT_EQ(operator_norm(Matrix::diagonal({2.0, 0.0})), 2.0);
  EXPECT_NEAR(operator_norm(Matrix::from_rows({{1, 1}, {0, 1}})), (std::sqrt(5.0) + 1) / 2, 1e-15);
}

TEST(OperatorNorm, DominatesSampledStretch) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> d;
  for (std::size_t n = 2; n <= 4; ++n) {
    const Matrix a = random_matrix(n, rng);
    const double reported = operator_norm(a);
    double sampled = 0.0;
    for (int k = 0; k < 10000; ++k) {
      std::vector<double> x(n);
      for (auto& v : x) v = d(rng);
      const double nx = euclidean_norm(x);
      for (auto& v : x) v /= nx;
      sampled = std::max(sampled, euclidean_norm(multiply_vector(a, x)));
    }
    EXPECT_LE(sampled, reported * (1 + 1e-12));
    EXPECT_GT(sampled, reported * (1 - 0.05));
  }
}

TEST(OperatorNorm, Submultiplicative) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const Matrix a = random_matrix(n, rng), b = random_matrix(n, rng);
    EXPECT_LE(operator_norm(a * b), operator_norm(a) * operator_norm(b) * (1 + 1e-12));
  }
}

TEST(RealJordan, CanonicalRotationIsItsOwnForm) {
  const auto j = real_jordan_2x2(scaled_rotation(1.0, 1.0 / 3.0));
  EXPECT_NEAR(j.modulus, 1.0, 1e-15);
  EXPECT_NEAR(j.angle, 1.0 / 3.0, 1e-15);
  // P commutes with the rotation: a scaled rotation itself.
  EXPECT_NEAR(j.transform(0, 0), j.transform(1, 1), 1e-15);
  EXPECT_NEAR(j.transform(0, 1), -j.transform(1, 0), 1e-15);
}

TEST(RealJordan, Examples) {
  auto j = real_jordan_2x2(Matrix::from_rows({{0, -2}, {2, 0}}));
  EXPECT_NEAR(j.modulus, 2.0, 1e-15);
  EXPECT_NEAR(j.angle, 0.5, 1e-15);
  j = real_jordan_2x2(Matrix::from_rows({{1, -1}, {1, 1}}));
  EXPECT_NEAR(j.modulus, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(j.angle, 0.25, 1e-15);
}

TEST(RealJordan, RejectsRealSpectrum) {
  try {
    real_jordan_2x2(Matrix::diagonal({2.0, 0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_complex_spectrum);
  }
  EXPECT_THROW(real_jordan_2x2(Matrix::identity(2)), Error);
}

TEST(RealJordan, ReconstructsRandomMatrices) {
  std::mt19937_64 rng(29);
  int tested = 0;
  while (tested < 500) {
    const Matrix m = random_matrix(2, rng);
    const double disc = std::pow(m(0, 0) - m(1, 1), 2) + 4 * m(0, 1) * m(1, 0);
    if (disc >= -1e-3) continue;
    ++tested;
    const auto j = real_jordan_2x2(m);
    EXPECT_GT(j.angle, 0.0);
    EXPECT_LT(j.angle, 1.0);
    EXPECT_NEAR(std::abs(determinant(j.transform)), 1.0, 1e-12);
    const Matrix back = j.transform * scaled_rotation(j.modulus, j.angle) * inverse2x2(j.transform);
    EXPECT_LE(frobenius_norm(back - m), 1e-9 * frobenius_norm(m));
  }
}
