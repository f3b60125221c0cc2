#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "switchrad/error.hpp"

namespace switchrad {

/// Relative threshold below which a singular value (or eigenvalue magnitude)
/// is treated as zero, measured against the largest singular value.
inline constexpr double kSingularTol = 1e-10;

/// Strict margin on the 2x2 discriminant for accepting a complex spectrum.
inline constexpr double kEigenTol = 1e-12;

inline constexpr double kAbsoluteFloor = 1e-300;

// sin(pi x) and cos(pi x) with exact zeros at integers and half-integers.
inline double sinpi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < -1.0) r += 2.0;
  if (r >= 1.0) r -= 2.0;
  double sign = 1.0;
  if (r < 0.0) {
    r = -r;
    sign = -1.0;
  }
  if (r > 0.5) r = 1.0 - r;
  const double v = r <= 0.25 ? std::sin(std::numbers::pi * r)
                             : std::cos(std::numbers::pi * (0.5 - r));
  return sign * v;
}

inline double cospi(double x) {
  double r = std::fmod(std::abs(x), 2.0);
  if (r > 1.0) r = 2.0 - r;
  double sign = 1.0;
  if (r > 0.5) {
    r = 1.0 - r;
    sign = -1.0;
  }
  const double v = r <= 0.25 ? std::cos(std::numbers::pi * r)
                             : std::sin(std::numbers::pi * (0.5 - r));
  return sign * v;
}

/// Small dense real matrix with inline storage, at most 8x8.
class Matrix {
 public:
  static constexpr std::size_t kMaxDim = 8;

  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows > kMaxDim || cols > kMaxDim) {
      throw Error(Errc::unsupported_size,
                  "matrix dimension " + std::to_string(std::max(rows, cols)) +
                      " exceeds the supported maximum of " + std::to_string(kMaxDim));
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw Error(Errc::validation_error, "ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<std::vector<double>> v;
    for (const auto& row : rows) v.emplace_back(row);
    return from_rows(v);
  }

  static Matrix diagonal(std::initializer_list<double> values) {
    Matrix m(values.size(), values.size());
    std::size_t i = 0;
    for (double v : values) {
      m(i, i) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  std::span<const double> entries() const noexcept { return {data_.data(), rows_ * cols_}; }

  bool all_finite() const noexcept {
    return std::ranges::all_of(entries(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Matrix& a, const Matrix& b) noexcept {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && std::ranges::equal(a.entries(), b.entries());
  }

  /// out = a * b. `out` may not alias either operand.
  friend void multiply(const Matrix& a, const Matrix& b, Matrix& out) noexcept {
    out.rows_ = a.rows_;
    out.cols_ = b.cols_;
    const std::size_t n = a.cols_;
    if (a.rows_ == 2 && n == 2 && b.cols_ == 2) {
      const double* x = a.data_.data();
      const double* y = b.data_.data();
      double* z = out.data_.data();
      z[0] = x[0] * y[0] + x[1] * y[2];
      z[1] = x[0] * y[1] + x[1] * y[3];
      z[2] = x[2] * y[0] + x[3] * y[2];
      z[3] = x[2] * y[1] + x[3] * y[3];
      return;
    }
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < b.cols_; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
        out(i, j) = s;
      }
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::array<double, kMaxDim * kMaxDim> data_{};
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::validation_error, "matrix product dimension mismatch");
  Matrix out;
  multiply(a, b, out);
  return out;
}

inline Matrix operator*(double s, Matrix a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) *= s;
  return a;
}

inline Matrix operator-(Matrix a, const Matrix& b) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= b(i, j);
  return a;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline std::vector<double> multiply_vector(const Matrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

inline double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return std::sqrt(s);
}

inline Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

inline double determinant(const Matrix& a) {
  if (!a.is_square()) throw Error(Errc::validation_error, "determinant of a non-square matrix");
  switch (a.rows()) {
    case 0:
      return 1.0;
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      return to_eigen(a).fullPivLu().determinant();
  }
}

inline Matrix inverse2x2(const Matrix& a) {
  const double det = determinant(a);
  if (det == 0.0 || !std::isfinite(1.0 / det)) throw Error(Errc::numeric_failure, "singular 2x2 matrix");
  return Matrix::from_rows({{a(1, 1) / det, -a(0, 1) / det}, {-a(1, 0) / det, a(0, 0) / det}});
}

/// modulus * [[cos(angle pi), sin(angle pi)], [-sin(angle pi), cos(angle pi)]]
inline Matrix scaled_rotation(double modulus, double angle) {
  const double c = modulus * cospi(angle);
  const double s = modulus * sinpi(angle);
  return Matrix::from_rows({{c, s}, {-s, c}});
}

/// Ordered list of same-dimension square matrices; member order is the index
/// used by switching sequences.
class MatrixSet {
 public:
  MatrixSet() = default;

  explicit MatrixSet(std::vector<Matrix> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error(Errc::validation_error, "matrix set is empty");
    const std::size_t n = members_.front().rows();
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const Matrix& m = members_[i];
      if (!m.is_square() || m.rows() != n) {
        throw Error(Errc::validation_error,
                    "matrix " + std::to_string(i + 1) + " is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected " + std::to_string(n) + "x" +
                        std::to_string(n));
      }
      if (n < 2) throw Error(Errc::validation_error, "system matrices must be at least 2x2");
      if (!m.all_finite()) {
        throw Error(Errc::validation_error, "matrix " + std::to_string(i + 1) + " has non-finite entries");
      }
    }
  }

  MatrixSet(std::initializer_list<Matrix> members) : MatrixSet(std::vector<Matrix>(members)) {}

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t dim() const noexcept { return members_.empty() ? 0 : members_.front().rows(); }
  const Matrix& operator[](std::size_t i) const { return members_[i]; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  const std::vector<Matrix>& members() const noexcept { return members_; }

 private:
  std::vector<Matrix> members_;
};

namespace detail {

using Complex = std::complex<double>;

inline std::array<Complex, 2> quadratic_roots(double b, double c) {
  // x^2 + b x + c
  const double half = -0.5 * b;
  const double disc = half * half - c;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double big = half >= 0.0 ? half + s : half - s;
    const double small = big != 0.0 ? c / big : 0.0;
    return {Complex(big, 0.0), Complex(small, 0.0)};
  }
  const double s = std::sqrt(-disc);
  return {Complex(half, s), Complex(half, -s)};
}

inline double polish_cubic_root(double x, double b, double c, double d) {
  for (int it = 0; it < 3; ++it) {
    const double f = ((x + b) * x + c) * x + d;
    const double df = (3.0 * x + 2.0 * b) * x + c;
    if (df == 0.0) break;
    const double step = f / df;
    if (!std::isfinite(step)) break;
    const double next = x - step;
    const double fn = ((next + b) * next + c) * next + d;
    if (std::abs(fn) >= std::abs(f)) break;
    x = next;
  }
  return x;
}

// Roots of x^3 + b x^2 + c x + d.
inline std::array<Complex, 3> cubic_roots(double b, double c, double d) {
  const double shift = b / 3.0;
  const double p = c - b * shift;
  const double q = 2.0 * shift * shift * shift - shift * c + d;
  const double scale = std::max({std::abs(b), std::abs(c), std::abs(d), 1e-300});
  if (std::abs(p) <= 1e-15 * scale * scale && std::abs(q) <= 1e-15 * scale * scale * scale) {
    const double r = -shift;
    return {Complex(r), Complex(r), Complex(r)};
  }
  const double half_q = 0.5 * q;
  const double third_p = p / 3.0;
  const double delta = half_q * half_q + third_p * third_p * third_p;
  if (delta > 0.0) {
    const double u = std::cbrt(-half_q - std::copysign(std::sqrt(delta), half_q));
    const double y = u != 0.0 ? u - third_p / u : 0.0;
    const double r = polish_cubic_root(y - shift, b, c, d);
    const double e = b + r;
    const double f = c + e * r;
    const auto rest = quadratic_roots(e, f);
    return {Complex(r), rest[0], rest[1]};
  }
  const double m = 2.0 * std::sqrt(-third_p);
  double arg = (3.0 * q) / (p * m);
  arg = std::clamp(arg, -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  std::array<Complex, 3> out;
  for (int k = 0; k < 3; ++k) {
    const double y = m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
    out[k] = Complex(polish_cubic_root(y - shift, b, c, d));
  }
  return out;
}

inline double max_abs_entry(const Matrix& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

inline double spectral_radius_2(const Matrix& a) {
  const double half_tr = 0.5 * (a(0, 0) + a(1, 1));
  const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
  const double disc = half_diff * half_diff + a(0, 1) * a(1, 0);
  if (disc >= 0.0) return std::abs(half_tr) + std::sqrt(disc);
  return std::sqrt(half_tr * half_tr - disc);
}

inline std::array<double, 2> singular_values_2(const Matrix& a) {
  const double m = max_abs_entry(a);
  if (m == 0.0) return {0.0, 0.0};
  const double x = a(0, 0) / m, y = a(0, 1) / m, z = a(1, 0) / m, w = a(1, 1) / m;
  const double f = x * x + y * y + z * z + w * w;
  const double det = std::abs(x * w - y * z);
  const double big2 = 0.5 * (f + std::sqrt(std::max(f * f - 4.0 * det * det, 0.0)));
  const double big = std::sqrt(big2);
  const double small = big > 0.0 ? det / big : 0.0;
  return {small * m, big * m};
}

inline std::array<double, 3> singular_values_3(const Matrix& a) {
  const double m = max_abs_entry(a);
  if (m == 0.0) return {0.0, 0.0, 0.0};
  const Matrix s = (1.0 / m) * a;
  // Characteristic polynomial of s^T s: t^3 - c2 t^2 + c1 t - c0.
  const double c2 = [&] {
    double t = 0.0;
    for (double v : s.entries()) t += v * v;
    return t;
  }();
  double c1 = 0.0;
  for (std::size_t r0 = 0; r0 < 3; ++r0)
    for (std::size_t r1 = r0 + 1; r1 < 3; ++r1)
      for (std::size_t k0 = 0; k0 < 3; ++k0)
        for (std::size_t k1 = k0 + 1; k1 < 3; ++k1) {
          const double minor = s(r0, k0) * s(r1, k1) - s(r0, k1) * s(r1, k0);
          c1 += minor * minor;
        }
  const double det = determinant(s);
  const double c0 = det * det;
  // Largest root by the trigonometric form (all roots are real and >= 0).
  const double shift = c2 / 3.0;
  const double p = c1 - c2 * shift;
  const double q = -2.0 * shift * shift * shift + shift * c1 - c0;
  double top = shift;
  if (p < 0.0) {
    const double mm = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp((3.0 * q) / (p * mm), -1.0, 1.0);
    top = shift + mm * std::cos(std::acos(arg) / 3.0);
  }
  top = polish_cubic_root(top, -c2, c1, -c0);
  const double sum = std::max(c2 - top, 0.0);
  const double prod = top > 0.0 ? c0 / top : 0.0;
  const double mid = 0.5 * (sum + std::sqrt(std::max(sum * sum - 4.0 * prod, 0.0)));
  const double low = mid > 0.0 ? prod / mid : 0.0;
  return {std::sqrt(std::max(low, 0.0)) * m, std::sqrt(std::max(mid, 0.0)) * m,
          std::sqrt(std::max(top, 0.0)) * m};
}

inline void require_square(const Matrix& a) {
  if (!a.is_square()) throw Error(Errc::validation_error, "expected a square matrix");
}

}  // namespace detail

/// All eigenvalues of a square matrix: closed form for n <= 3, Eigen beyond.
inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  detail::require_square(a);
  const std::size_t n = a.rows();
  if (n == 1) return {a(0, 0)};
  if (n == 2) {
    const double tr = a(0, 0) + a(1, 1);
    const auto r = detail::quadratic_roots(-tr, determinant(a));
    return {r[0], r[1]};
  }
  if (n == 3) {
    const double m = detail::max_abs_entry(a);
    if (m == 0.0) return {0.0, 0.0, 0.0};
    const Matrix s = (1.0 / m) * a;
    const double tr = s(0, 0) + s(1, 1) + s(2, 2);
    const double minors = (s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0)) +
                          (s(0, 0) * s(2, 2) - s(0, 2) * s(2, 0)) +
                          (s(1, 1) * s(2, 2) - s(1, 2) * s(2, 1));
    const auto r = detail::cubic_roots(-tr, minors, -determinant(s));
    return {r[0] * m, r[1] * m, r[2] * m};
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(to_eigen(a), false);
  if (solver.info() != Eigen::Success) throw Error(Errc::numeric_failure, "eigenvalue iteration did not converge");
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(solver.eigenvalues()[i]);
  return out;
}

struct SvdSummary {
  std::vector<double> singulars;  // ascending
  std::size_t kernel_dim = 0;

  double largest() const { return singulars.empty() ? 0.0 : singulars.back(); }
  double smallest() const { return singulars.empty() ? 0.0 : singulars.front(); }
};

inline SvdSummary singular_values(const Matrix& a) {
  detail::require_square(a);
  const std::size_t n = a.rows();
  SvdSummary out;
  if (n == 2) {
    const auto s = detail::singular_values_2(a);
    out.singulars.assign(s.begin(), s.end());
  } else if (n == 3) {
    const auto s = detail::singular_values_3(a);
    out.singulars.assign(s.begin(), s.end());
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
    const auto& s = svd.singularValues();
    for (Eigen::Index i = s.size(); i-- > 0;) out.singulars.push_back(s[i]);
  }
  const double top = out.largest();
  if (top <= kAbsoluteFloor) {
    out.kernel_dim = n;
  } else {
    out.kernel_dim = static_cast<std::size_t>(
        std::ranges::count_if(out.singulars, [&](double s) { return s <= kSingularTol * top; }));
  }
  return out;
}

/// Largest singular value (Euclidean operator norm).
inline double operator_norm(const Matrix& a) {
  detail::require_square(a);
  if (a.rows() == 2) return detail::singular_values_2(a)[1];
  if (a.rows() == 3) return detail::singular_values_3(a)[2];
  return singular_values(a).largest();
}

/// Largest eigenvalue magnitude. Magnitudes at or below kSingularTol * ||A||_F
/// are indistinguishable from rounding residue and are reported as exactly 0.
inline double spectral_radius(const Matrix& a) {
  detail::require_square(a);
  double rho = 0.0;
  if (a.rows() == 2) {
    rho = detail::spectral_radius_2(a);
  } else {
    for (const auto& z : eigenvalues(a)) rho = std::max(rho, std::abs(z));
  }
  if (rho <= kSingularTol * frobenius_norm(a)) return 0.0;
  return rho;
}

struct EigenPair2 {
  std::complex<double> value;
  std::array<std::complex<double>, 2> vector;
};

namespace detail {

inline std::array<std::complex<double>, 2> null_vector_2(const Matrix& m, std::complex<double> lambda,
                                                         int fallback_axis) {
  using C = std::complex<double>;
  // Rows of (M - lambda I) give two candidate null vectors; keep the better conditioned one.
  std::array<C, 2> u{C(m(0, 1)), lambda - m(0, 0)};
  std::array<C, 2> v{lambda - m(1, 1), C(m(1, 0))};
  const double nu = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
  const double nv = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  std::array<C, 2> w = nu >= nv ? u : v;
  double nw = std::max(nu, nv);
  const double scale = std::max(detail::max_abs_entry(m), std::abs(lambda));
  if (nw <= 1e-14 * std::max(scale, 1e-300)) {
    w = fallback_axis == 0 ? std::array<C, 2>{C(1.0), C(0.0)} : std::array<C, 2>{C(0.0), C(1.0)};
    nw = 1.0;
  }
  w[0] /= nw;
  w[1] /= nw;
  // Fix the phase: first non-negligible component real and positive.
  const C pivot = std::abs(w[0]) > 1e-12 ? w[0] : w[1];
  const C phase = std::conj(pivot) / std::abs(pivot);
  w[0] *= phase;
  w[1] *= phase;
  if (std::abs(w[0].imag()) < 1e-300) w[0] = C(w[0].real());
  if (std::abs(w[1].imag()) < 1e-300) w[1] = C(w[1].real());
  return w;
}

}  // namespace detail

/// Both eigenpairs of a 2x2 matrix, ordered by |value| descending, then real
/// part descending, then imaginary part descending.
inline std::array<EigenPair2, 2> eigen2x2(const Matrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw Error(Errc::validation_error, "eigen2x2 needs a 2x2 matrix");
  using C = std::complex<double>;
  const double half_tr = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  const double disc = half_diff * half_diff + m(0, 1) * m(1, 0);
  std::array<C, 2> values;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double big = half_tr >= 0.0 ? half_tr + s : half_tr - s;
    const double det = determinant(m);
    const double small = big != 0.0 ? det / big : half_tr - s;
    values = {C(big), C(small)};
  } else {
    const double s = std::sqrt(-disc);
    values = {C(half_tr, s), C(half_tr, -s)};
  }
  auto before = [](C a, C b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  };
  if (before(values[1], values[0])) std::swap(values[0], values[1]);
  std::array<EigenPair2, 2> out;
  for (int i = 0; i < 2; ++i) {
    out[i].value = values[i];
    out[i].vector = detail::null_vector_2(m, values[i], i);
  }
  return out;
}

struct RealJordan {
  Matrix transform;      // P with M = P * J * P^-1
  double modulus = 0.0;  // |lambda|
  double angle = 0.0;    // arg(lambda) / pi, in (0, 1)
};

/// Real Jordan form of a 2x2 matrix with a strictly complex spectrum.
/// J = modulus * [[cos(angle pi), sin(angle pi)], [-sin(angle pi), cos(angle pi)]].
inline RealJordan real_jordan_2x2(const Matrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw Error(Errc::validation_error, "real_jordan_2x2 needs a 2x2 matrix");
  const double disc = (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) + 4.0 * m(0, 1) * m(1, 0);
  if (!(disc < -kEigenTol)) {
    throw Error(Errc::not_complex_spectrum, "matrix does not have a complex-conjugate spectrum (discriminant " +
                                                std::to_string(disc) + ")");
  }
  const double re = 0.5 * (m(0, 0) + m(1, 1));
  const double im = 0.5 * std::sqrt(-disc);
  // Eigenvector of the eigenvalue with negative imaginary part; columns (Re w, -Im w).
  const auto w = detail::null_vector_2(m, std::complex<double>(re, -im), 0);
  Matrix p = Matrix::from_rows({{w[0].real(), -w[0].imag()}, {w[1].real(), -w[1].imag()}});
  const double det = determinant(p);
  if (det == 0.0) throw Error(Errc::numeric_failure, "degenerate real Jordan basis");
  p = (1.0 / std::sqrt(std::abs(det))) * p;
  RealJordan out;
  out.transform = p;
  out.modulus = std::hypot(re, im);
  out.angle = std::atan2(im, re) / std::numbers::pi;
  return out;
}

}  // namespace switchrad
