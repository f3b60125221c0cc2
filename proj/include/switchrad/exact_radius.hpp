#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "switchrad/diophantine.hpp"
#include "switchrad/error.hpp"
#include "switchrad/matrix.hpp"

namespace switchrad {

/// A singular matrix paired with a matrix whose spectrum is a complex pair.
struct SingularRotationSystem {
  Matrix singular;
  Matrix rotation;
};

/// Parameters of the reduced system. Angles are in units of pi.
struct CanonicalParams {
  double image_eigenvalue = 0.0;   // nonzero eigenvalue of the singular matrix; 0 when nilpotent
  double rotation_modulus = 1.0;   // modulus of the complex eigenvalues
  double rotation_angle = 0.0;     // in (0, 1)
  double kernel_angle = 0.5;       // angle between kernel and image directions, in (0, 1/2]
  std::optional<Rational> kernel_angle_exact;

  bool nilpotent() const noexcept { return image_eigenvalue == 0.0; }
};

struct Reduction {
  CanonicalParams params;
  Matrix transform;  // P
  Matrix singular;   // P^-1 M1 P
  Matrix rotation;   // J
};

/// Similarity to real Jordan coordinates followed by extraction of the kernel angle.
inline Reduction reduce_system(const SingularRotationSystem& sys) {
  const Matrix& m1 = sys.singular;
  if (m1.rows() != 2 || m1.cols() != 2 || sys.rotation.rows() != 2 || sys.rotation.cols() != 2) {
    throw Error(Errc::validation_error, "singular/rotation system needs two 2x2 matrices");
  }
  if (!m1.all_finite() || !sys.rotation.all_finite()) {
    throw Error(Errc::validation_error, "system matrices have non-finite entries");
  }
  const double scale = frobenius_norm(m1);
  if (std::abs(determinant(m1)) > kSingularTol * scale * scale || scale == 0.0) {
    throw Error(Errc::not_singular, "first matrix is not singular (det = " + std::to_string(determinant(m1)) + ")");
  }
  const RealJordan jordan = real_jordan_2x2(sys.rotation);
  Reduction out;
  out.transform = jordan.transform;
  out.rotation = scaled_rotation(jordan.modulus, jordan.angle);
  out.singular = inverse2x2(jordan.transform) * m1 * jordan.transform;
  out.params.rotation_modulus = jordan.modulus;
  out.params.rotation_angle = jordan.angle;

  const double trace = m1(0, 0) + m1(1, 1);
  if (std::abs(trace) <= kSingularTol * scale) {
    out.params.image_eigenvalue = 0.0;
    return out;
  }
  out.params.image_eigenvalue = trace;
  const auto image = detail::null_vector_2(out.singular, out.singular(0, 0) + out.singular(1, 1), 0);
  const auto kernel = detail::null_vector_2(out.singular, 0.0, 1);
  const double inner = std::abs(image[0].real() * kernel[0].real() + image[1].real() * kernel[1].real());
  if (inner <= 1e-14) {
    out.params.kernel_angle = 0.5;
    out.params.kernel_angle_exact = Rational{1, 2};
  } else {
    out.params.kernel_angle = std::acos(std::min(inner, 1.0)) / std::numbers::pi;
  }
  if (!(out.params.kernel_angle > 0.0)) {
    throw Error(Errc::numeric_failure, "kernel and image directions coincide");
  }
  return out;
}

inline CanonicalParams canonicalize(const SingularRotationSystem& sys) { return reduce_system(sys).params; }

/// Canonical representatives: singular matrix with kernel on the first axis and
/// image direction at angle kernel_angle, and the scaled rotation J.
inline std::array<Matrix, 2> canonical_pair(const CanonicalParams& p) {
  const double cot = cospi(p.kernel_angle) / sinpi(p.kernel_angle);
  Matrix singular = Matrix::from_rows({{0.0, p.image_eigenvalue * cot}, {0.0, p.image_eigenvalue}});
  return {singular, scaled_rotation(p.rotation_modulus, p.rotation_angle)};
}

/// Per-step contraction of the cycle (l rotations, then the singular matrix),
/// given the distance ||l alpha - beta|| to the nearest integer.
inline double factor_from_distance(const CanonicalParams& p, std::int64_t l, double distance) {
  if (distance == 0.0) return 0.0;
  const double base = std::abs(p.image_eigenvalue) / p.rotation_modulus * sinpi(distance) / sinpi(p.kernel_angle);
  return p.rotation_modulus * std::pow(base, 1.0 / static_cast<double>(l + 1));
}

inline double per_step_factor(const CanonicalParams& p, std::int64_t l) {
  const HighReal x = HighReal(l) * HighReal(p.rotation_angle) - HighReal(p.kernel_angle);
  return factor_from_distance(p, l, static_cast<double>(nearest_int_distance(x)));
}

struct ExactZero {
  std::int64_t witness_l = 0;
};

struct FiniteAttained {
  std::int64_t l_star = 0;
};

struct Truncated {
  std::vector<std::int64_t> l_values;
  std::size_t best_index = 0;
  bool certified_upper = true;
  bool zero_within_tolerance = false;
};

struct RadiusResult {
  double value = 0.0;
  std::variant<ExactZero, FiniteAttained, Truncated> outcome;

  bool finite() const noexcept { return !std::holds_alternative<Truncated>(outcome); }

  std::string case_name() const {
    if (std::holds_alternative<ExactZero>(outcome)) return "ExactZero";
    if (std::holds_alternative<FiniteAttained>(outcome)) return "FiniteAttained";
    return "Truncated";
  }

  std::int64_t witness() const {
    if (const auto* z = std::get_if<ExactZero>(&outcome)) return z->witness_l;
    if (const auto* f = std::get_if<FiniteAttained>(&outcome)) return f->l_star;
    const auto& t = std::get<Truncated>(outcome);
    return t.l_values.empty() ? 0 : t.l_values[t.best_index];
  }
};

struct RadiusConfig {
  std::int64_t l_cap = 10000;
  int precision_digits = 0;  // 0: use the precision of the angle input
  CfBudget cf_budget;
  SequenceBudget sequence_budget;
  std::int64_t max_period = 10'000'000;  // rational angles scanned directly up to this denominator
  double zero_tolerance = 1e-12;
  double consistency_tolerance = 1e-9;
};

namespace detail {

inline void check_params(const CanonicalParams& p) {
  if (!(p.rotation_modulus > 0.0) || !std::isfinite(p.rotation_modulus)) {
    throw Error(Errc::validation_error, "rotation modulus must be positive");
  }
  if (!(p.rotation_angle > 0.0 && p.rotation_angle < 1.0)) {
    throw Error(Errc::out_of_range, "rotation angle must lie in (0, 1)");
  }
  if (!(p.kernel_angle > 0.0 && p.kernel_angle <= 0.5)) {
    throw Error(Errc::out_of_range, "kernel angle must lie in (0, 1/2]");
  }
  if (!std::isfinite(p.image_eigenvalue)) throw Error(Errc::validation_error, "eigenvalue is not finite");
}

struct Incumbent {
  double value = 0.0;
  std::int64_t l = -1;

  void offer(double v, std::int64_t at) {
    if (l < 0 || v < value) {
      value = v;
      l = at;
    }
  }
};

inline RadiusResult zero_within_tolerance(std::int64_t l) {
  Truncated t;
  t.l_values = {l};
  t.certified_upper = false;
  t.zero_within_tolerance = true;
  return {0.0, t};
}

// log of the largest sine ratio that a candidate l could have and still beat `best`.
inline bool beyond_precision(const CanonicalParams& p, double best, std::int64_t l, int digits) {
  if (!(best > 0.0)) return true;
  const double lhs = static_cast<double>(l + 1) * std::log(best) - static_cast<double>(l) * std::log(p.rotation_modulus) +
                     std::log(sinpi(p.kernel_angle)) - std::log(std::abs(p.image_eigenvalue));
  return lhs < -static_cast<double>(digits) * std::log(10.0);
}

inline RadiusResult scan_period(const CanonicalParams& p, const Rational& alpha, const RadiusConfig& config) {
  Incumbent best;
  const std::int64_t q = alpha.den;
  long double beta_ld = p.kernel_angle;
  for (std::int64_t l = 0, r = 0; l < q; ++l, r = static_cast<std::int64_t>((static_cast<__int128>(r) + alpha.num) % q)) {
    double d;
    if (p.kernel_angle_exact) {
      const auto& b = *p.kernel_angle_exact;
      const __int128 mod = static_cast<__int128>(q) * b.den;
      __int128 x = (static_cast<__int128>(r) * b.den - static_cast<__int128>(b.num) * q) % mod;
      if (x < 0) x += mod;
      d = static_cast<double>(std::min(x, mod - x)) / static_cast<double>(mod);
    } else {
      long double x = static_cast<long double>(r) / static_cast<long double>(q) - beta_ld;
      x -= std::floor(x);
      d = static_cast<double>(std::min(x, 1.0L - x));
      if (d <= config.zero_tolerance) return zero_within_tolerance(l);
    }
    best.offer(factor_from_distance(p, l, d), l);
  }
  return {best.value, FiniteAttained{best.l}};
}

inline RadiusResult scan_expansion(const CanonicalParams& p, const RealInput& alpha, const RadiusConfig& config) {
  const ContinuedFraction cf = cf_expand(alpha, config.cf_budget);
  const HighReal a = cf.value;
  const HighReal b = p.kernel_angle_exact
                         ? HighReal(p.kernel_angle_exact->num) / HighReal(p.kernel_angle_exact->den)
                         : HighReal(p.kernel_angle);
  const int digits = config.precision_digits > 0 ? config.precision_digits : alpha.precision_digits;

  Incumbent best;
  HighReal x = -b;
  x -= boost::multiprecision::floor(x);
  for (std::int64_t l = 0; l <= config.l_cap; ++l) {
    const double d = static_cast<double>(std::min(x, HighReal(1) - x));
    if (d <= config.zero_tolerance) return zero_within_tolerance(l);
    best.offer(factor_from_distance(p, l, d), l);
    x += a;
    if (x >= 1) x -= 1;
  }
  bool stopped = beyond_precision(p, best.value, config.l_cap, digits);

  std::vector<std::int64_t> candidates;
  std::vector<std::int64_t> evaluated;
  if (!stopped) {
    try {
      candidates = best_approx_sequence(cf, b, config.sequence_budget);
    } catch (const Error& e) {
      if (e.code() != Errc::insufficient_expansion) throw;
    }
    try {
      const auto sums = ostrowski_partial_sums(cf, b);
      candidates.insert(candidates.end(), sums.begin(), sums.end());
    } catch (const Error& e) {
      if (e.code() != Errc::out_of_range) throw;
    }
    std::ranges::sort(candidates);
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::int64_t l : candidates) {
      if (l <= config.l_cap) continue;
      const double d = static_cast<double>(inhom_distance(l, cf, b));
      if (d <= config.zero_tolerance) return zero_within_tolerance(l);
      best.offer(factor_from_distance(p, l, d), l);
      evaluated.push_back(l);
      if (beyond_precision(p, best.value, l, digits)) {
        stopped = true;
        break;
      }
    }
  }
  if (stopped || cf.exact) return {best.value, FiniteAttained{best.l}};
  Truncated t;
  t.l_values = evaluated;
  if (std::ranges::find(t.l_values, best.l) == t.l_values.end()) {
    t.l_values.push_back(best.l);
    std::ranges::sort(t.l_values);
  }
  t.best_index = static_cast<std::size_t>(std::ranges::find(t.l_values, best.l) - t.l_values.begin());
  return {best.value, t};
}

}  // namespace detail

/// Stabilizability radius of the reduced system for the given rotation angle.
inline RadiusResult exact_radius(const CanonicalParams& params, const RealInput& alpha,
                                 const RadiusConfig& config = {}) {
  if (config.l_cap < 0) throw Error(Errc::invalid_config, "l_cap must be nonnegative");
  if (params.nilpotent()) return {0.0, ExactZero{0}};
  detail::check_params(params);
  const double a = alpha.to_double();
  if (!(a > 0.0)) throw Error(Errc::out_of_range, "rotation angle must lie in (0, 1)");
  if (std::abs(a - params.rotation_angle) > config.consistency_tolerance) {
    throw Error(Errc::validation_error, "angle input " + alpha.describe() + " does not match the rotation angle " +
                                            std::to_string(params.rotation_angle));
  }
  if (alpha.is_rational()) {
    if (params.kernel_angle_exact) {
      if (auto w = exact_zero_witness(alpha.rational, *params.kernel_angle_exact)) return {0.0, ExactZero{*w}};
    }
    if (alpha.rational.den <= config.max_period) return detail::scan_period(params, alpha.rational, config);
  }
  return detail::scan_expansion(params, alpha, config);
}

inline CanonicalParams example7_params(double alpha) {
  CanonicalParams p;
  p.image_eigenvalue = 2.0;
  p.rotation_modulus = 1.0;
  p.rotation_angle = alpha;
  p.kernel_angle = 0.5;
  p.kernel_angle_exact = Rational{1, 2};
  return p;
}

/// diag(2, 0) switched with the unit rotation by alpha pi.
inline SingularRotationSystem example7_system(double alpha) {
  return {Matrix::diagonal({2.0, 0.0}), scaled_rotation(1.0, alpha)};
}

inline RadiusResult radius_example7(const RealInput& alpha, const RadiusConfig& config = {}) {
  return exact_radius(example7_params(alpha.to_double()), alpha, config);
}

/// Euclidean norms of x(t) for t = 0..sequence.size(), where x(t+1) = M_{sigma(t)} x(t)
/// and the sequence lists member indices oldest first.
inline std::vector<double> simulate_law(std::span<const Matrix> members, std::span<const std::size_t> sequence,
                                        std::span<const double> x0) {
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> norms{euclidean_norm(x)};
  for (std::size_t idx : sequence) {
    if (idx >= members.size()) throw Error(Errc::validation_error, "switching index out of range");
    if (members[idx].cols() != x.size()) throw Error(Errc::validation_error, "state dimension mismatch");
    x = multiply_vector(members[idx], x);
    norms.push_back(euclidean_norm(x));
  }
  return norms;
}

/// Indices into {singular, rotation}: `l` rotations then the singular matrix, repeated.
inline std::vector<std::size_t> periodic_law(std::int64_t l, std::size_t cycles) {
  std::vector<std::size_t> seq;
  for (std::size_t c = 0; c < cycles; ++c) {
    seq.insert(seq.end(), static_cast<std::size_t>(l), 1);
    seq.push_back(0);
  }
  return seq;
}

}  // namespace switchrad
