#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "switchrad/error.hpp"

namespace switchrad {

using HighReal = boost::multiprecision::cpp_bin_float_50;
using BigInt = boost::multiprecision::cpp_int;

/// Significant digits assumed for exactly specified inputs (rationals, cf digits).
inline constexpr int kExactInputDigits = 40;

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Rational make_rational(std::int64_t p, std::int64_t q) {
  if (q == 0) throw Error(Errc::validation_error, "zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p, q);
  return {p / g, q / g};
}

/// Distance to the nearest integer; ties resolve to exactly 1/2.
inline HighReal nearest_int_distance(const HighReal& x) {
  const HighReal f = x - boost::multiprecision::floor(x);
  return f <= HighReal(0.5) ? f : HighReal(1) - f;
}

/// An input real in one of three spellings. Only the fractional part enters
/// the computations; the integer part is kept for reporting.
struct RealInput {
  enum class Kind { rational, decimal, cf_digits };

  Kind kind = Kind::rational;
  std::int64_t integer_part = 0;
  Rational rational;                 // kind == rational, in [0, 1)
  BigInt decimal_num = 0;            // kind == decimal, value = num / den in [0, 1)
  BigInt decimal_den = 1;
  std::vector<std::int64_t> period;  // kind == cf_digits: a_1..a_K repeated forever
  int precision_digits = kExactInputDigits;

  static RealInput from_rational(std::int64_t p, std::int64_t q) {
    Rational r = make_rational(p, q);
    RealInput in;
    std::int64_t whole = r.num / r.den;
    std::int64_t rem = r.num % r.den;
    if (rem < 0) {
      rem += r.den;
      --whole;
    }
    in.kind = Kind::rational;
    in.integer_part = whole;
    in.rational = {rem, r.den};
    return in;
  }

  /// Plain decimal notation, e.g. "0.41421356237309504880". Precision is the
  /// number of significant digits unless `precision_override` is positive.
  static RealInput from_decimal(std::string_view text, int precision_override = 0) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
      negative = s.front() == '-';
      s.remove_prefix(1);
    }
    std::string digits;
    std::size_t frac_len = 0;
    bool seen_point = false;
    for (char ch : s) {
      if (ch == '.' && !seen_point) {
        seen_point = true;
      } else if (std::isdigit(static_cast<unsigned char>(ch))) {
        digits.push_back(ch);
        if (seen_point) ++frac_len;
      } else {
        throw Error(Errc::parse_error, "malformed decimal '" + std::string(text) + "'");
      }
    }
    if (digits.empty()) throw Error(Errc::parse_error, "malformed decimal '" + std::string(text) + "'");
    const std::size_t first = digits.find_first_not_of('0');
    const int significant = first == std::string::npos ? 0 : static_cast<int>(digits.size() - first);
    const int precision = precision_override > 0 ? precision_override : significant;
    if (precision < 15) {
      throw Error(Errc::validation_error,
                  "decimal input needs at least 15 significant digits, got " + std::to_string(precision));
    }
    BigInt num(first == std::string::npos ? std::string("0") : digits.substr(first));
    BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac_len));
    if (negative) num = -num;
    BigInt whole = num / den;
    BigInt rem = num % den;
    if (rem < 0) {
      rem += den;
      whole -= 1;
    }
    RealInput in;
    in.kind = Kind::decimal;
    in.integer_part = static_cast<std::int64_t>(whole);
    const BigInt g = boost::multiprecision::gcd(rem, den);
    in.decimal_num = rem / g;
    in.decimal_den = den / g;
    in.precision_digits = precision;
    return in;
  }

  static RealInput from_cf(std::vector<std::int64_t> period, std::int64_t integer_part = 0) {
    if (period.empty()) throw Error(Errc::validation_error, "continued fraction digits are empty");
    for (auto a : period) {
      if (a < 1) throw Error(Errc::validation_error, "continued fraction digits must be positive");
    }
    RealInput in;
    in.kind = Kind::cf_digits;
    in.integer_part = integer_part;
    in.period = std::move(period);
    return in;
  }

  bool is_rational() const noexcept { return kind == Kind::rational; }

  /// Fractional part in [0, 1).
  HighReal value() const {
    switch (kind) {
      case Kind::rational:
        return HighReal(rational.num) / HighReal(rational.den);
      case Kind::decimal:
        return HighReal(decimal_num) / HighReal(decimal_den);
      case Kind::cf_digits: {
        // x = [0; a_1..a_K, 1/x] solves q_{K-1} x^2 + (q_K - p_{K-1}) x - p_K = 0.
        BigInt p0 = 1, q0 = 0, p1 = 0, q1 = 1;
        for (auto a : period) {
          BigInt p2 = a * p1 + p0;
          BigInt q2 = a * q1 + q0;
          p0 = p1;
          q0 = q1;
          p1 = p2;
          q1 = q2;
        }
        const HighReal qa(q0), qb(q1 - p0), qc(-p1);
        if (q0 == 0) return -qc / qb;
        return (-qb + boost::multiprecision::sqrt(qb * qb - 4 * qa * qc)) / (2 * qa);
      }
    }
    return 0;
  }

  double to_double() const { return static_cast<double>(value()); }

  std::string describe() const {
    switch (kind) {
      case Kind::rational:
        return std::to_string(rational.num + integer_part * rational.den) + "/" + std::to_string(rational.den);
      case Kind::decimal:
        return value().str(precision_digits);
      case Kind::cf_digits: {
        std::string s = "cf:[";
        for (std::size_t i = 0; i < period.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(period[i]);
        }
        return s + "]";
      }
    }
    return {};
  }
};

struct CfBudget {
  std::size_t max_terms = 200;
  std::int64_t max_q = std::int64_t{1} << 62;
};

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

/// Continued fraction of the fractional part alpha = [0; a_1, a_2, ...].
/// Index k runs over convergents p_k/q_k with p_0/q_0 = 0/1; digits[k-1] = a_k;
/// errors[k] = D_k = q_k alpha - p_k.
struct ContinuedFraction {
  std::int64_t integer_part = 0;
  std::vector<std::int64_t> digits;
  std::vector<Convergent> convergents;
  std::vector<HighReal> errors;
  HighReal value = 0;
  bool exact = false;

  std::size_t terms() const noexcept { return digits.size(); }
  std::int64_t digit(std::size_t k) const { return digits.at(k - 1); }  // a_k, k >= 1
};

namespace detail {

inline bool push_convergent(ContinuedFraction& cf, std::int64_t a, const CfBudget& budget) {
  const auto& c = cf.convergents;
  const std::int64_t p_prev = c.size() >= 2 ? c[c.size() - 2].p : 1;
  const std::int64_t q_prev = c.size() >= 2 ? c[c.size() - 2].q : 0;
  const __int128 q = static_cast<__int128>(a) * c.back().q + q_prev;
  const __int128 p = static_cast<__int128>(a) * c.back().p + p_prev;
  if (q > budget.max_q) return false;
  cf.digits.push_back(a);
  cf.convergents.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)});
  return true;
}

inline void fill_errors(ContinuedFraction& cf) {
  cf.errors.clear();
  for (const auto& c : cf.convergents) cf.errors.push_back(HighReal(c.q) * cf.value - HighReal(c.p));
}

}  // namespace detail

inline ContinuedFraction cf_expand(const RealInput& x, const CfBudget& budget = {}) {
  if (budget.max_terms == 0 || budget.max_q < 1) throw Error(Errc::invalid_config, "empty continued fraction budget");
  ContinuedFraction cf;
  cf.integer_part = x.integer_part;
  cf.value = x.value();
  cf.convergents.push_back({0, 1});
  switch (x.kind) {
    case RealInput::Kind::rational: {
      std::int64_t num = x.rational.num;
      std::int64_t den = x.rational.den;
      cf.exact = true;
      while (num != 0) {
        const std::int64_t a = den / num;
        const std::int64_t r = den % num;
        if (cf.terms() >= budget.max_terms || !detail::push_convergent(cf, a, budget)) {
          cf.exact = false;
          break;
        }
        den = num;
        num = r;
      }
      cf.errors.clear();
      const auto& r = x.rational;
      for (const auto& c : cf.convergents) {
        const __int128 n = static_cast<__int128>(c.q) * r.num - static_cast<__int128>(c.p) * r.den;
        cf.errors.push_back(HighReal(static_cast<std::int64_t>(n)) / HighReal(r.den));
      }
      return cf;
    }
    case RealInput::Kind::decimal: {
      BigInt num = x.decimal_num;
      BigInt den = x.decimal_den;
      const BigInt limit = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(x.precision_digits));
      bool terminated = false;
      while (true) {
        if (num == 0) {
          terminated = true;
          break;
        }
        const BigInt a = den / num;
        const BigInt r = den % num;
        if (a > BigInt(budget.max_q) || cf.terms() >= budget.max_terms) break;
        const BigInt q_next = a * cf.convergents.back().q +
                              (cf.convergents.size() >= 2 ? cf.convergents[cf.convergents.size() - 2].q : 0);
        if (q_next * q_next > limit) break;
        if (!detail::push_convergent(cf, static_cast<std::int64_t>(a), budget)) break;
        den = num;
        num = r;
      }
      detail::fill_errors(cf);
      if (terminated) cf.errors.back() = 0;
      return cf;
    }
    case RealInput::Kind::cf_digits: {
      for (std::size_t i = 0; cf.terms() < budget.max_terms; ++i) {
        if (!detail::push_convergent(cf, x.period[i % x.period.size()], budget)) break;
      }
      detail::fill_errors(cf);
      return cf;
    }
  }
  return cf;
}

/// Ostrowski digits; digits[k] is the coefficient of q_k (integer form, c_{k+1})
/// or of D_k (real form, b_{k+1}).
struct OstrowskiDigits {
  std::vector<std::int64_t> digits;
  HighReal target = 0;
  HighReal residual = 0;  // target minus the represented value
};

/// Digit constraints shared by both representations: 0 <= d_0 < a_1,
/// 0 <= d_k <= a_{k+1}, and d_{k-1} = 0 whenever d_k = a_{k+1}.
inline bool is_admissible(const std::vector<std::int64_t>& digits, const ContinuedFraction& cf) {
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (k + 1 > cf.terms()) return digits[k] == 0;
    const std::int64_t a = cf.digit(k + 1);
    const std::int64_t d = digits[k];
    if (d < 0) return false;
    if (k == 0 && d >= a) return false;
    if (d > a) return false;
    if (k > 0 && d == a && digits[k - 1] != 0) return false;
  }
  return true;
}

inline OstrowskiDigits ostrowski_integer(std::int64_t l, const ContinuedFraction& cf) {
  if (l < 0) throw Error(Errc::out_of_range, "negative integer has no Ostrowski representation");
  OstrowskiDigits out;
  out.target = HighReal(l);
  if (l == 0) return out;
  const auto& c = cf.convergents;
  if (l >= c.back().q) {
    throw Error(Errc::insufficient_expansion,
                "integer " + std::to_string(l) + " is not below the last available denominator " +
                    std::to_string(c.back().q));
  }
  std::size_t top = 0;
  while (top + 1 < c.size() && c[top + 1].q <= l) ++top;
  out.digits.assign(top + 1, 0);
  std::int64_t rem = l;
  for (std::size_t k = top + 1; k-- > 0;) {
    out.digits[k] = rem / c[k].q;
    rem -= out.digits[k] * c[k].q;
  }
  return out;
}

/// Real Ostrowski expansion theta = sum_k b_{k+1} D_k for theta in [-alpha, 1 - alpha).
inline OstrowskiDigits ostrowski_real(const HighReal& theta, const ContinuedFraction& cf) {
  if (theta < -cf.value || theta >= 1 - cf.value) {
    throw Error(Errc::out_of_range, "target " + theta.str(20) + " is outside [-alpha, 1 - alpha)");
  }
  OstrowskiDigits out;
  out.target = theta;
  HighReal r = theta;
  std::int64_t prev = 0;
  const std::size_t usable = cf.errors.size() >= 2 ? cf.errors.size() - 1 : 0;
  for (std::size_t k = 0; k < usable && k < cf.terms(); ++k) {
    const HighReal& dk = cf.errors[k];
    if (dk == 0) break;
    const HighReal d = abs(dk);
    const HighReal e = abs(cf.errors[k + 1]);
    const HighReal signed_r = dk > 0 ? r : HighReal(-r);
    std::int64_t b = 0;
    if (signed_r >= e) b = 1 + static_cast<std::int64_t>(boost::multiprecision::floor((signed_r - e) / d));
    const std::int64_t a = cf.digit(k + 1);
    const std::int64_t cap = k == 0 ? a - 1 : (prev == 0 ? a : a - 1);
    b = std::clamp<std::int64_t>(b, 0, cap);
    r -= HighReal(b) * dk;
    out.digits.push_back(b);
    prev = b;
  }
  out.residual = r;
  return out;
}

/// Target reduction used for the best-approximation sequence: theta = beta when
/// alpha < 1 - beta, else beta - 1.
inline HighReal reduce_target(const HighReal& beta, const HighReal& alpha) {
  return alpha < 1 - beta ? beta : HighReal(beta - 1);
}

/// ||l alpha - theta|| via the Ostrowski digit difference sum_k (c_{k+1} - b_{k+1}) D_k.
inline HighReal inhom_distance_ostrowski(std::int64_t l, const ContinuedFraction& cf, const HighReal& theta) {
  HighReal t = theta - boost::multiprecision::floor(theta + cf.value);
  const auto c = ostrowski_integer(l, cf);
  const auto b = ostrowski_real(t, cf);
  HighReal sum = -b.residual;
  const std::size_t n = std::max(c.digits.size(), b.digits.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t ck = k < c.digits.size() ? c.digits[k] : 0;
    const std::int64_t bk = k < b.digits.size() ? b.digits[k] : 0;
    if (ck != bk) sum += HighReal(ck - bk) * cf.errors[k];
  }
  return nearest_int_distance(sum);
}

/// ||l alpha - theta||, computed by high-precision multiply-reduce. For
/// truncated expansions the digit path is evaluated as a cross-check.
inline HighReal inhom_distance(std::int64_t l, const ContinuedFraction& cf, const HighReal& theta) {
  HighReal la;
  if (cf.exact && !cf.convergents.empty()) {
    const auto& last = cf.convergents.back();
    const __int128 m = (static_cast<__int128>(l) * last.p) % last.q;
    la = HighReal(static_cast<std::int64_t>(m)) / HighReal(last.q);
  } else {
    la = HighReal(l) * cf.value;
  }
  const HighReal naive = nearest_int_distance(la - theta);
  if (!cf.exact && l < cf.convergents.back().q && cf.errors.size() >= 2) {
    const HighReal other = inhom_distance_ostrowski(l, cf, theta);
    if (abs(other - naive) > HighReal(1e-12)) {
      throw Error(Errc::numeric_failure, "distance paths disagree at l = " + std::to_string(l) + ": " +
                                             naive.str(20) + " vs " + other.str(20));
    }
  }
  return naive;
}

/// Exact ||l alpha - beta|| for rational alpha and beta, as a fraction of (q * beta.den).
struct ExactDistance {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline ExactDistance exact_distance(std::int64_t l, const Rational& alpha, const Rational& beta) {
  const __int128 mod = static_cast<__int128>(alpha.den) * beta.den;
  __int128 r = (static_cast<__int128>(l % alpha.den) * alpha.num % alpha.den) * beta.den -
               static_cast<__int128>(beta.num) * alpha.den;
  r %= mod;
  if (r < 0) r += mod;
  const __int128 d = std::min(r, mod - r);
  return {static_cast<std::int64_t>(d), static_cast<std::int64_t>(mod)};
}

/// Smallest l >= 0 with ||l alpha - beta|| = 0, if any.
inline std::optional<std::int64_t> exact_zero_witness(const Rational& alpha, const Rational& beta) {
  // l p / q = beta_n / beta_d (mod 1)  <=>  l p = beta_n q / beta_d (mod q).
  const __int128 bq = static_cast<__int128>(beta.num) * alpha.den;
  if (bq % beta.den != 0) return std::nullopt;
  const std::int64_t q = alpha.den;
  std::int64_t t = static_cast<std::int64_t>((bq / beta.den) % q);
  if (t < 0) t += q;
  // Inverse of p mod q by the extended Euclidean algorithm.
  std::int64_t old_r = alpha.num % q, r = q, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t quot = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - quot * r};
    std::tie(old_s, s) = std::pair{s, old_s - quot * s};
  }
  if (old_r != 1) return t == 0 ? std::optional<std::int64_t>(0) : std::nullopt;
  std::int64_t inv = old_s % q;
  if (inv < 0) inv += q;
  return static_cast<std::int64_t>(static_cast<__int128>(t) * inv % q);
}

struct SequenceBudget {
  std::int64_t max_l = std::int64_t{1} << 62;
  std::size_t max_count = 4096;
};

/// Successive l at which ||l alpha - beta|| reaches a new strict minimum,
/// starting at l = 0. Every emitted l dominates all smaller l and stays below
/// the last available denominator.
inline std::vector<std::int64_t> best_approx_sequence(const ContinuedFraction& cf, const HighReal& beta,
                                                      const SequenceBudget& budget = {}) {
  if (cf.errors.size() < 2 || cf.errors[0] == 0) {
    throw Error(Errc::insufficient_expansion, "continued fraction has no usable terms");
  }
  std::vector<std::int64_t> out{0};
  std::int64_t l = 0;
  HighReal e = -beta - boost::multiprecision::round(-beta);
  while (out.size() < budget.max_count) {
    const HighReal d = abs(e);
    if (d == 0) break;
    const int want = e > 0 ? -1 : 1;  // required sign of m alpha - p
    const HighReal window = 2 * d;
    std::int64_t step = 0;
    HighReal step_err;
    // Intermediate convergents q_{k-1} + j q_k, D = D_{k-1} + j D_k, sign of D_{k-1}.
    for (std::size_t k = 0; k + 1 < cf.errors.size() && k < cf.terms(); ++k) {
      const HighReal d_prev = k == 0 ? HighReal(-1) : cf.errors[k - 1];
      const std::int64_t q_prev = k == 0 ? 0 : cf.convergents[k - 1].q;
      if ((d_prev > 0 ? 1 : -1) != want) continue;
      const HighReal& dk = cf.errors[k];
      if (dk == 0) break;
      const std::int64_t a = cf.digit(k + 1);
      if (abs(d_prev) - HighReal(a) * abs(dk) >= window) continue;
      std::int64_t j = 0;
      if (abs(d_prev) >= window) {
        j = static_cast<std::int64_t>(boost::multiprecision::floor((abs(d_prev) - window) / abs(dk))) + 1;
      }
      if (q_prev == 0) j = std::max<std::int64_t>(j, 1);
      j = std::min(j, a);
      const HighReal err = d_prev + HighReal(j) * dk;
      if (err == 0 || abs(err) >= window) continue;
      step = q_prev + j * cf.convergents[k].q;
      step_err = err;
      break;
    }
    const std::int64_t limit = std::min(budget.max_l, cf.convergents.back().q - 1);
    if (step == 0 || l > limit - step) break;
    l += step;
    e += step_err;
    e -= boost::multiprecision::round(e);
    out.push_back(l);
  }
  return out;
}

/// Partial sums l_n = sum_{k<=n} b_{k+1} q_k of the real Ostrowski digits of the
/// reduced target, consecutive duplicates removed.
inline std::vector<std::int64_t> ostrowski_partial_sums(const ContinuedFraction& cf, const HighReal& beta) {
  const auto b = ostrowski_real(reduce_target(beta, cf.value), cf);
  std::vector<std::int64_t> out;
  __int128 sum = 0;
  for (std::size_t k = 0; k < b.digits.size(); ++k) {
    sum += static_cast<__int128>(b.digits[k]) * cf.convergents[k].q;
    if (sum > (static_cast<__int128>(1) << 62)) break;
    const auto v = static_cast<std::int64_t>(sum);
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

}  // namespace switchrad
