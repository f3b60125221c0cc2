// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "switchrad/switchrad.hpp"

using namespace switchrad;

namespace {

using Clock = std::chrono::steady_clock;

std::string data(const std::string& name) { return std::string(SWITCHRAD_DATA_DIR) + "/" + name; }

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

MatrixSet example7_set(double alpha) {
  const auto sys = example7_system(alpha);
  return MatrixSet{sys.singular, sys.rotation};
}

Outcome extremal_angle() {
  Outcome o;
  for (auto [p, q] : {std::pair{1, 3}, std::pair{2, 3}}) {
    const auto t0 = Clock::now();
    const auto r = radius_example7(RealInput::from_rational(p, q));
    const double dt = seconds_since(t0);
    const std::string tag = std::to_string(p) + "/" + std::to_string(q);
    require(o, std::abs(r.value - 1.0) <= 1e-12, tag + ": value " + fmt(r.value));
    require(o, std::holds_alternative<FiniteAttained>(r.outcome) && r.witness() == 1, tag + ": witness is not l = 1");
    require(o, dt < 1e-3, tag + ": took " + fmt(dt * 1e3) + " ms");
    o.detail = o.pass ? o.detail + tag + " -> " + fmt(r.value) + " in " + fmt(dt * 1e6) + " us; " : o.detail;
  }
  return o;
}

Outcome upper_bound_law() {
  Outcome o;
  double worst = 0.0;
  for (std::int64_t k = 1; k <= 198; ++k) {
    const double v = radius_example7(RealInput::from_rational(k, 199)).value;
    worst = std::max(worst, v);
    require(o, v <= 1.0 + 1e-9, "k/199 with k = " + std::to_string(k) + " gives " + fmt(v));
  }
  std::size_t zeros = 0;
  for (std::int64_t k = 1; k <= 199; ++k) {
    const Rational a = make_rational(k, 200);
    if (a.den % 2 != 0) continue;
    const double v = radius_example7(RealInput::from_rational(k, 200)).value;
    require(o, v == 0.0, std::to_string(k) + "/200 gives " + fmt(v));
    ++zeros;
  }
  if (o.pass) o.detail = "max over k/199 = " + fmt(worst) + "; " + std::to_string(zeros) + " even-denominator zeros";
  return o;
}

Outcome rank_one_oracle() {
  Outcome o;
  SearchOptions opt;
  opt.max_products = std::uint64_t{1} << 27;
  double worst_cycle = 0.0, worst_bracket = 0.0;
  std::size_t cases = 0;
  std::map<std::int64_t, double> by_q;
  for (std::int64_t q = 3; q <= 12; ++q) {
    const auto t0 = Clock::now();
    std::map<double, double> search_by_alpha;
    for (std::int64_t p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      ++cases;
      const double alpha = static_cast<double>(p) / q;
      const Reduction red = reduce_system(example7_system(alpha));
      const auto r = exact_radius(red.params, RealInput::from_rational(p, q));
      const std::int64_t l = r.witness();
      Matrix cycle = red.singular;
      for (std::int64_t i = 0; i < l; ++i) cycle = cycle * red.rotation;
      const double oracle = std::pow(spectral_radius(cycle), 1.0 / static_cast<double>(l + 1));
      worst_cycle = std::max(worst_cycle, std::abs(oracle - r.value));
      require(o, std::abs(oracle - r.value) <= 1e-9,
              std::to_string(p) + "/" + std::to_string(q) + ": cycle " + fmt(oracle) + " vs " + fmt(r.value));
      const auto report = enumerate_rates(example7_set(alpha), static_cast<std::size_t>(2 * (q + 1)), opt);
      worst_bracket = std::max(worst_bracket, std::abs(report.min_sr_rate.rate - r.value));
      require(o, std::abs(report.min_sr_rate.rate - r.value) <= 1e-9,
              std::to_string(p) + "/" + std::to_string(q) + ": search " + fmt(report.min_sr_rate.rate) + " vs " +
                  fmt(r.value));
    }
    by_q[q] = seconds_since(t0);
  }
  if (o.pass) {
    o.detail = std::to_string(cases) + " angles; max |cycle - exact| = " + fmt(worst_cycle) +
               ", max |search - exact| = " + fmt(worst_bracket) + "; q = 12 search " + fmt(by_q[12]) + " s";
  }
  return o;
}

Outcome example8_search() {
  Outcome o;
  const auto set = load_system(data("example8.json")).set;
  const auto r = optimal_sequence_search(set, 10, Objective::spectral_radius);
  const Sequence expected = parse_products("M3M2M1M3M2M3M1M3M3M2", 3).front();
  const bool member = std::find(r.ties.begin(), r.ties.end(), expected) != r.ties.end();
  require(o, member, "sequence not in argmin tie class; representative " + render_sequence(r.sequence));
  require(o, !r.ties_truncated, "tie class truncated");
  if (o.pass) {
    o.detail = "min spectral radius " + fmt(r.value) + ", tie class of " + std::to_string(r.ties.size()) +
               " (cyclic rotations) contains it; representative " + render_sequence(r.sequence);
  }
  return o;
}

Outcome example4_certificate() {
  Outcome o;
  const auto set = load_system(data("example4_certificate.json")).set;
  const auto products = parse_products("A2A1, A2A1A1, A2A1A2, A2A1A2A1, A2A1A1A2", 2);
  const auto r = stabilizability_certificate(set, products, 10000);
  require(o, r.covered, "not covered; worst " + fmt(r.worst));
  if (o.pass) o.detail = "10000 angles covered, worst min-norm " + fmt(r.worst) + " (A1 = rotation, A2 = diagonal)";
  return o;
}

Outcome lower_bound_arithmetic() {
  Outcome o;
  for (const char* file : {"example5.json", "example6.json"}) {
    const auto set = load_system(data(file)).set;
    require(o, set.size() == 2, std::string(file) + " is not a pair");
    require(o, theorem1_lower_bound(1.0, set.size()) == 0.5, "bound from subradius 1 is not 1/2");
  }
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> qd(2, 9);
  double slack = INFINITY;
  for (int i = 0; i < 50; ++i) {
    std::int64_t p, q;
    do {
      q = qd(rng);
      p = std::uniform_int_distribution<std::int64_t>(1, q - 1)(rng);
    } while (std::gcd(p, q) != 1);
    const double alpha = static_cast<double>(p) / q;
    const auto report = enumerate_rates(example7_set(alpha), 12);
    const double bound = theorem1_lower_bound(report.min_sr_rate.rate, 2);
    const double exact = radius_example7(RealInput::from_rational(p, q)).value;
    slack = std::min(slack, exact - bound);
    require(o, bound <= exact + 1e-9, std::to_string(p) + "/" + std::to_string(q) + ": bound " + fmt(bound) +
                                          " above exact " + fmt(exact));
  }
  if (o.pass) o.detail = "bound 1/2 for both pairs; 50 random systems, min (exact - bound) = " + fmt(slack);
  return o;
}

long double frac_distance(long double x) {
  x -= std::floor(x);
  return std::min(x, 1.0L - x);
}

Outcome diophantine_suite() {
  Outcome o;
  const std::vector<std::vector<std::int64_t>> periods = {
      {1},       {2},       {3},    {4},       {5},          {7},       {12},      {1, 2},    {2, 1},    {1, 3},
      {3, 1, 2}, {1, 1, 5}, {2, 3}, {1, 4, 1}, {6, 1, 1, 2}, {1, 2, 3}, {9, 2},    {1, 1, 1, 8}, {2, 5, 2}, {4, 1, 7}};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t records = 0;
  double worst_dual = 0.0;
  const std::int64_t limit = 100000;
  std::vector<long double> prefix(limit + 1);
  for (const auto& period : periods) {
    const RealInput in = RealInput::from_cf(period);
    const auto cf = cf_expand(in);
    const long double a = static_cast<long double>(cf.value);
    for (int t = 0; t < 20; ++t) {
      const HighReal theta(u(rng));
      const std::string tag = in.describe() + " theta " + fmt(static_cast<double>(theta));
      const HighReal target = reduce_target(theta, cf.value);
      const auto digits = ostrowski_real(target, cf);
      require(o, is_admissible(digits.digits, cf), tag + ": real digits not admissible");
      HighReal s = 0;
      for (std::size_t k = 0; k < digits.digits.size(); ++k) {
        s += HighReal(digits.digits[k]) * cf.errors[k];
        require(o, abs(target - s) <= abs(cf.errors[k]), tag + ": reconstruction at depth " + std::to_string(k));
      }
      const long double b = static_cast<long double>(theta);
      long double m = 1.0L;
      for (std::int64_t l = 0; l <= limit; ++l) {
        m = std::min(m, frac_distance(static_cast<long double>(l) * a - b));
        prefix[l] = m;
      }
      for (std::int64_t ln : best_approx_sequence(cf, theta)) {
        ++records;
        const long double d = static_cast<long double>(inhom_distance(ln, cf, theta));
        require(o, d <= prefix[std::min(ln, limit)] + 1e-13L, tag + ": record " + std::to_string(ln) + " dominated");
        if (ln < cf.convergents.back().q) {
          require(o, is_admissible(ostrowski_integer(ln, cf).digits, cf), tag + ": integer digits not admissible");
        }
        const HighReal diff = abs(inhom_distance(ln, cf, theta) - inhom_distance_ostrowski(ln, cf, theta));
        worst_dual = std::max(worst_dual, static_cast<double>(diff));
        require(o, diff <= HighReal(1e-12), tag + ": dual paths differ at " + std::to_string(ln));
      }
    }
  }
  if (o.pass) {
    o.detail = "400 (alpha, theta) pairs, " + std::to_string(records) + " records checked; max dual-path gap " +
               fmt(worst_dual);
  }
  return o;
}

Outcome beta_suite() {
  Outcome o;
  for (double a : {0.5, 1.0, 1.5, 2.5}) {
    for (double b : {0.5, 1.0, 2.0}) require(o, reg_inc_beta(1.0, a, b) == 1.0, "I(1) is not exactly 1");
  }
  double worst_arcsin = 0.0, worst_sym = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double h = (i + 0.5) / 100.0;
    const double e = std::abs(reg_inc_beta(h, 0.5, 0.5) - 2.0 / std::numbers::pi * std::asin(std::sqrt(h)));
    worst_arcsin = std::max(worst_arcsin, e);
    require(o, e <= 1e-9, "arcsine form off by " + fmt(e) + " at h = " + fmt(h));
  }
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i <= 100; ++i) {
      const double h = i / 100.0;
      const double e =
          std::abs(reg_inc_beta(h, 0.5 * (n - 1), 0.5) - (1.0 - reg_inc_beta(1.0 - h, 0.5, 0.5 * (n - 1))));
      worst_sym = std::max(worst_sym, e);
      require(o, e <= 1e-10, "symmetry off by " + fmt(e) + " at n = " + std::to_string(n));
    }
  }
  if (o.pass) o.detail = "max arcsine error " + fmt(worst_arcsin) + ", max symmetry error " + fmt(worst_sym);
  return o;
}

Outcome scan_reproduction() {
  Outcome o;
  const std::string cmd = std::string(SWITCHRAD_CLI_PATH) + " scan --sample 2000 --seed 1";
  FILE* pipe = popen(cmd.c_str(), "r");
  require(o, pipe != nullptr, "cannot start CLI");
  if (!pipe) return o;
  std::string text;
  std::array<char, 8192> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), n);
  const int st = pclose(pipe);
  require(o, WIFEXITED(st) && WEXITSTATUS(st) == 0, "CLI exited with failure");

  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  require(o, line == "alpha,value,case,witness_l,certified", "bad header '" + line + "'");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(ss, line)) {
    std::stringstream ls(line);
    std::vector<std::string> cols;
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    require(o, cols.size() == 5, "row with " + std::to_string(cols.size()) + " columns");
    if (cols.size() != 5) break;
    require(o, cols[2] == "ExactZero" || cols[2] == "FiniteAttained" || cols[2] == "Truncated", "bad case " + cols[2]);
    require(o, cols[4] == "0" || cols[4] == "1", "bad certified flag " + cols[4]);
    const double alpha = std::stod(cols[0]), value = std::stod(cols[1]);
    require(o, value >= 0.0 && value <= 1.0, "value " + cols[1] + " out of [0, 1] at alpha " + cols[0]);
    rows.emplace_back(alpha, value);
  }
  require(o, rows.size() == 2000, std::to_string(rows.size()) + " rows");

  // Rows come sorted and mirrored, so row i pairs with row N-1-i.
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size() / 2; ++i) {
    const auto& a = rows[i];
    const auto& b = rows[rows.size() - 1 - i];
    require(o, std::abs(a.first + b.first - 1.0) <= 1e-11, "rows " + std::to_string(i) + " are not mirrored");
    worst = std::max(worst, std::abs(a.second - b.second));
    require(o, std::abs(a.second - b.second) <= 1e-12, "asymmetry " + fmt(a.second - b.second) + " at " + fmt(a.first));
  }
  if (o.pass) o.detail = std::to_string(rows.size()) + " rows, values in [0, 1], max pair asymmetry " + fmt(worst);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"exact equality at alpha = 1/3 and 2/3", 1.0, extremal_angle},
      {"upper-bound law on k/199, zeros on k/200", 5.0, upper_bound_law},
      {"rank-one cycle oracle and product-search agreement, q <= 12", 120.0, rank_one_oracle},
      {"length-10 spectral-radius search on the three-matrix set", 60.0, example8_search},
      {"five-product stabilizability certificate", 10.0, example4_certificate},
      {"subradius lower bound arithmetic and consistency", 120.0, lower_bound_arithmetic},
      {"continued fraction and Ostrowski property suite", 60.0, diophantine_suite},
      {"incomplete beta identities", 1.0, beta_suite},
      {"2000-angle scan: schema, range, symmetry", 30.0, scan_reproduction},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double dt = seconds_since(t0);
    if (o.pass && dt > c.budget_s) {
      o.pass = false;
      o.detail = "over time budget: " + o.detail;
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << index << "] " << c.name << " (" << fmt(dt) << " s, budget "
              << fmt(c.budget_s) << " s): " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
