#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "switchrad/error.hpp"
#include "switchrad/matrix.hpp"

namespace switchrad {

/// Switching sequence as 0-based member indices, oldest first.
using Sequence = std::vector<std::size_t>;

struct SearchOptions {
  std::uint64_t max_products = 10'000'000;  // guard on m^T
  unsigned workers = 0;                      // 0: hardware concurrency
};

/// Extrema of raw values (not rates) over all products of one length.
struct DepthExtrema {
  std::size_t depth = 0;
  std::uint64_t visited = 0;
  double min_norm = std::numeric_limits<double>::infinity();
  double max_norm = -1.0;
  double min_sr = std::numeric_limits<double>::infinity();
  double max_sr = -1.0;
  Sequence argmin_norm, argmax_norm, argmin_sr, argmax_sr;

  void merge(const DepthExtrema& later) {
    visited += later.visited;
    if (later.min_norm < min_norm) {
      min_norm = later.min_norm;
      argmin_norm = later.argmin_norm;
    }
    if (later.max_norm > max_norm) {
      max_norm = later.max_norm;
      argmax_norm = later.argmax_norm;
    }
    if (later.min_sr < min_sr) {
      min_sr = later.min_sr;
      argmin_sr = later.argmin_sr;
    }
    if (later.max_sr > max_sr) {
      max_sr = later.max_sr;
      argmax_sr = later.argmax_sr;
    }
  }
};

struct RateWitness {
  double rate = 0.0;
  Sequence sequence;
};

struct ProductSearchReport {
  std::size_t depth = 0;
  std::vector<DepthExtrema> per_depth;  // t = 1..depth
  double s_of_t = 0.0;                  // smallest operator norm at full depth
  RateWitness min_norm_rate;            // at full depth
  RateWitness max_norm_rate;
  RateWitness min_sr_rate;              // over all depths 1..T
  RateWitness max_sr_rate;
  std::uint64_t visited = 0;
};

inline double rate(double value, std::size_t t) { return std::pow(value, 1.0 / static_cast<double>(t)); }

/// Product M_{s_t} ... M_{s_1} for an oldest-first sequence.
inline Matrix product_of(const MatrixSet& set, const Sequence& seq) {
  Matrix acc = Matrix::identity(set.dim());
  Matrix next;
  for (std::size_t idx : seq) {
    if (idx >= set.size()) throw Error(Errc::validation_error, "switching index out of range");
    multiply(set[idx], acc, next);
    std::swap(acc, next);
  }
  return acc;
}

namespace detail {

inline std::uint64_t checked_power(std::uint64_t m, std::size_t t, std::uint64_t guard) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < t; ++i) {
    if (total > guard / std::max<std::uint64_t>(m, 1)) return guard + 1;
    total *= m;
  }
  return total;
}

inline void check_guard(const MatrixSet& set, std::size_t depth, const SearchOptions& opt) {
  if (set.size() == 0) throw Error(Errc::validation_error, "matrix set is empty");
  if (depth == 0) throw Error(Errc::invalid_config, "depth must be at least 1");
  const std::uint64_t n = checked_power(set.size(), depth, opt.max_products);
  if (n > opt.max_products) {
    throw Error(Errc::budget_exceeded, std::to_string(set.size()) + "^" + std::to_string(depth) +
                                           " products exceed the enumeration guard of " +
                                           std::to_string(opt.max_products) + "; use a smaller depth");
  }
}

// Depth-first walk over all extensions of `prefix` up to `depth`, visiting in
// lexicographic (oldest-first) order. The visitor sees each product once.
template <class Visit>
void walk(const MatrixSet& set, std::size_t depth, Sequence prefix, const Matrix& start, Visit& visit) {
  const std::size_t m = set.size();
  std::vector<Matrix> stack(depth + 1);
  stack[prefix.size()] = start;
  Sequence seq = std::move(prefix);
  const std::size_t base = seq.size();
  seq.reserve(depth);
  std::vector<std::size_t> choice(depth + 1, 0);
  std::size_t level = base;
  while (true) {
    if (level < depth && choice[level] < m) {
      const std::size_t i = choice[level]++;
      multiply(set[i], stack[level], stack[level + 1]);
      seq.push_back(i);
      ++level;
      visit(level, stack[level], seq);
      if (level < depth) choice[level] = 0;
      continue;
    }
    if (level == base) break;
    seq.pop_back();
    --level;
  }
}

template <class Acc, class MakeAcc>
Acc run_partitioned(const MatrixSet& set, std::size_t depth, const SearchOptions& opt, MakeAcc make) {
  unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t m = set.size();
  // Prefix length: enough branches to balance the workers.
  std::size_t plen = 0;
  std::uint64_t branches = 1;
  while (workers > 1 && plen < depth && branches < 8ull * workers) {
    branches *= m;
    ++plen;
  }
  Acc head = make();
  if (plen == 0) {
    walk(set, depth, {}, Matrix::identity(set.dim()), head);
    return head;
  }
  // Short products are handled serially, then each prefix subtree in parallel.
  std::vector<std::pair<Sequence, Matrix>> prefixes;
  {
    auto collect = [&](std::size_t level, const Matrix& a, const Sequence& seq) {
      head(level, a, seq);
      if (level == plen) prefixes.emplace_back(seq, a);
    };
    walk(set, plen, {}, Matrix::identity(set.dim()), collect);
  }
  std::vector<Acc> parts(prefixes.size(), make());
  if (plen < depth) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t k; (k = next.fetch_add(1)) < prefixes.size();) {
        walk(set, depth, prefixes[k].first, prefixes[k].second, parts[k]);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }
  for (const auto& p : parts) head.merge(p);
  return head;
}

struct RatesAcc {
  std::vector<DepthExtrema> depth;

  explicit RatesAcc(std::size_t t = 0) : depth(t) {
    for (std::size_t i = 0; i < t; ++i) depth[i].depth = i + 1;
  }

  void operator()(std::size_t level, const Matrix& a, const Sequence& seq) {
    DepthExtrema& d = depth[level - 1];
    ++d.visited;
    const double nrm = operator_norm(a);
    const double sr = spectral_radius(a);
    if (nrm < d.min_norm) {
      d.min_norm = nrm;
      d.argmin_norm = seq;
    }
    if (nrm > d.max_norm) {
      d.max_norm = nrm;
      d.argmax_norm = seq;
    }
    if (sr < d.min_sr) {
      d.min_sr = sr;
      d.argmin_sr = seq;
    }
    if (sr > d.max_sr) {
      d.max_sr = sr;
      d.argmax_sr = seq;
    }
  }

  void merge(const RatesAcc& later) {
    for (std::size_t i = 0; i < depth.size(); ++i) depth[i].merge(later.depth[i]);
  }
};

}  // namespace detail

/// Exhaustive extrema of norms and spectral radii over all products up to length T.
inline ProductSearchReport enumerate_rates(const MatrixSet& set, std::size_t depth, const SearchOptions& opt = {}) {
  detail::check_guard(set, depth, opt);
  auto acc = detail::run_partitioned<detail::RatesAcc>(set, depth, opt, [&] { return detail::RatesAcc(depth); });
  ProductSearchReport r;
  r.depth = depth;
  r.per_depth = std::move(acc.depth);
  const DepthExtrema& last = r.per_depth.back();
  r.s_of_t = last.min_norm;
  r.min_norm_rate = {rate(last.min_norm, depth), last.argmin_norm};
  r.max_norm_rate = {rate(last.max_norm, depth), last.argmax_norm};
  r.min_sr_rate.rate = std::numeric_limits<double>::infinity();
  r.max_sr_rate.rate = -1.0;
  for (const auto& d : r.per_depth) {
    r.visited += d.visited;
    const double lo = rate(d.min_sr, d.depth);
    const double hi = rate(d.max_sr, d.depth);
    if (lo < r.min_sr_rate.rate) r.min_sr_rate = {lo, d.argmin_sr};
    if (hi > r.max_sr_rate.rate) r.max_sr_rate = {hi, d.argmax_sr};
  }
  return r;
}

/// Smallest largest-singular-value over all products of length T.
inline double S_of_T(const MatrixSet& set, std::size_t depth, const SearchOptions& opt = {}) {
  detail::check_guard(set, depth, opt);
  struct Acc {
    std::size_t depth;
    double best = std::numeric_limits<double>::infinity();
    void operator()(std::size_t level, const Matrix& a, const Sequence&) {
      if (level == depth) best = std::min(best, operator_norm(a));
    }
    void merge(const Acc& o) { best = std::min(best, o.best); }
  };
  return detail::run_partitioned<Acc>(set, depth, opt, [&] { return Acc{depth}; }).best;
}

/// Lower bound subradius / m on the stabilizability radius, valid when the
/// supplied subradius is itself a lower estimate.
inline double theorem1_lower_bound(double subradius_estimate, std::size_t m) {
  if (m < 1) throw Error(Errc::invalid_config, "matrix set cardinality must be at least 1");
  if (!(subradius_estimate >= 0.0)) throw Error(Errc::out_of_range, "subradius estimate must be nonnegative");
  return subradius_estimate / static_cast<double>(m);
}

enum class Objective { spectral_radius, norm };

struct SequenceSearchResult {
  Sequence sequence;  // representative: lexicographically smallest member of the tie class
  double value = 0.0;
  double rate = 0.0;
  std::vector<Sequence> ties;  // all sequences within the relative tie tolerance, in visit order
  bool ties_truncated = false;
};

/// Exhaustive argmin of the objective over all products of exactly length t.
inline SequenceSearchResult optimal_sequence_search(const MatrixSet& set, std::size_t t, Objective objective,
                                                    const SearchOptions& opt = {}, double tie_tolerance = 1e-9,
                                                    std::size_t max_ties = 1024) {
  detail::check_guard(set, t, opt);
  struct Acc {
    std::size_t depth;
    Objective objective;
    double tol;
    std::size_t cap;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, Sequence>> ties;
    bool truncated = false;

    bool within(double v) const { return v <= best + tol * std::abs(best); }

    void prune() {
      std::erase_if(ties, [&](const auto& e) { return !within(e.first); });
    }

    void offer(double v, const Sequence& seq) {
      if (v < best) {
        best = v;
        prune();
      }
      if (within(v)) {
        if (ties.size() < cap) {
          ties.emplace_back(v, seq);
        } else {
          truncated = true;
        }
      }
    }

    void operator()(std::size_t level, const Matrix& a, const Sequence& seq) {
      if (level != depth) return;
      offer(objective == Objective::norm ? operator_norm(a) : spectral_radius(a), seq);
    }

    void merge(const Acc& later) {
      truncated = truncated || later.truncated;
      for (const auto& [v, s] : later.ties) offer(v, s);
    }
  };
  auto acc = detail::run_partitioned<Acc>(set, t, opt, [&] { return Acc{t, objective, tie_tolerance, max_ties, std::numeric_limits<double>::infinity(), {}, false}; });
  SequenceSearchResult r;
  r.ties_truncated = acc.truncated;
  for (auto& [v, s] : acc.ties) r.ties.push_back(std::move(s));
  r.sequence = r.ties.front();
  const Matrix a = product_of(set, r.sequence);
  r.value = objective == Objective::norm ? operator_norm(a) : spectral_radius(a);
  r.rate = rate(r.value, t);
  return r;
}

struct CertificateReport {
  std::vector<double> theta;
  std::vector<int> winner;             // index into products, -1 when none
  std::vector<double> best_norm;       // smallest ||A x0|| at each sample
  std::vector<std::vector<double>> norms;  // norms[k][i]: product k at sample i
  bool covered = false;
  double worst = 0.0;                  // largest best_norm over the grid
  std::vector<std::pair<double, double>> uncovered_intervals;
};

/// Checks that for every x0 = (cos theta, sin theta), theta in [0, pi], some listed
/// product maps x0 strictly inside the ball of radius 1 - margin.
inline CertificateReport stabilizability_certificate(const MatrixSet& set, const std::vector<Sequence>& products,
                                                     std::size_t grid_size, double margin = 0.0) {
  if (set.dim() != 2) throw Error(Errc::validation_error, "certificate needs a 2x2 matrix set");
  if (grid_size == 0) throw Error(Errc::invalid_config, "grid size must be positive");
  std::vector<Matrix> mats;
  for (const auto& p : products) mats.push_back(product_of(set, p));
  CertificateReport r;
  r.norms.assign(mats.size(), std::vector<double>(grid_size));
  r.covered = true;
  const double limit = 1.0 - margin;
  bool open = false;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double th = grid_size == 1 ? 0.0 : std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double x0[2] = {std::cos(th), std::sin(th)};
    double best = std::numeric_limits<double>::infinity();
    int win = -1;
    for (std::size_t k = 0; k < mats.size(); ++k) {
      const auto y = multiply_vector(mats[k], x0);
      const double nrm = euclidean_norm(y);
      r.norms[k][i] = nrm;
      if (nrm < best) {
        best = nrm;
        win = static_cast<int>(k);
      }
    }
    r.theta.push_back(th);
    r.best_norm.push_back(best);
    const bool ok = best < limit;
    r.winner.push_back(ok ? win : -1);
    r.worst = std::max(r.worst, best);
    if (!ok) {
      r.covered = false;
      if (!open) r.uncovered_intervals.emplace_back(th, th);
      r.uncovered_intervals.back().second = th;
    }
    open = !ok;
  }
  return r;
}

}  // namespace switchrad
