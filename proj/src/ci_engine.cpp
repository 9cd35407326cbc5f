#include "snqesa/ci_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "snqesa/score_kernel.hpp"
#include "snqesa/special.hpp"

namespace snq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t upper_idx(std::span<const double> x, double v) {
  return static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), v) - x.begin());
}
std::size_t lower_idx(std::span<const double> x, double v) {
  return static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), v) - x.begin());
}

// Inverse of the piecewise-linear count map. Returns NaN when κ lies below
// the first knot (no threshold attains it).
double threshold_for_count(std::span<const double> x, double kappa) {
  const std::size_t n = x.size();
  if (kappa >= static_cast<double>(n)) return x[n - 1];
  const auto m = static_cast<std::size_t>(std::floor(kappa));
  if (m < 1) {
    const std::size_t c1 = upper_idx(x, x[0]);
    return kappa == static_cast<double>(c1) ? x[0] : std::numeric_limits<double>::quiet_NaN();
  }
  const double a_val = x[m - 1];
  const std::size_t lb = lower_idx(x, a_val);
  const std::size_t ub = upper_idx(x, a_val);
  if (static_cast<double>(ub) <= kappa) {
    // knot at x[m-1] with count m; next distinct value starts at index m
    const double ca = static_cast<double>(ub);
    if (kappa == ca) return a_val;
    const double b_val = x[ub];
    const double cb = static_cast<double>(upper_idx(x, b_val));
    const double th = (kappa - ca) / (cb - ca);
    return a_val + th * (b_val - a_val);
  }
  if (lb == 0) return std::numeric_limits<double>::quiet_NaN();
  const double lo_val = x[lb - 1];
  const double ca = static_cast<double>(lb);
  const double cb = static_cast<double>(ub);
  const double th = (kappa - ca) / (cb - ca);
  return lo_val + th * (a_val - lo_val);
}

TailResult tail_at_count(double kappa, std::size_t n, const QuantileSpec& spec, const TailConfig& cfg) {
  const ScoreStats st = score_from_count(kappa, n, spec.tau, spec.ridge_c);
  return directed_tail(st, spec.tau, n, cfg);
}

// Root of f(κ) = α/2 for a monotone f on [a, b] by bisection; `increasing`
// gives the direction. Assumes a sign change.
double bisect_count(double a, double b, bool increasing, double target, std::size_t n, const QuantileSpec& spec,
                    const TailConfig& cfg, bool use_up) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const TailResult tr = tail_at_count(mid, n, spec, cfg);
    const double p = use_up ? tr.p_up : tr.p_down;
    const bool below = p < target;
    if (below == increasing) a = mid; else b = mid;
    if (b - a <= 1e-13 * std::max(1.0, b)) break;
  }
  return 0.5 * (a + b);
}

// Tail pmf tables on 0..n: lower[k] = P(K < k), upper[k] = P(K >= k), k = 0..n+1.
struct BinomTables {
  std::vector<double> below;
  std::vector<double> at_or_above;
};

BinomTables binom_tables(std::size_t n, double tau) {
  const int ni = static_cast<int>(n);
  std::vector<double> pmf(n + 1);
  for (std::size_t k = 0; k <= n; ++k) pmf[k] = special::binom_pmf(static_cast<double>(k), ni, tau);
  BinomTables t;
  t.below.assign(n + 2, 0.0);
  t.at_or_above.assign(n + 2, 0.0);
  for (std::size_t k = 1; k <= n + 1; ++k) t.below[k] = t.below[k - 1] + pmf[k - 1];
  for (std::size_t k = n + 1; k-- > 0;) t.at_or_above[k] = t.at_or_above[k + 1] + pmf[k];
  return t;
}

void check_spec(const QuantileSpec& spec) { spec.validate(); }

}  // namespace

double interpolated_count(const Sample& sample, double t) {
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  if (t < x[0]) return 0.0;
  if (t >= x[n - 1]) return static_cast<double>(n);
  const std::size_t j = upper_idx(x, t);  // x[j-1] <= t < x[j]
  const double a = x[j - 1];
  const double b = x[j];
  const double ca = static_cast<double>(j);
  const double cb = static_cast<double>(upper_idx(x, b));
  if (t == a) return ca;
  return ca + (t - a) / (b - a) * (cb - ca);
}

TailResult interpolated_tail(const Sample& sample, double t, const QuantileSpec& spec, const TailConfig& cfg) {
  const double kappa = interpolated_count(sample, t);
  ScoreStats st = score_from_count(kappa, sample.n(), spec.tau, spec.ridge_c, t);
  return directed_tail(st, spec.tau, sample.n(), cfg);
}

CountRoots snqesa_count_roots(std::size_t n, const QuantileSpec& spec, const TailConfig& cfg) {
  check_spec(spec);
  const double nd = static_cast<double>(n);
  const double target = 0.5 * spec.alpha;
  const double mid = nd * spec.tau;
  CountRoots cr;

  // p_up grows with κ; p_down falls with κ.
  const double up0 = tail_at_count(0.0, n, spec, cfg).p_up;
  if (up0 > target) {
    cr.has_lo = false;
    cr.k_lo = 0.0;
  } else {
    cr.k_lo = bisect_count(0.0, mid, true, target, n, spec, cfg, true);
    cr.resid_lo = std::fabs(tail_at_count(cr.k_lo, n, spec, cfg).p_up - target);
  }
  const double downn = tail_at_count(nd, n, spec, cfg).p_down;
  if (downn > target) {
    cr.has_hi = false;
    cr.k_hi = nd;
  } else {
    cr.k_hi = bisect_count(mid, nd, false, target, n, spec, cfg, false);
    cr.resid_hi = std::fabs(tail_at_count(cr.k_hi, n, spec, cfg).p_down - target);
  }
  return cr;
}

IntervalResult snqesa_ci(const Sample& sample, const QuantileSpec& spec) {
  return snqesa_ci(sample, spec, TailConfig::from_spec(spec));
}

IntervalResult snqesa_ci(const Sample& sample, const QuantileSpec& spec, const TailConfig& cfg) {
  const auto t0 = Clock::now();
  IntervalResult res = snqesa_ci(sample, spec, cfg, snqesa_count_roots(sample.n(), spec, cfg));
  res.elapsed = seconds_since(t0);
  return res;
}

IntervalResult snqesa_ci(const Sample& sample, const QuantileSpec& spec, const TailConfig& cfg,
                         const CountRoots& cr) {
  const auto t0 = Clock::now();
  check_spec(spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  const double target = 0.5 * spec.alpha;

  IntervalResult res;
  res.method = "snqesa";
  res.level = 1.0 - spec.alpha;
  if (x.front() == x.back()) {
    res.lower = res.upper = x.front();
    res.diagnostic = "degenerate_sample";
    res.elapsed = seconds_since(t0);
    return res;
  }

  const double c1 = static_cast<double>(upper_idx(x, x[0]));
  if (!cr.has_lo || cr.k_lo < c1) {
    res.lower = x[0];
    res.open_lo = true;
    res.tail_residual_lo = std::fabs(tail_at_count(c1, n, spec, cfg).p_up - target);
  } else {
    res.lower = threshold_for_count(x, cr.k_lo);
    res.tail_residual_lo = cr.resid_lo;
  }
  if (!cr.has_hi) {
    res.upper = x[n - 1];
    res.open_hi = true;
    res.tail_residual_hi = std::fabs(tail_at_count(static_cast<double>(n), n, spec, cfg).p_down - target);
  } else {
    res.upper = threshold_for_count(x, cr.k_hi);
    res.tail_residual_hi = cr.resid_hi;
    if (std::isnan(res.upper)) {
      // κ_U below the first knot: a heavy tie at the minimum
      res.upper = x[0];
      res.open_hi = true;
    }
  }
  if (res.open_lo || res.open_hi) res.diagnostic = "open_end";
  res.elapsed = seconds_since(t0);
  return res;
}

double rank_pair_coverage(std::size_t n, double tau, std::size_t l, std::size_t u) {
  const BinomTables t = binom_tables(n, tau);
  l = std::min(l, n + 1);
  u = std::min(u, n + 1);
  if (u <= l) return 0.0;
  return 1.0 - t.below[l] - t.at_or_above[u];
}

std::pair<std::size_t, std::size_t> exact_rank_pair(std::size_t n, double tau, double alpha) {
  const BinomTables t = binom_tables(n, tau);
  const double half = 0.5 * alpha;
  std::size_t l = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (t.below[k] <= half) l = k; else break;
  std::size_t u = n + 1;
  for (std::size_t k = n; k >= 1; --k)
    if (t.at_or_above[k] <= half) u = k; else break;
  return {l, u};
}

std::pair<std::size_t, std::size_t> min_length_rank_pair(std::span<const double> x, double tau, double alpha) {
  const std::size_t n = x.size();
  const BinomTables t = binom_tables(n, tau);
  const double centre = static_cast<double>(n) * tau + 1.0;
  auto length = [&](std::size_t l, std::size_t u) {
    if (l == 0 || u == n + 1) return kInf;
    return x[u - 1] - x[l - 1];
  };
  auto feasible = [&](std::size_t l, std::size_t u) { return t.below[l] + t.at_or_above[u] <= alpha + 1e-12; };

  std::size_t best_l = 0, best_u = n + 1;
  double best_len = kInf;
  double best_c = std::fabs(0.5 * static_cast<double>(best_l + best_u) - centre);
  std::size_t u = 1;
  for (std::size_t l = 0; l <= n; ++l) {
    if (u <= l) u = l + 1;
    while (u <= n + 1 && !feasible(l, u)) ++u;
    if (u > n + 1) break;  // coverage only shrinks as l grows
    const double len = length(l, u);
    const double c = std::fabs(0.5 * static_cast<double>(l + u) - centre);
    if (len < best_len || (len == best_len && (c < best_c || (c == best_c && l < best_l)))) {
      best_l = l;
      best_u = u;
      best_len = len;
      best_c = c;
    }
  }
  return {best_l, best_u};
}

namespace {

IntervalResult rank_interval(std::span<const double> x, std::size_t l, std::size_t u, const QuantileSpec& spec,
                             const char* tag) {
  const std::size_t n = x.size();
  IntervalResult res;
  res.method = tag;
  res.level = 1.0 - spec.alpha;
  res.lower = l == 0 ? -kInf : x[l - 1];
  res.upper = u == n + 1 ? kInf : x[u - 1];
  return res;
}

}  // namespace

IntervalResult exact_binomial_ci(const Sample& sample, const QuantileSpec& spec) {
  const auto t0 = Clock::now();
  check_spec(spec);
  const auto [l, u] = exact_rank_pair(sample.n(), spec.tau, spec.alpha);
  IntervalResult res = rank_interval(sample.sorted(), l, u, spec, "snqesa_disc");
  res.elapsed = seconds_since(t0);
  return res;
}

IntervalResult min_length_ci(const Sample& sample, const QuantileSpec& spec) {
  const auto t0 = Clock::now();
  check_spec(spec);
  const auto [l, u] = min_length_rank_pair(sample.sorted(), spec.tau, spec.alpha);
  IntervalResult res = rank_interval(sample.sorted(), l, u, spec, "snqesa_min");
  res.elapsed = seconds_since(t0);
  return res;
}

}  // namespace snq
