#include "snqesa/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "snqesa/kernels.hpp"
#include "snqesa/rng.hpp"
#include "snqesa/special.hpp"

namespace snq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

IntervalResult make_result(const char* tag, const QuantileSpec& spec) {
  IntervalResult r;
  r.method = tag;
  r.level = 1.0 - spec.alpha;
  return r;
}

// 1-based interpolation position h into an ascending array, clamped at the ends.
double interp_position(std::span<const double> x, double h) {
  const std::size_t n = x.size();
  if (h <= 1.0) return x[0];
  if (h >= static_cast<double>(n)) return x[n - 1];
  const auto j = static_cast<std::size_t>(std::floor(h));
  const double g = h - static_cast<double>(j);
  if (g == 0.0) return x[j - 1];
  return x[j - 1] + g * (x[j] - x[j - 1]);
}

double type8_position(std::size_t n, double tau) {
  return (static_cast<double>(n) + 1.0 / 3.0) * tau + 1.0 / 3.0;
}

// Order statistic (1-based rank k) of a resample described by multiplicities
// over the ascending array x.
double order_stat_from_counts(std::span<const double> x, std::span<const std::uint32_t> counts, std::size_t k) {
  std::size_t acc = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += counts[i];
    if (acc >= k) return x[i];
  }
  return x.back();
}

// Type-8 quantile of a resample given by multiplicities (total m).
double type8_from_counts(std::span<const double> x, std::span<const std::uint32_t> counts, std::size_t m,
                         double tau) {
  const double h = type8_position(m, tau);
  if (h <= 1.0) return order_stat_from_counts(x, counts, 1);
  if (h >= static_cast<double>(m)) return order_stat_from_counts(x, counts, m);
  const auto j = static_cast<std::size_t>(std::floor(h));
  const double g = h - static_cast<double>(j);
  // one pass for both neighbours
  std::size_t acc = 0;
  double lo = x.back(), hi = x.back();
  bool have_lo = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += counts[i];
    if (!have_lo && acc >= j) {
      lo = x[i];
      have_lo = true;
    }
    if (acc >= j + 1) {
      hi = x[i];
      break;
    }
  }
  if (g == 0.0) return lo;
  return lo + g * (hi - lo);
}

void draw_with_replacement(rng::Stream& s, std::size_t n, std::size_t m, std::vector<std::uint32_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0u);
  for (std::size_t i = 0; i < m; ++i) ++counts[s.index(n)];
}

void draw_without_replacement(rng::Stream& s, std::size_t n, std::size_t b, std::vector<std::size_t>& perm,
                              std::vector<std::uint32_t>& counts) {
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::fill(counts.begin(), counts.end(), 0u);
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = i + s.index(n - i);
    std::swap(perm[i], perm[j]);
    ++counts[perm[i]];
  }
}

std::uint64_t stream_seed(const ResamplePlan& plan, const char* tag) {
  return rng::splitmix64(plan.seed ^ rng::method_tag(tag));
}

bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
}

// Percentile interval of replicates (sorted in place).
void percentile_interval(std::vector<double>& reps, double alpha, IntervalResult& out) {
  std::sort(reps.begin(), reps.end());
  out.lower = quantile_type8(reps, 0.5 * alpha);
  out.upper = quantile_type8(reps, 1.0 - 0.5 * alpha);
}

double z_crit(double alpha) { return special::norm_quantile(1.0 - 0.5 * alpha); }

}  // namespace

void ResamplePlan::validate() const {
  if (B < 1) throw InputError("B must be >= 1");
  if (!(size_exponent > 0.0 && size_exponent <= 1.0)) throw InputError("size exponent must lie in (0,1]");
}

std::size_t resample_size(std::size_t n, double exponent) {
  if (n < 2) throw InputError("resample size needs n >= 2");
  const double m = std::round(std::pow(static_cast<double>(n), exponent));
  return std::clamp(static_cast<std::size_t>(m), std::size_t{2}, n);
}

double quantile_type8(std::span<const double> sorted, double tau) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  return interp_position(sorted, type8_position(sorted.size(), tau));
}

double quantile_type8(const Sample& sample, double tau) { return quantile_type8(sample.sorted(), tau); }

double quantile_type7(std::span<const double> sorted, double tau) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  return interp_position(sorted, 1.0 + (static_cast<double>(sorted.size()) - 1.0) * tau);
}

double sample_sd(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  // shifted by x[0] so a constant input gives exactly zero
  const double x0 = x[0];
  double mean = 0.0;
  for (double v : x) mean += v - x0;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - x0 - mean) * (v - x0 - mean);
  return std::sqrt(ss / (n - 1.0));
}

double silverman_bw(std::span<const double> sorted) {
  const double sd = sample_sd(sorted);
  const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
  double lo = std::min(sd, iqr / 1.34);
  // same fallbacks as R's bw.nrd0
  if (!(lo > 0.0)) lo = sd;
  if (!(lo > 0.0)) lo = std::fabs(sorted[0]);
  if (!(lo > 0.0)) lo = 1.0;
  return 0.9 * lo * std::pow(static_cast<double>(sorted.size()), -0.2);
}

double kde_at(std::span<const double> x, double at, double bw) {
  const double s = kernels::gaussian_kernel_sum(x, at, 1.0 / bw);
  return s * special::kInvSqrt2Pi / (static_cast<double>(x.size()) * bw);
}

std::vector<double> hd_weights(std::size_t n, double tau) {
  const double a = (static_cast<double>(n) + 1.0) * tau;
  const double b = (static_cast<double>(n) + 1.0) * (1.0 - tau);
  std::vector<double> w(n);
  double prev = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double cur = k == n ? 1.0 : special::inc_beta(a, b, static_cast<double>(k) / static_cast<double>(n));
    w[k - 1] = cur - prev;
    prev = cur;
  }
  return w;
}

double hd_estimate(std::span<const double> sorted, double tau) {
  const auto w = hd_weights(sorted.size(), tau);
  return kernels::dot(w, sorted);
}

IntervalResult pct_bootstrap_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan) {
  const auto t0 = Clock::now();
  spec.validate();
  plan.validate();
  IntervalResult out = make_result("pctboot", spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  rng::Stream s(stream_seed(plan, "pctboot"));
  std::vector<std::uint32_t> counts(n);
  std::vector<double> reps(static_cast<std::size_t>(plan.B));
  for (auto& r : reps) {
    draw_with_replacement(s, n, n, counts);
    r = type8_from_counts(x, counts, n, spec.tau);
  }
  if (all_equal(reps)) out.diagnostic = "degenerate_replicates";
  percentile_interval(reps, spec.alpha, out);
  out.elapsed = seconds_since(t0);
  return out;
}

IntervalResult bca_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan) {
  const auto t0 = Clock::now();
  spec.validate();
  plan.validate();
  IntervalResult out = make_result("bca", spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  if (n < 3) throw InputError("BCa needs n >= 3");
  const double theta = quantile_type8(x, spec.tau);

  rng::Stream s(stream_seed(plan, "bca"));
  std::vector<std::uint32_t> counts(n);
  std::vector<double> reps(static_cast<std::size_t>(plan.B));
  for (auto& r : reps) {
    draw_with_replacement(s, n, n, counts);
    r = type8_from_counts(x, counts, n, spec.tau);
  }
  if (all_equal(reps)) {
    out.lower = out.upper = theta;
    out.diagnostic = "degenerate_replicates";
    out.elapsed = seconds_since(t0);
    return out;
  }

  const double B = static_cast<double>(plan.B);
  const double le = static_cast<double>(kernels::count_less_equal(reps, theta));
  const double lt = static_cast<double>(kernels::count_less_equal(reps, std::nextafter(theta, -INFINITY)));
  double prop = (lt + 0.5 * (le - lt)) / B;
  const double pmin = 1.0 / (2.0 * B);
  if (prop < pmin || prop > 1.0 - pmin) {
    prop = std::clamp(prop, pmin, 1.0 - pmin);
    out.diagnostic = "z0_clamped";
  }
  const double z0 = special::norm_quantile(prop);

  // leave-one-out type-8 values straight from the sorted array
  const double h = type8_position(n - 1, spec.tau);
  auto loo_stat = [&](std::size_t i, std::size_t k) { return k < i ? x[k - 1] : x[k]; };  // k-th of x without x_(i)
  std::vector<double> jack(n);
  for (std::size_t i = 1; i <= n; ++i) {
    double v;
    if (h <= 1.0) v = loo_stat(i, 1);
    else if (h >= static_cast<double>(n - 1)) v = loo_stat(i, n - 1);
    else {
      const auto j = static_cast<std::size_t>(std::floor(h));
      const double g = h - static_cast<double>(j);
      const double a = loo_stat(i, j);
      v = g == 0.0 ? a : a + g * (loo_stat(i, j + 1) - a);
    }
    jack[i - 1] = v;
  }
  const double jbar = kernels::sum(jack) / static_cast<double>(n);
  double s2 = 0.0, s3 = 0.0;
  for (double v : jack) {
    const double d = jbar - v;
    s2 += d * d;
    s3 += d * d * d;
  }
  const double acc = s2 > 0.0 ? s3 / (6.0 * std::pow(s2, 1.5)) : 0.0;

  auto adjusted = [&](double p) {
    const double z = special::norm_quantile(p);
    const double num = z0 + z;
    return special::norm_cdf(z0 + num / (1.0 - acc * num));
  };
  std::sort(reps.begin(), reps.end());
  out.lower = quantile_type8(reps, adjusted(0.5 * spec.alpha));
  out.upper = quantile_type8(reps, adjusted(1.0 - 0.5 * spec.alpha));
  out.elapsed = seconds_since(t0);
  return out;
}

IntervalResult smoothed_bootstrap_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan) {
  const auto t0 = Clock::now();
  spec.validate();
  plan.validate();
  IntervalResult out = make_result("smboot", spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  const double sd = sample_sd(x);
  const double iqr = quantile_type7(x, 0.75) - quantile_type7(x, 0.25);
  const double bw = 0.9 * std::min(sd, iqr / 1.34) * std::pow(static_cast<double>(n), -0.2);

  rng::Stream s(stream_seed(plan, "smboot"));
  std::vector<double> buf(n);
  std::vector<double> reps(static_cast<std::size_t>(plan.B));
  for (auto& r : reps) {
    for (auto& b : buf) b = x[s.index(n)];
    if (bw > 0.0)
      for (auto& b : buf) b += bw * s.normal();
    std::sort(buf.begin(), buf.end());
    r = quantile_type8(buf, spec.tau);
  }
  if (all_equal(reps)) out.diagnostic = "degenerate_replicates";
  percentile_interval(reps, spec.alpha, out);
  out.elapsed = seconds_since(t0);
  return out;
}

namespace {

IntervalResult pivot_interval(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan,
                              bool replace, const char* tag) {
  const auto t0 = Clock::now();
  spec.validate();
  plan.validate();
  IntervalResult out = make_result(tag, spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  const std::size_t m = resample_size(n, plan.size_exponent);
  const double theta = quantile_type8(x, spec.tau);

  rng::Stream s(stream_seed(plan, tag));
  std::vector<std::uint32_t> counts(n);
  std::vector<std::size_t> perm(n);
  std::vector<double> reps(static_cast<std::size_t>(plan.B));
  for (auto& r : reps) {
    if (replace) draw_with_replacement(s, n, m, counts);
    else draw_without_replacement(s, n, m, perm, counts);
    r = 2.0 * theta - type8_from_counts(x, counts, m, spec.tau);
  }
  if (all_equal(reps)) out.diagnostic = "degenerate_replicates";
  percentile_interval(reps, spec.alpha, out);
  out.elapsed = seconds_since(t0);
  return out;
}

}  // namespace

IntervalResult subsample_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan) {
  return pivot_interval(sample, spec, plan, false, "subsample");
}

IntervalResult m_out_of_n_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan) {
  return pivot_interval(sample, spec, plan, true, "moutofn");
}

IntervalResult wald_kde_ci(const Sample& sample, const QuantileSpec& spec) {
  const auto t0 = Clock::now();
  spec.validate();
  IntervalResult out = make_result("waldkde", spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  if (n < 5) throw InputError("Wald-KDE needs n >= 5");
  const double theta = quantile_type8(x, spec.tau);
  const double range = x[n - 1] - x[0];
  if (!(range > 0.0)) {
    out.lower = out.upper = theta;
    out.diagnostic = "zero_range";
    out.elapsed = seconds_since(t0);
    return out;
  }
  double f = kde_at(x, theta, silverman_bw(x));
  const double fmin = 1e-4 / range;
  if (f < fmin) {
    f = fmin;
    out.diagnostic = "density_floor";
  }
  const double se = std::sqrt(spec.tau * (1.0 - spec.tau) / static_cast<double>(n)) / f;
  const double z = z_crit(spec.alpha);
  out.lower = theta - z * se;
  out.upper = theta + z * se;
  out.elapsed = seconds_since(t0);
  return out;
}

IntervalResult harrell_davis_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan) {
  const auto t0 = Clock::now();
  spec.validate();
  plan.validate();
  IntervalResult out = make_result("hd", spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  if (n < 3) throw InputError("Harrell-Davis needs n >= 3");
  const auto w = hd_weights(n, spec.tau);

  rng::Stream s(stream_seed(plan, "hd"));
  std::vector<std::uint32_t> counts(n);
  std::vector<double> buf(n);
  std::vector<double> reps(static_cast<std::size_t>(plan.B));
  for (auto& r : reps) {
    draw_with_replacement(s, n, n, counts);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::uint32_t c = 0; c < counts[i]; ++c) buf[k++] = x[i];
    r = kernels::dot(w, buf);
  }
  if (all_equal(reps)) out.diagnostic = "degenerate_replicates";
  percentile_interval(reps, spec.alpha, out);
  out.elapsed = seconds_since(t0);
  return out;
}

IntervalResult maritz_jarrett_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan&) {
  const auto t0 = Clock::now();
  spec.validate();
  IntervalResult out = make_result("mj", spec);
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  if (n < 3) throw InputError("Maritz-Jarrett needs n >= 3");
  const auto w = hd_weights(n, spec.tau);
  const double theta = kernels::dot(w, x);
  // Σw(x−θ)² equals Σw x² − θ² because Σw = 1; this form avoids cancellation
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += w[i] * (x[i] - theta) * (x[i] - theta);
  const double sigma = std::sqrt(std::max(var, 0.0));
  const double z = z_crit(spec.alpha);
  out.lower = theta - z * sigma;
  out.upper = theta + z * sigma;
  out.elapsed = seconds_since(t0);
  return out;
}

}  // namespace snq
