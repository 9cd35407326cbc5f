#pragma once
#include <cstddef>
#include <string>
#include <utility>

#include "snqesa/common.hpp"
#include "snqesa/sample.hpp"
#include "snqesa/tail_engine.hpp"

namespace snq {

struct IntervalResult {
  double lower = 0.0;
  double upper = 0.0;
  std::string method;
  double level = 0.95;
  double tail_residual_lo = 0.0;
  double tail_residual_hi = 0.0;
  double elapsed = 0.0;
  bool open_lo = false;  // no sign change: endpoint pinned at the extreme order statistic
  bool open_hi = false;
  bool failed = false;
  std::string diagnostic;

  double length() const { return upper - lower; }
};

/// Count levels κ_L, κ_U solving p_up(κ_L) = α/2 and p_down(κ_U) = α/2 on the
/// continuous count scale. These depend on (n, spec) only.
struct CountRoots {
  double k_lo = 0.0;
  double k_hi = 0.0;
  double resid_lo = 0.0;
  double resid_hi = 0.0;
  bool has_lo = true;
  bool has_hi = true;
};

CountRoots snqesa_count_roots(std::size_t n, const QuantileSpec& spec, const TailConfig& cfg);

IntervalResult snqesa_ci(const Sample& sample, const QuantileSpec& spec);
IntervalResult snqesa_ci(const Sample& sample, const QuantileSpec& spec, const TailConfig& cfg);
/// Same, reusing count roots computed once for this (n, spec); rolling
/// windows of a fixed size share them.
IntervalResult snqesa_ci(const Sample& sample, const QuantileSpec& spec, const TailConfig& cfg,
                         const CountRoots& roots);

/// Tail probabilities at threshold t with the count linearly interpolated
/// between adjacent distinct order statistics.
TailResult interpolated_tail(const Sample& sample, double t, const QuantileSpec& spec, const TailConfig& cfg);
double interpolated_count(const Sample& sample, double t);

/// Equal-tailed exact rank pair (l, u); l = 0 means −∞, u = n+1 means +∞.
std::pair<std::size_t, std::size_t> exact_rank_pair(std::size_t n, double tau, double alpha);
/// Minimum-length rank pair for the given sorted sample.
std::pair<std::size_t, std::size_t> min_length_rank_pair(std::span<const double> sorted, double tau, double alpha);

/// Exact binomial coverage P(l <= K < u).
double rank_pair_coverage(std::size_t n, double tau, std::size_t l, std::size_t u);

IntervalResult exact_binomial_ci(const Sample& sample, const QuantileSpec& spec);
IntervalResult min_length_ci(const Sample& sample, const QuantileSpec& spec);

}  // namespace snq
