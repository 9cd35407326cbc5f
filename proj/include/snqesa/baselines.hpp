#pragma once
// Competitor interval constructors: bootstrap family, subsampling, Wald with
// a kernel density plug-in, Harrell-Davis and Maritz-Jarrett.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snqesa/ci_engine.hpp"
#include "snqesa/common.hpp"
#include "snqesa/sample.hpp"

namespace snq {

enum class ResampleBlock { with_replacement_n, with_replacement_m, without_replacement_b };

struct ResamplePlan {
  int B = 1000;
  std::uint64_t seed = 0;
  ResampleBlock block = ResampleBlock::with_replacement_n;
  double size_exponent = 0.7;

  void validate() const;
};

/// round(n^e) clamped to [2, n]; throws InputError if n < 2.
std::size_t resample_size(std::size_t n, double exponent);

/// Hyndman-Fan type 8 on an ascending array (n >= 1).
double quantile_type8(std::span<const double> sorted, double tau);
double quantile_type8(const Sample& sample, double tau);
/// Type 7 (the R default), used for the bandwidth IQR.
double quantile_type7(std::span<const double> sorted, double tau);

/// Sample standard deviation (n−1 denominator).
double sample_sd(std::span<const double> x);
/// Silverman's rule of thumb 0.9·min(sd, IQR/1.34)·n^(−1/5).
double silverman_bw(std::span<const double> sorted);
/// Gaussian kernel density estimate at a point.
double kde_at(std::span<const double> x, double at, double bw);

std::vector<double> hd_weights(std::size_t n, double tau);
double hd_estimate(std::span<const double> sorted, double tau);

IntervalResult pct_bootstrap_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan);
IntervalResult bca_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan);
IntervalResult smoothed_bootstrap_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan);
IntervalResult subsample_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan);
IntervalResult m_out_of_n_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan);
IntervalResult wald_kde_ci(const Sample& sample, const QuantileSpec& spec);
IntervalResult harrell_davis_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan);
IntervalResult maritz_jarrett_ci(const Sample& sample, const QuantileSpec& spec, const ResamplePlan& plan = {});

}  // namespace snq
