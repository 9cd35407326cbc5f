#pragma once
// Special functions shared by the inference modules: normal tails, binomial
// lattice probabilities, incomplete beta/gamma and the inverse CDFs used by
// the simulation DGPs.

#include <cmath>
#include <numbers>

namespace snq::special {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Upper tail Φ(−z) = ½·erfc(z/√2); no cancellation for large z.
inline double norm_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double norm_quantile(double p);

/// log P(Bin(n, τ) = k), with k allowed to be non-integer (lgamma extension).
double log_binom_pmf(double k, int n, double tau);
double binom_pmf(double k, int n, double tau);

/// P(Bin(n,τ) < k) and P(Bin(n,τ) > k); continuous in k through the
/// regularized incomplete beta, exact at integer k.
double binom_strict_lower(double k, int n, double tau);
double binom_strict_upper(double k, int n, double tau);

/// Regularized incomplete beta I_x(a, b).
double inc_beta(double a, double b, double x);

/// Survival function of the χ² distribution with `df` degrees of freedom.
double chi2_sf(double x, double df);

double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);
double beta_quantile(double p, double a, double b);
double beta_cdf(double x, double a, double b);

}  // namespace snq::special
