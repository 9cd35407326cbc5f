#include "snqesa/special.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <limits>

namespace snq::special {

double norm_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

double log_binom_pmf(double k, int n, double tau) {
  const double nd = static_cast<double>(n);
  if (k < 0.0 || k > nd) return -std::numeric_limits<double>::infinity();
  // Summation order is symmetric in k <-> n-k so that τ = ½ gives bitwise
  // mirrored values.
  const double comb = std::lgamma(nd + 1.0) - (std::lgamma(k + 1.0) + std::lgamma(nd - k + 1.0));
  double tail = 0.0;
  if (k > 0.0) tail += k * std::log(tau);
  if (nd - k > 0.0) tail += (nd - k) * std::log1p(-tau);
  return comb + tail;
}

double binom_pmf(double k, int n, double tau) { return std::exp(log_binom_pmf(k, n, tau)); }

double binom_strict_lower(double k, int n, double tau) {
  const double nd = static_cast<double>(n);
  if (k < 1.0) return 0.0;
  if (k > nd) return 1.0;
  // P(K <= k-1) = I_{1-τ}(n-k+1, k)
  return boost::math::ibeta(nd - k + 1.0, k, 1.0 - tau);
}

double binom_strict_upper(double k, int n, double tau) {
  const double nd = static_cast<double>(n);
  if (k > nd - 1.0) return 0.0;
  if (k < 0.0) return 1.0;
  // P(K >= k+1) = I_τ(k+1, n-k)
  return boost::math::ibeta(k + 1.0, nd - k, tau);
}

double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double chi2_sf(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double student_t_cdf(double x, double df) {
  return boost::math::cdf(boost::math::students_t_distribution<double>{df}, x);
}

double student_t_quantile(double p, double df) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::students_t_distribution<double>{df}, p);
}

double beta_quantile(double p, double a, double b) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return boost::math::quantile(boost::math::beta_distribution<double>{a, b}, p);
}

double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::cdf(boost::math::beta_distribution<double>{a, b}, x);
}

}  // namespace snq::special
