#include "snqesa/binom_tilt.hpp"

#include <cmath>
#include <limits>

#include "snqesa/common.hpp"

namespace snq {

namespace {

inline double dfun(double u, double tau) { return tau * tau + u * (1.0 - 2.0 * tau); }

void check_open(double u) {
  if (!(u > 0.0 && u < 1.0)) throw InputError("u must lie strictly inside (0,1)");
}

}  // namespace

double h_eval(double u, double tau, std::size_t n) {
  check_open(u);
  return std::sqrt(static_cast<double>(n)) * (tau - u) / std::sqrt(dfun(u, tau));
}

double h_prime(double u, double tau, std::size_t n) {
  check_open(u);
  const double d = dfun(u, tau);
  return -std::sqrt(static_cast<double>(n)) * ((1.0 - 2.0 * tau) * u + tau) / (2.0 * d * std::sqrt(d));
}

double h_second(double u, double tau, std::size_t n) {
  check_open(u);
  const double d = dfun(u, tau);
  const double b = 1.0 - 2.0 * tau;
  return std::sqrt(static_cast<double>(n)) * b * (d + 0.75 * (tau - u) * b) / (d * d * std::sqrt(d));
}

HInverse invert_h_checked(double x, double tau, std::size_t n) {
  if (!std::isfinite(x)) throw InputError("invert_h: x must be finite");
  HInverse out;
  double lo = kInvertGuard;
  double hi = 1.0 - kInvertGuard;
  // h is decreasing: h(lo) is the largest attainable value
  if (x >= h_eval(lo, tau, n)) {
    out.u = lo;
    out.at_guard = true;
    return out;
  }
  if (x <= h_eval(hi, tau, n)) {
    out.u = hi;
    out.at_guard = true;
    return out;
  }
  if (x == 0.0) {
    out.u = tau;
    return out;
  }

  const double tol = 1e-13 * (1.0 + std::fabs(x));
  double u = tau;
  for (int it = 0; it < 200; ++it) {
    out.iterations = it + 1;
    const double f = h_eval(u, tau, n) - x;
    if (std::fabs(f) <= tol) break;
    if (f > 0.0) lo = u; else hi = u;
    double next = u - f / h_prime(u, tau, n);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == u || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      u = next;
      break;
    }
    u = next;
  }
  out.u = u;
  return out;
}

double kl_bernoulli(double u, double tau) {
  const double d = u - tau;
  double k = 0.0;
  if (u > 0.0) k += u * std::log1p(d / tau);
  if (u < 1.0) k += (1.0 - u) * std::log1p(-d / (1.0 - tau));
  return k < 0.0 ? 0.0 : k;
}

double logit_diff(double u, double tau) { return std::log(u * (1.0 - tau) / (tau * (1.0 - u))); }

BinomScalars binom_scalars(double u_x, double tau, std::size_t n) {
  BinomScalars s;
  s.u_x = u_x;
  if (u_x == tau) return s;
  const double nd = static_cast<double>(n);
  s.kl = kl_bernoulli(u_x, tau);
  const double sg = u_x > tau ? 1.0 : -1.0;
  s.r = sg * std::sqrt(2.0 * nd * s.kl);
  s.q_pm = logit_diff(u_x, tau) * std::sqrt(nd * u_x * (1.0 - u_x));
  return s;
}

}  // namespace snq
