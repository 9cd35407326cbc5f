#include "snqesa/tilt_cgf.hpp"

#include <algorithm>
#include <cmath>

#include "snqesa/common.hpp"

namespace snq {

Vec2 score_direction(double tau) { return {-1.0, 1.0 - 2.0 * tau}; }

TiltedMoments cgf_eval(const Tilt& tilt, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0,1)");
  const double a1 = 1.0 - tau;
  const double A = tilt.lambda1 * (tau - 1.0) + tilt.lambda2 * a1 * a1;
  const double B = tilt.lambda1 * tau + tilt.lambda2 * tau * tau;
  const double m = std::max(A, B);
  const double ea = tau * std::exp(A - m);
  const double eb = a1 * std::exp(B - m);
  const double z = ea + eb;

  TiltedMoments out;
  out.K = m + std::log(z);
  out.p_raw = ea / z;
  out.p = std::clamp(out.p_raw, kTiltEps, 1.0 - kTiltEps);
  out.clamped = out.p != out.p_raw;
  out.v = score_direction(tau);
  out.mu = {tau - out.p, tau * tau + out.p * (1.0 - 2.0 * tau)};
  out.kappa = out.p * (1.0 - out.p);
  return out;
}

double RankOneInverse::quadform(const Vec2& g) const {
  const double vv = dot2(v, v);
  const double gv = dot2(g, v);
  return gv * gv / (kappa * vv * vv);
}

RankOneInverse pdet_pinv(const TiltedMoments& m, std::size_t n) {
  if (!(m.kappa > 0.0)) throw NumericalError("rank-1 curvature vanished (p at the clamp)");
  RankOneInverse out;
  out.kappa = m.kappa;
  out.v = m.v;
  out.pdet = static_cast<double>(n) * m.kappa * dot2(m.v, m.v);
  return out;
}

}  // namespace snq
