#include "snqesa/saddle_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snqesa/common.hpp"

namespace snq {

const char* status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::degenerate_fallback: return "degenerate_fallback";
    case SolverStatus::max_iter: return "max_iter";
  }
  return "?";
}

namespace {

constexpr double kMaxTiltStep = 2.0;

struct Eval {
  bool valid = false;
  TiltedMoments m;
  double s = 0.0, q = 0.0, sq = 0.0;
  double r0 = 0.0;
  Vec2 r1{};
  Vec2 grad{};
  double merit = 0.0;
};

Eval evaluate(const Tilt& lam, double eta, double x, double tau, double nd) {
  Eval e;
  e.m = cgf_eval(lam, tau);
  if (e.m.p_raw < kTiltEps || e.m.p_raw > 1.0 - kTiltEps) return e;
  e.valid = true;
  e.s = nd * e.m.mu[0];
  e.q = nd * e.m.mu[1];
  e.sq = std::sqrt(e.q);
  e.r0 = e.s - x * e.sq;
  e.grad = {1.0, -x / (2.0 * e.sq)};
  e.r1 = {lam.lambda1 - eta * e.grad[0], lam.lambda2 - eta * e.grad[1]};
  e.merit = 0.5 * (e.r0 * e.r0 + dot2(e.r1, e.r1));
  return e;
}

bool residuals_small(const Eval& e, const Tilt& lam, double x, double tol) {
  const double s0 = std::max({1.0, std::fabs(e.s), std::fabs(x * e.sq)});
  const double s1 = std::max({1.0, std::fabs(lam.lambda1), std::fabs(lam.lambda2)});
  return std::fabs(e.r0) <= tol * s0 && std::fabs(e.r1[0]) <= tol * s1 && std::fabs(e.r1[1]) <= tol * s1;
}

}  // namespace

ConstrainedSolution solve_constrained(double x_obs, double tau, std::size_t n, const SolverConfig& cfg) {
  if (n < 2) throw InputError("solve_constrained: n must be >= 2");
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("solve_constrained: tau must lie in (0,1)");
  if (!std::isfinite(x_obs)) throw InputError("solve_constrained: x_obs must be finite");
  if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0) || cfg.max_iter < 1)
    throw InputError("solve_constrained: invalid solver configuration");

  const double nd = static_cast<double>(n);
  const Vec2 v = score_direction(tau);
  const double vv = dot2(v, v);

  Tilt lam;
  double eta = 0.0;
  Eval cur = evaluate(lam, eta, x_obs, tau, nd);

  ConstrainedSolution sol;
  auto finish = [&](SolverStatus st, int iters) {
    sol.tilt = lam;
    sol.eta = eta;
    sol.mu_hat = {cur.s, cur.q};
    sol.p_hat = cur.m.p;
    sol.grad_g = cur.grad;
    sol.gamma = dot2(cur.grad, v);
    sol.r0 = cur.r0;
    sol.r1 = cur.r1;
    sol.merit_final = cur.merit;
    sol.iterations = iters;
    sol.status = st;
    return sol;
  };

  // g = √(n·d(p))·(h(p) − x) has the sign of h(p) − x, which decreases
  // along the tilt coordinate ŝ = λ·v; iterates keep a bracket on ŝ*.
  double blo = -std::numeric_limits<double>::infinity();
  double bhi = std::numeric_limits<double>::infinity();
  if (cfg.record_history) sol.merit_history.push_back(cur.merit);

  // Once the relative residual test passes, one more Newton step is taken
  // (quadratic convergence makes it nearly free) before stopping.
  bool polished = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (cur.merit <= cfg.merit_tol) return finish(SolverStatus::converged, it);
    if (residuals_small(cur, lam, x_obs, cfg.residual_tol)) {
      if (polished) return finish(SolverStatus::converged, it);
      polished = true;
    }

    const double gamma = dot2(cur.grad, v);
    if (std::fabs(gamma) <= cfg.degeneracy_delta) return finish(SolverStatus::degenerate_fallback, it);

    const double shat = lam.lambda1 * v[0] + lam.lambda2 * v[1];
    if (cur.r0 > 0.0) blo = std::max(blo, shat);
    if (cur.r0 < 0.0) bhi = std::min(bhi, shat);

    const double kap = nd * cur.m.kappa;
    // H_g has the single entry ∂²g/∂q² = x/(4 q^{3/2})
    const double hqq = x_obs / (4.0 * cur.q * cur.sq);
    const Vec2 hv = {0.0, hqq * v[1]};

    // Newton direction for a given tilt step α along v
    auto direction = [&](double alpha, Vec2& dlam, double& deta) {
      const double c = eta * kap * alpha * vv;
      if (cfg.orthogonal_correction) {
        const Vec2 b = {-cur.r1[0] - alpha * v[0] + c * hv[0], -cur.r1[1] - alpha * v[1] + c * hv[1]};
        deta = -dot2(v, b) / gamma;
        const Vec2 z = {b[0] + cur.grad[0] * deta, b[1] + cur.grad[1] * deta};
        // z ⟂ v up to rounding; project so the tilt coordinate moves by exactly α‖v‖²
        const double zv = dot2(z, v) / vv;
        dlam = {alpha * v[0] + z[0] - zv * v[0], alpha * v[1] + z[1] - zv * v[1]};
      } else {
        deta = (dot2(cur.grad, cur.r1) + alpha * gamma - c * dot2(cur.grad, hv)) / dot2(cur.grad, cur.grad);
        dlam = {alpha * v[0], alpha * v[1]};
      }
    };

    const double alpha = -cur.r0 / (kap * gamma * vv);
    const double target = shat + alpha * vv;
    bool accepted = false;

    if (target > blo && target < bhi && std::fabs(alpha) * vv <= kMaxTiltStep) {
      Vec2 dlam;
      double deta;
      direction(alpha, dlam, deta);
      double beta = 1.0;
      for (int bt = 0; bt <= cfg.max_backtracks; ++bt, beta *= cfg.backtrack_factor) {
        const Tilt trial{lam.lambda1 + beta * dlam[0], lam.lambda2 + beta * dlam[1]};
        const double eta_t = eta + beta * deta;
        if (!(std::fabs(eta_t) <= cfg.eta_trust_bound)) continue;
        Eval e = evaluate(trial, eta_t, x_obs, tau, nd);
        if (!e.valid) continue;
        if (e.merit <= (1.0 - 2e-4 * beta) * cur.merit) {
          lam = trial;
          eta = eta_t;
          cur = e;
          accepted = true;
          break;
        }
      }
    }

    if (!accepted && polished) return finish(SolverStatus::converged, it);
    if (!accepted) {
      // Safeguard: bisect the bracket, or expand toward the root by the trust radius.
      double step;
      if (std::isfinite(blo) && std::isfinite(bhi)) step = 0.5 * (blo + bhi) - shat;
      else step = (cur.r0 > 0.0 ? kMaxTiltStep : -kMaxTiltStep);
      if (target > blo && target < bhi && std::fabs(target - shat) < std::fabs(step)) step = target - shat;
      for (int bt = 0; bt <= cfg.max_backtracks && !accepted; ++bt, step *= 0.5) {
        Vec2 dlam;
        double deta;
        direction(step / vv, dlam, deta);
        const Tilt trial{lam.lambda1 + dlam[0], lam.lambda2 + dlam[1]};
        const double eta_t = eta + deta;
        if (!(std::fabs(eta_t) <= cfg.eta_trust_bound)) continue;
        Eval e = evaluate(trial, eta_t, x_obs, tau, nd);
        if (!e.valid) continue;
        lam = trial;
        eta = eta_t;
        cur = e;
        accepted = true;
        ++sol.safeguard_steps;
      }
    }

    if (!accepted) {
      if (residuals_small(cur, lam, x_obs, cfg.residual_tol)) return finish(SolverStatus::converged, it + 1);
      return finish(SolverStatus::max_iter, it + 1);
    }
    if (cfg.record_history) sol.merit_history.push_back(cur.merit);
  }
  if (cur.merit <= cfg.merit_tol || residuals_small(cur, lam, x_obs, cfg.residual_tol))
    return finish(SolverStatus::converged, cfg.max_iter);
  return finish(SolverStatus::max_iter, cfg.max_iter);
}

}  // namespace snq
