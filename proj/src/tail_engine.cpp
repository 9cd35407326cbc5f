#include "snqesa/tail_engine.hpp"

#include <algorithm>
#include <cmath>

#include "snqesa/binom_tilt.hpp"
#include "snqesa/special.hpp"

namespace snq {

const char* branch_name(TailBranch b) {
  switch (b) {
    case TailBranch::rstar: return "rstar";
    case TailBranch::lr: return "lr";
    case TailBranch::binom_fallback: return "binom_fallback";
    case TailBranch::exact: return "exact";
  }
  return "?";
}

TailConfig TailConfig::from_spec(const QuantileSpec& spec) {
  TailConfig c;
  c.lattice = spec.lattice;
  c.c0 = spec.c0;
  c.r_floor = spec.r_floor;
  return c;
}

namespace {

// 2·sinh(s/2)/s: curvature of the lattice (discrete) saddlepoint tail.
double lattice_factor(double s) {
  if (std::fabs(s) < 1e-8) return 1.0;
  return 2.0 * std::sinh(0.5 * s) / s;
}

struct Spa {
  double p = 0.0;
  double r_star = 0.0;
  TailBranch branch = TailBranch::lr;
};

// r and w carry the same sign (that of u − τ).
Spa spa_tail(double r, double w, bool lower, double c0) {
  using special::norm_cdf;
  using special::norm_pdf;
  using special::norm_sf;
  Spa out;
  const double ratio = w / r;
  if (ratio > 0.0 && std::fabs(std::log(ratio)) <= c0) {
    out.r_star = r + std::log(ratio) / r;
    out.p = lower ? norm_cdf(out.r_star) : norm_sf(out.r_star);
    out.branch = TailBranch::rstar;
  } else {
    const double corr = norm_pdf(r) * (1.0 / r - 1.0 / w);
    out.p = lower ? norm_cdf(r) + corr : norm_sf(r) - corr;
    out.branch = TailBranch::lr;
  }
  out.p = std::clamp(out.p, 0.0, 1.0);
  return out;
}

double eval_shift(LatticeMode mode, bool lower, double nd) {
  switch (mode) {
    case LatticeMode::midp: return lower ? -0.5 / nd : 0.5 / nd;
    case LatticeMode::cornish_fisher: return lower ? 0.5 / nd : -0.5 / nd;
    case LatticeMode::none: return 0.0;
  }
  return 0.0;
}

}  // namespace

double curvature_w(const ConstrainedSolution& sol, double, double, std::size_t n) {
  if (sol.status != SolverStatus::converged) throw NumericalError("curvature_w needs a converged solution");
  return std::fabs(sol.eta) * std::fabs(sol.gamma) *
         std::sqrt(static_cast<double>(n) * sol.p_hat * (1.0 - sol.p_hat));
}

double binomial_path(double u, double tau, std::size_t n, bool lower, LatticeMode lattice, double c0,
                     TailBranch* branch) {
  const BinomScalars b = binom_scalars(u, tau, n);
  double w = b.q_pm;
  if (lattice == LatticeMode::midp) w *= lattice_factor(logit_diff(u, tau));
  const Spa s = spa_tail(b.r, w, lower, c0);
  if (branch) *branch = TailBranch::binom_fallback;
  return s.p;
}

double exact_tail(double count, double tau, std::size_t n, bool lower, LatticeMode lattice) {
  const int ni = static_cast<int>(n);
  const double sl = special::binom_strict_lower(count, ni, tau);
  const double su = special::binom_strict_upper(count, ni, tau);
  const double at = special::binom_pmf(count, ni, tau);
  if (lattice == LatticeMode::midp) {
    const double a = sl + 0.5 * at;
    const double b = su + 0.5 * at;
    return (lower ? a : b) / (a + b);
  }
  return (lower ? sl + at : su + at) / (sl + su + at);
}

TailResult directed_tail(const ScoreStats& stats, double tau, std::size_t n, const TailConfig& cfg) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0,1)");
  if (n < 2) throw InputError("n must be >= 2");
  const double nd = static_cast<double>(n);

  TailResult res;
  res.lattice_mode = cfg.lattice;
  res.x_obs = stats.T;
  res.up = stats.T >= 0.0;
  const bool lower = res.up;  // T >= x_obs  <=>  K <= count
  const double count = std::clamp(nd * tau - stats.S, 0.0, nd);
  res.atom = special::binom_pmf(count, static_cast<int>(n), tau);

  const HInverse inv = invert_h_checked(stats.T, tau, n);
  res.u_x = inv.u;
  res.u_eval = inv.u + eval_shift(cfg.lattice, lower, nd);

  bool exact = inv.at_guard || !(res.u_eval > 0.0 && res.u_eval < 1.0);
  // near the null point the signed root vanishes before the lattice shift is applied
  if (!exact) exact = std::sqrt(2.0 * nd * kl_bernoulli(res.u_x, tau)) < cfg.r_floor;
  BinomScalars bs;
  if (!exact) {
    bs = binom_scalars(res.u_eval, tau, n);
    res.r = bs.r;
    res.q_pm = bs.q_pm;
    exact = std::fabs(bs.r) < cfg.r_floor;
  }

  double core = 0.0;  // strict tail (midp) or closed tail (cf/none)
  if (exact) {
    res.branch = TailBranch::exact;
    const double p_lo = exact_tail(count, tau, n, true, cfg.lattice);
    const double p_hi = exact_tail(count, tau, n, false, cfg.lattice);
    res.p_up = p_lo;
    res.p_down = p_hi;
    res.p_dir = lower ? p_lo : p_hi;
    res.p_two_sided = std::min(1.0, 2.0 * std::min(res.p_up, res.p_down));
    return res;
  }

  const double x_eval = h_eval(res.u_eval, tau, n);
  const ConstrainedSolution sol = solve_constrained(x_eval, tau, n, cfg.solver);
  res.solver_status = sol.status;
  res.solver_iterations = sol.iterations;
  if (sol.status == SolverStatus::converged) {
    double w = curvature_w(sol, x_eval, tau, n);
    if (cfg.lattice == LatticeMode::midp) {
      const Vec2 v = score_direction(tau);
      w *= lattice_factor(sol.tilt.lambda1 * v[0] + sol.tilt.lambda2 * v[1]);
    }
    w = std::copysign(w, bs.r);
    res.w = w;
    const Spa s = spa_tail(bs.r, w, lower, cfg.c0);
    core = s.p;
    res.branch = s.branch;
    if (s.branch == TailBranch::rstar) {
      res.r_star = s.r_star;
      res.has_r_star = true;
    }
  } else {
    core = binomial_path(res.u_eval, tau, n, lower, cfg.lattice, cfg.c0, &res.branch);
    res.w = bs.q_pm;
    if (cfg.lattice == LatticeMode::midp) res.w *= lattice_factor(logit_diff(res.u_eval, tau));
  }

  double p_dir;
  double other;
  if (cfg.lattice == LatticeMode::midp) {
    p_dir = core + 0.5 * res.atom;
    other = 1.0 - p_dir;
  } else {
    p_dir = core;
    other = 1.0 - p_dir + res.atom;
  }
  p_dir = std::clamp(p_dir, 0.0, 1.0);
  other = std::clamp(other, 0.0, 1.0);
  res.p_dir = p_dir;
  res.p_up = lower ? p_dir : other;
  res.p_down = lower ? other : p_dir;
  res.p_two_sided = std::min(1.0, 2.0 * std::min(res.p_up, res.p_down));
  return res;
}

TailResult two_sided(const ScoreStats& stats, double tau, std::size_t n, const TailConfig& config) {
  return directed_tail(stats, tau, n, config);
}

}  // namespace snq
