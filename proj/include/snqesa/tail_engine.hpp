#pragma once
#include <cstddef>

#include "snqesa/common.hpp"
#include "snqesa/saddle_solver.hpp"
#include "snqesa/score_kernel.hpp"

namespace snq {

enum class TailBranch { rstar, lr, binom_fallback, exact };

const char* branch_name(TailBranch b);

struct TailConfig {
  LatticeMode lattice = LatticeMode::midp;
  double c0 = 2.0;
  double r_floor = 1e-4;
  SolverConfig solver;

  static TailConfig from_spec(const QuantileSpec& spec);
};

struct TailResult {
  double p_dir = 0.0;
  double p_up = 0.0;    // P(T >= x_obs)-side tail (small K)
  double p_down = 0.0;  // P(T <= x_obs)-side tail (large K)
  double p_two_sided = 0.0;
  bool up = true;  // directed side: x_obs >= 0
  double x_obs = 0.0;
  double u_x = 0.0;
  double u_eval = 0.0;  // lattice-shifted evaluation point
  double r = 0.0;
  double q_pm = 0.0;
  double w = 0.0;
  double r_star = 0.0;
  bool has_r_star = false;
  double atom = 0.0;  // P(K = count)
  TailBranch branch = TailBranch::exact;
  LatticeMode lattice_mode = LatticeMode::midp;
  SolverStatus solver_status = SolverStatus::converged;
  int solver_iterations = 0;
};

/// w = |η̂|·|∇g(μ̂)·v|·√(n p̂(1−p̂)); requires a converged solution.
double curvature_w(const ConstrainedSolution& sol, double x_obs, double tau, std::size_t n);

/// Directed tail from the one-parameter binomial scalars at u (w := q±,
/// lattice-adjusted under midp). `lower` selects the K-lower tail.
/// Returns the strict (midp) or closed (cf/none) tail without the atom term.
double binomial_path(double u, double tau, std::size_t n, bool lower, LatticeMode lattice, double c0,
                     TailBranch* branch = nullptr);

/// Exact tails at a (possibly fractional) count, through the incomplete beta.
double exact_tail(double count, double tau, std::size_t n, bool lower, LatticeMode lattice);

TailResult directed_tail(const ScoreStats& stats, double tau, std::size_t n, const TailConfig& config = {});
TailResult two_sided(const ScoreStats& stats, double tau, std::size_t n, const TailConfig& config = {});

}  // namespace snq
