#pragma once
#include <cstddef>
#include <vector>

#include "snqesa/tilt_cgf.hpp"

namespace snq {

enum class SolverStatus { converged, degenerate_fallback, max_iter };

const char* status_name(SolverStatus s);

struct SolverConfig {
  int max_iter = 100;
  double merit_tol = 1e-20;
  double backtrack_factor = 0.5;
  int max_backtracks = 10;
  double eta_trust_bound = 1e8;
  double degeneracy_delta = 1e-10;
  double residual_tol = 1e-10;
  bool orthogonal_correction = true;  // false: z ≡ 0 variant
  bool record_history = false;
};

struct ConstrainedSolution {
  Tilt tilt;
  double eta = 0.0;
  Vec2 mu_hat{};  // sum scale, n·μ(λ̂)
  double p_hat = 0.0;
  double gamma = 0.0;  // ∇g(μ̂)·v
  Vec2 grad_g{};
  double r0 = 0.0;  // residual g(nμ)
  Vec2 r1{};        // residual λ − η∇g
  int iterations = 0;
  int safeguard_steps = 0;  // bracket steps taken instead of a Newton step
  std::vector<double> merit_history;  // only with SolverConfig::record_history
  double merit_final = 0.0;
  SolverStatus status = SolverStatus::max_iter;
};

ConstrainedSolution solve_constrained(double x_obs, double tau, std::size_t n, const SolverConfig& config = {});

}  // namespace snq
