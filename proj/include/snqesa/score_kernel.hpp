#pragma once
#include <cstddef>
#include <vector>

#include "snqesa/common.hpp"
#include "snqesa/sample.hpp"

namespace snq {

struct ScoreStats {
  double S = 0.0;
  double Q = 0.0;
  double T = 0.0;
  double t = 0.0;
  double ridge_applied = 0.0;
  double K = 0.0;  // count #{X_i <= t}; fractional when interpolated
  std::size_t n = 0;
};

double ridge_for(std::size_t n, double c);

/// Stats for a given count K (K may be fractional, see ci_engine).
ScoreStats score_from_count(double K, std::size_t n, double tau, double ridge_c, double t = 0.0);

ScoreStats score_stats(const Sample& sample, double t, const QuantileSpec& spec);

/// Stats at t below the minimum, at the midpoint of each adjacent pair of
/// distinct order statistics, and above the maximum.
std::vector<ScoreStats> score_path(const Sample& sample, const QuantileSpec& spec);

}  // namespace snq
