#include "snqesa/score_kernel.hpp"

#include <cmath>

namespace snq {

double ridge_for(std::size_t n, double c) { return c / std::sqrt(static_cast<double>(n)); }

ScoreStats score_from_count(double K, std::size_t n, double tau, double ridge_c, double t) {
  const double nd = static_cast<double>(n);
  const double a = 1.0 - tau;
  ScoreStats s;
  s.n = n;
  s.t = t;
  s.K = K;
  s.ridge_applied = ridge_for(n, ridge_c);
  s.S = nd * tau - K;
  s.Q = K * a * a + (nd - K) * tau * tau + s.ridge_applied;
  s.T = s.S / std::sqrt(s.Q);
  return s;
}

ScoreStats score_stats(const Sample& sample, double t, const QuantileSpec& spec) {
  if (!std::isfinite(t)) throw InputError("threshold t must be finite");
  spec.validate();
  return score_from_count(static_cast<double>(sample.count_le(t)), sample.n(), spec.tau, spec.ridge_c, t);
}

std::vector<ScoreStats> score_path(const Sample& sample, const QuantileSpec& spec) {
  spec.validate();
  const auto x = sample.sorted();
  const std::size_t n = x.size();
  std::vector<ScoreStats> path;
  path.reserve(n + 1);

  std::size_t K = 0;
  path.push_back(score_from_count(0.0, n, spec.tau, spec.ridge_c, x[0] - 1.0));
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && x[j] == x[i]) ++j;  // collapse ties
    K += j - i;
    const double t = (j < n) ? x[i] + 0.5 * (x[j] - x[i]) : x[n - 1] + 1.0;
    path.push_back(score_from_count(static_cast<double>(K), n, spec.tau, spec.ridge_c, t));
    i = j;
  }
  return path;
}

}  // namespace snq
