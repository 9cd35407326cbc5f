#pragma once
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snqesa/baselines.hpp"
#include "snqesa/ci_engine.hpp"
#include "snqesa/common.hpp"
#include "snqesa/rng.hpp"

namespace snq {

struct DGP {
  enum class Family { normal, lognormal, student_t, cauchy, beta, exponential, normal_mixture };

  Family family = Family::normal;
  // normal: (mean, sd); lognormal: (meanlog, sdlog); student_t: (df);
  // cauchy: (location, scale); beta: (a, b); exponential: (rate)
  double p1 = 0.0;
  double p2 = 1.0;
  std::vector<double> weights, means, sds;  // normal_mixture components

  /// Accepts e.g. "normal", "student_t(2)", "beta(2,5)", "exponential(1)",
  /// "normal_mixture(0.5,-1,1,0.5,1,1)" (weight, mean, sd triplets).
  static DGP parse(const std::string& text);
  std::string name() const;
  void validate() const;

  double cdf(double x) const;
  double quantile(double u) const;
  double draw(rng::Stream& s) const;
};

/// True τ-quantile. Closed forms where available; the mixture uses a
/// bracketed TOMS 748 root find, with a Monte Carlo fallback flagged through
/// `used_fallback`.
double true_quantile(const DGP& dgp, double tau, bool* used_fallback = nullptr);

/// (U−L) + (2/α)(L−θ)1{θ<L} + (2/α)(θ−U)1{θ>U}; empty if an endpoint is infinite.
std::optional<double> interval_score(double L, double U, double theta, double alpha);

/// Method names accepted by compute_interval and the CLI.
const std::vector<std::string>& known_methods();
bool is_known_method(const std::string& m);

IntervalResult compute_interval(const std::string& method, const Sample& sample, const QuantileSpec& spec,
                                 const ResamplePlan& plan);

struct StudyConfig {
  DGP dgp;
  QuantileSpec spec{0.95};
  std::size_t n = 100;
  int R = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"snqesa"};
  int B = 1000;
  unsigned threads = 0;  // 0: hardware concurrency
  bool timing = false;   // mean_time_s is NA unless set (keeps CSVs reproducible)

  void validate() const;
};

/// Flat key=value text: dgp, tau, n, alpha, R, seed, methods (comma list),
/// B, ridge_c, lattice, c0, timing. '#' starts a comment.
StudyConfig parse_study_config(const std::string& text);

struct SimRow {
  std::string method;
  double coverage = NAN;
  double se_cov = NAN;
  double mean_len = NAN;
  double med_len = NAN;
  double mean_time = NAN;
  double mean_bias = NAN;
  double med_bias = NAN;
  double rmse_bias = NAN;
  double mean_is = NAN;
  double med_is = NAN;
  double fail_rate = NAN;
};

struct SimReport {
  double true_q = 0.0;
  int R = 0;
  std::vector<SimRow> rows;

  const SimRow* find(const std::string& method) const;
  std::string to_csv() const;
};

SimReport run_study(const StudyConfig& config);
SimReport run_study(const DGP& dgp, double tau, std::size_t n, double alpha, int R,
                    const std::vector<std::string>& methods, std::uint64_t master_seed);

/// "%.17g"; "NA" for NaN, "inf"/"-inf" for infinities.
std::string format_number(double v);

}  // namespace snq
