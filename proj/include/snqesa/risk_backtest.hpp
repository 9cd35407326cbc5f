#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "snqesa/common.hpp"

namespace snq {

struct ReturnSeries {
  std::vector<std::string> dates;
  std::vector<double> r;

  void validate() const;
  /// CSV with header `date,return`, or `date,price` when `prices` is set
  /// (converted to log-returns; the first date is dropped).
  static ReturnSeries from_csv(const std::string& text, bool prices = false);
};

enum class VarModel { hs, fhs };
const char* model_name(VarModel m);
VarModel parse_model(const std::string& s);

inline constexpr double kEwmaDecay = 0.94;

struct VaRPath {
  VarModel model = VarModel::hs;
  std::size_t m = 250;
  double tau = 0.99;
  std::vector<std::string> dates;  // date of the forecast target r[t+1]
  std::vector<double> realized;    // r[t+1]
  std::vector<double> var;
  std::vector<double> ci_lo, ci_hi;
  std::vector<int> hits;
  std::size_t degenerate_windows = 0;
};

struct RollingOptions {
  bool with_ci = true;
  double ci_level = 0.95;
  double ridge_c = 0.25;
  LatticeMode lattice = LatticeMode::midp;
  double c0 = 2.0;
  unsigned threads = 1;
};

/// One-step-ahead left-tail VaR: forecast j uses r[j..j+m−1] to predict r[j+m].
VaRPath rolling_var(const ReturnSeries& series, VarModel model, std::size_t m, double tau,
                    const RollingOptions& opt = {});

struct LRTest {
  double lr = 0.0;
  double p = 1.0;
};

LRTest kupiec_pof(const std::vector<int>& hits, double pi);
LRTest christoffersen_ind(const std::vector<int>& hits);
LRTest conditional_coverage(const std::vector<int>& hits, double pi);

enum class Zone { green, yellow, red };
const char* zone_name(Zone z);
Zone zone_for_count(std::size_t exceedances);
/// Zones of the complete non-overlapping windows; a trailing partial window is dropped.
std::vector<Zone> traffic_light(const std::vector<int>& hits, std::size_t window = 250);

struct Stability {
  double var_vol = 0.0;
  double change_vol = 0.0;
  double max_drawdown = 0.0;
  double turning_ratio = 0.0;
  double stability = 0.0;  // +inf when change_vol + 0.1·turning_ratio = 0
};

Stability stability_metrics(const std::vector<double>& var_path);

struct Episode {
  std::string label;
  std::string start;  // inclusive ISO dates
  std::string end;
};

struct EpisodeScore {
  std::string label;
  std::size_t K = 0;
  double fail = 0.0;
  double gap = 0.0;
  double ratio = 1.0;
  double score = 1.0;
};

std::vector<EpisodeScore> extreme_event_scores(const VaRPath& path, const std::vector<Episode>& episodes,
                                               std::size_t K = 10);

struct BacktestReport {
  VarModel model = VarModel::hs;
  std::size_t N = 0;
  std::size_t exceedances = 0;
  double pi_hat = 0.0;
  LRTest pof, ind, cc;
  std::vector<Zone> zones;
  double green = 0.0, yellow = 0.0, red = 0.0;  // zone fractions
  Stability stability;
  double mean_ci_width = 0.0;
};

BacktestReport backtest(const VaRPath& path);

std::string report_csv(const std::vector<BacktestReport>& reports);
std::string path_csv(const VaRPath& path);
std::string stability_csv(const std::vector<BacktestReport>& reports);
std::string episodes_csv(const std::vector<std::pair<VarModel, std::vector<EpisodeScore>>>& scores);

}  // namespace snq
