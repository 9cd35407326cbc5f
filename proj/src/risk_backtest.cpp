#include "snqesa/risk_backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "snqesa/baselines.hpp"
#include "snqesa/ci_engine.hpp"
#include "snqesa/sample.hpp"
#include "snqesa/sim_lab.hpp"
#include "snqesa/special.hpp"

namespace snq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool iso_date(const std::string& d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (d[i] < '0' || d[i] > '9') return false;
  return true;
}

// x·log(y) with 0·log 0 = 0
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

void ReturnSeries::validate() const {
  if (dates.size() != r.size()) throw InputError("dates and returns differ in length");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i])) throw InputError("non-finite return on " + dates[i]);
    if (i > 0 && !(dates[i - 1] < dates[i])) throw InputError("dates must be strictly increasing at " + dates[i]);
  }
}

ReturnSeries ReturnSeries::from_csv(const std::string& text, bool prices) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  std::vector<std::string> dates;
  std::vector<double> vals;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("line " + std::to_string(lineno) + ": expected two columns");
    const std::string a = trim(line.substr(0, comma));
    const std::string b = trim(line.substr(comma + 1));
    if (!header) {
      header = true;
      const std::string want = prices ? "price" : "return";
      if (a != "date" || b != want)
        throw InputError("line " + std::to_string(lineno) + ": expected header 'date," + want + "'");
      continue;
    }
    if (!iso_date(a)) throw InputError("line " + std::to_string(lineno) + ": bad date '" + a + "'");
    double v;
    try {
      std::size_t pos = 0;
      v = std::stod(b, &pos);
      if (pos != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(lineno) + ": bad number '" + b + "'");
    }
    if (!std::isfinite(v)) throw InputError("line " + std::to_string(lineno) + ": non-finite value");
    if (prices && !(v > 0.0)) throw InputError("line " + std::to_string(lineno) + ": price must be positive");
    if (!dates.empty() && !(dates.back() < a))
      throw InputError("line " + std::to_string(lineno) + ": dates must be strictly increasing");
    dates.push_back(a);
    vals.push_back(v);
  }
  if (!header) throw InputError("empty input");
  ReturnSeries s;
  if (prices) {
    for (std::size_t i = 1; i < vals.size(); ++i) {
      s.dates.push_back(dates[i]);
      s.r.push_back(std::log(vals[i] / vals[i - 1]));
    }
  } else {
    s.dates = std::move(dates);
    s.r = std::move(vals);
  }
  s.validate();
  return s;
}

const char* model_name(VarModel m) { return m == VarModel::hs ? "HS" : "FHS"; }

VarModel parse_model(const std::string& s) {
  if (s == "hs" || s == "HS") return VarModel::hs;
  if (s == "fhs" || s == "FHS") return VarModel::fhs;
  throw InputError("unknown VaR model '" + s + "'");
}

VaRPath rolling_var(const ReturnSeries& series, VarModel model, std::size_t m, double tau, const RollingOptions& opt) {
  series.validate();
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0,1)");
  if (m < 2) throw InputError("window must be >= 2");
  if (series.r.size() < m + 1) throw InputError("series too short for the window");
  if (!(opt.ci_level > 0.0 && opt.ci_level < 1.0)) throw InputError("ci level must lie in (0,1)");

  const std::size_t N = series.r.size() - m;
  const double level = 1.0 - tau;  // left-tail quantile level
  VaRPath path;
  path.model = model;
  path.m = m;
  path.tau = tau;
  path.dates.assign(series.dates.begin() + static_cast<std::ptrdiff_t>(m), series.dates.end());
  path.realized.assign(series.r.begin() + static_cast<std::ptrdiff_t>(m), series.r.end());
  path.var.assign(N, 0.0);
  path.ci_lo.assign(N, NAN);
  path.ci_hi.assign(N, NAN);
  path.hits.assign(N, 0);

  QuantileSpec spec;
  spec.tau = level;
  spec.alpha = 1.0 - opt.ci_level;
  spec.ridge_c = opt.ridge_c;
  spec.lattice = opt.lattice;
  spec.c0 = opt.c0;
  spec.validate();
  const TailConfig tcfg = TailConfig::from_spec(spec);
  CountRoots roots;
  if (opt.with_ci) roots = snqesa_count_roots(m, spec, tcfg);

  std::vector<char> degenerate(N, 0);
  auto forecast = [&](std::size_t j) {
    const double* w = series.r.data() + j;
    std::vector<double> x(w, w + m);
    double scale = 1.0;
    if (model == VarModel::fhs) {
      const double sd = sample_sd(x);
      if (sd > 0.0) {
        double s2 = sd * sd;
        for (std::size_t i = 0; i < m; ++i) {
          const double ri = x[i];
          x[i] = ri / std::sqrt(s2);
          s2 = kEwmaDecay * s2 + (1.0 - kEwmaDecay) * ri * ri;
        }
        scale = std::sqrt(s2);
      }
    }
    Sample smp(std::move(x));
    const auto sorted = smp.sorted();
    double v;
    if (sorted.front() == sorted.back()) {
      degenerate[j] = 1;
      v = sorted.front() * scale;
      if (opt.with_ci) path.ci_lo[j] = path.ci_hi[j] = v;
    } else {
      v = scale * quantile_type8(sorted, level);
      if (opt.with_ci) {
        const IntervalResult ci = snqesa_ci(smp, spec, tcfg, roots);
        path.ci_lo[j] = scale * ci.lower;
        path.ci_hi[j] = scale * ci.upper;
      }
    }
    path.var[j] = v;
    // a flat window cannot be breached by its own repeated value
    const double next = series.r[j + m];
    path.hits[j] = (degenerate[j] ? next < v : next <= v) ? 1 : 0;
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(N)));
  if (threads == 1) {
    for (std::size_t j = 0; j < N; ++j) forecast(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < N; j = next++) forecast(j);
      });
    for (auto& th : pool) th.join();
  }
  path.degenerate_windows = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  return path;
}

LRTest kupiec_pof(const std::vector<int>& hits, double pi) {
  if (hits.empty()) throw InputError("kupiec_pof needs at least one observation");
  if (!(pi > 0.0 && pi < 1.0)) throw InputError("pi must lie in (0,1)");
  const double N = static_cast<double>(hits.size());
  double x = 0.0;
  for (int h : hits) x += h ? 1.0 : 0.0;
  const double ph = x / N;
  const double l0 = xlogy(N - x, 1.0 - pi) + xlogy(x, pi);
  const double l1 = xlogy(N - x, 1.0 - ph) + xlogy(x, ph);
  LRTest t;
  t.lr = std::max(0.0, -2.0 * (l0 - l1));
  t.p = special::chi2_sf(t.lr, 1.0);
  return t;
}

LRTest christoffersen_ind(const std::vector<int>& hits) {
  if (hits.size() < 2) throw InputError("christoffersen_ind needs at least two observations");
  double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  for (std::size_t i = 1; i < hits.size(); ++i) {
    const bool a = hits[i - 1] != 0, b = hits[i] != 0;
    if (!a && !b) ++n00;
    else if (!a && b) ++n01;
    else if (a && !b) ++n10;
    else ++n11;
  }
  const double p01 = (n00 + n01) > 0 ? n01 / (n00 + n01) : 0.0;
  const double p11 = (n10 + n11) > 0 ? n11 / (n10 + n11) : 0.0;
  const double p = (n01 + n11) / (n00 + n01 + n10 + n11);
  const double l0 = xlogy(n00 + n10, 1.0 - p) + xlogy(n01 + n11, p);
  const double l1 = xlogy(n00, 1.0 - p01) + xlogy(n01, p01) + xlogy(n10, 1.0 - p11) + xlogy(n11, p11);
  LRTest t;
  t.lr = std::max(0.0, -2.0 * (l0 - l1));
  t.p = special::chi2_sf(t.lr, 1.0);
  return t;
}

LRTest conditional_coverage(const std::vector<int>& hits, double pi) {
  LRTest t;
  t.lr = kupiec_pof(hits, pi).lr + christoffersen_ind(hits).lr;
  t.p = special::chi2_sf(t.lr, 2.0);
  return t;
}

const char* zone_name(Zone z) {
  switch (z) {
    case Zone::green: return "green";
    case Zone::yellow: return "yellow";
    case Zone::red: return "red";
  }
  return "?";
}

Zone zone_for_count(std::size_t x) {
  if (x <= 4) return Zone::green;
  if (x <= 9) return Zone::yellow;
  return Zone::red;
}

std::vector<Zone> traffic_light(const std::vector<int>& hits, std::size_t window) {
  if (window == 0) throw InputError("traffic light window must be positive");
  std::vector<Zone> z;
  for (std::size_t s = 0; s + window <= hits.size(); s += window) {
    std::size_t c = 0;
    for (std::size_t i = s; i < s + window; ++i) c += hits[i] ? 1 : 0;
    z.push_back(zone_for_count(c));
  }
  return z;
}

Stability stability_metrics(const std::vector<double>& v) {
  if (v.size() < 3) throw InputError("stability metrics need a path of length >= 3");
  Stability s;
  s.var_vol = sample_sd(v);
  std::vector<double> d(v.size() - 1);
  for (std::size_t i = 1; i < v.size(); ++i) d[i - 1] = v[i] - v[i - 1];
  s.change_vol = sample_sd(d);
  double peak = v[0];
  for (double x : v) {
    peak = std::max(peak, x);
    s.max_drawdown = std::max(s.max_drawdown, peak - x);
  }
  std::size_t turns = 0;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i - 1] * d[i] < 0.0) ++turns;
  s.turning_ratio = static_cast<double>(turns) / static_cast<double>(d.size() - 1);
  const double den = s.change_vol + 0.1 * s.turning_ratio;
  s.stability = den > 0.0 ? 1.0 / den : std::numeric_limits<double>::infinity();
  return s;
}

std::vector<EpisodeScore> extreme_event_scores(const VaRPath& path, const std::vector<Episode>& episodes,
                                               std::size_t K) {
  if (K == 0) throw InputError("K must be positive");
  std::vector<EpisodeScore> out;
  for (const auto& ep : episodes) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < path.dates.size(); ++i)
      if (path.dates[i] >= ep.start && path.dates[i] <= ep.end) idx.push_back(i);
    if (idx.empty()) throw InputError("episode '" + ep.label + "' does not intersect the forecast path");
    // K largest losses; ties broken by date order
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return path.realized[a] < path.realized[b]; });
    idx.resize(std::min(K, idx.size()));

    EpisodeScore sc;
    sc.label = ep.label;
    sc.K = idx.size();
    std::size_t fails = 0;
    double gap = 0.0, ratio = 0.0;
    for (std::size_t i : idx) {
      const double loss = -path.realized[i];
      const double var = -path.var[i];
      if (path.realized[i] <= path.var[i]) {
        ++fails;
        gap += loss - var;
      }
      double q = loss > 0.0 ? std::min(var / loss, 1.0) : 1.0;
      ratio += std::clamp(q, 0.0, 1.0);
    }
    const double k = static_cast<double>(sc.K);
    sc.fail = static_cast<double>(fails) / k;
    sc.gap = fails ? gap / static_cast<double>(fails) : 0.0;
    sc.ratio = ratio / k;
    sc.score = std::clamp((1.0 - sc.fail) * sc.ratio, 0.0, 1.0);
    out.push_back(sc);
  }
  return out;
}

BacktestReport backtest(const VaRPath& path) {
  BacktestReport r;
  r.model = path.model;
  r.N = path.hits.size();
  for (int h : path.hits) r.exceedances += h ? 1 : 0;
  r.pi_hat = r.N ? static_cast<double>(r.exceedances) / static_cast<double>(r.N) : 0.0;
  const double pi = 1.0 - path.tau;
  r.pof = kupiec_pof(path.hits, pi);
  r.ind = christoffersen_ind(path.hits);
  r.cc.lr = r.pof.lr + r.ind.lr;
  r.cc.p = special::chi2_sf(r.cc.lr, 2.0);
  r.zones = traffic_light(path.hits);
  if (!r.zones.empty()) {
    const double nz = static_cast<double>(r.zones.size());
    r.green = static_cast<double>(std::count(r.zones.begin(), r.zones.end(), Zone::green)) / nz;
    r.yellow = static_cast<double>(std::count(r.zones.begin(), r.zones.end(), Zone::yellow)) / nz;
    r.red = static_cast<double>(std::count(r.zones.begin(), r.zones.end(), Zone::red)) / nz;
  }
  r.stability = stability_metrics(path.var);
  double w = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < path.ci_lo.size(); ++i)
    if (std::isfinite(path.ci_lo[i]) && std::isfinite(path.ci_hi[i])) {
      w += path.ci_hi[i] - path.ci_lo[i];
      ++cnt;
    }
  r.mean_ci_width = cnt ? w / static_cast<double>(cnt) : NAN;
  return r;
}

std::string report_csv(const std::vector<BacktestReport>& reports) {
  std::string out =
      "model,N,exceedances,pi_hat,lr_pof,p_pof,lr_ind,p_ind,lr_cc,p_cc,green_frac,yellow_frac,red_frac,"
      "mean_ci_width\n";
  for (const auto& r : reports) {
    out += model_name(r.model);
    out += ',' + std::to_string(r.N) + ',' + std::to_string(r.exceedances);
    for (double v : {r.pi_hat, r.pof.lr, r.pof.p, r.ind.lr, r.ind.p, r.cc.lr, r.cc.p, r.green, r.yellow, r.red,
                     r.mean_ci_width})
      out += ',' + format_number(v);
    out += '\n';
  }
  return out;
}

std::string path_csv(const VaRPath& path) {
  std::string out = "date,var,ci_lo,ci_hi,hit\n";
  for (std::size_t i = 0; i < path.var.size(); ++i) {
    out += path.dates[i];
    out += ',' + format_number(path.var[i]) + ',' + format_number(path.ci_lo[i]) + ',' +
           format_number(path.ci_hi[i]) + ',' + std::to_string(path.hits[i]) + '\n';
  }
  return out;
}

std::string stability_csv(const std::vector<BacktestReport>& reports) {
  std::string out = "model,var_vol,change_vol,max_drawdown,turning_ratio,stability\n";
  for (const auto& r : reports) {
    out += model_name(r.model);
    const auto& s = r.stability;
    for (double v : {s.var_vol, s.change_vol, s.max_drawdown, s.turning_ratio, s.stability})
      out += ',' + format_number(v);
    out += '\n';
  }
  return out;
}

std::string episodes_csv(const std::vector<std::pair<VarModel, std::vector<EpisodeScore>>>& scores) {
  std::string out = "model,episode,K,fail,gap,ratio,score\n";
  for (const auto& [model, eps] : scores)
    for (const auto& e : eps) {
      out += std::string(model_name(model)) + ',' + e.label + ',' + std::to_string(e.K);
      for (double v : {e.fail, e.gap, e.ratio, e.score}) out += ',' + format_number(v);
      out += '\n';
    }
  return out;
}

}  // namespace snq
