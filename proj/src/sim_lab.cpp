#include "snqesa/sim_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/tools/toms748_solve.hpp>

#include "snqesa/special.hpp"

namespace snq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("cannot parse ") + what + " from '" + s + "'");
  }
}

long long parse_int(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("cannot parse ") + what + " from '" + s + "'");
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return NAN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

DGP DGP::parse(const std::string& text) {
  const std::string t = trim(text);
  std::string name = t;
  std::vector<double> args;
  const auto open = t.find('(');
  if (open != std::string::npos) {
    if (t.back() != ')') throw InputError("malformed dgp '" + text + "'");
    name = trim(t.substr(0, open));
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    if (!trim(inner).empty())
      for (const auto& a : split(inner, ',')) args.push_back(parse_double(a, "dgp parameter"));
  }
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw InputError("wrong number of parameters for dgp '" + name + "'");
  };
  DGP d;
  if (name == "normal") {
    need(0, 2);
    d.family = Family::normal;
    d.p1 = args.size() > 0 ? args[0] : 0.0;
    d.p2 = args.size() > 1 ? args[1] : 1.0;
  } else if (name == "lognormal") {
    need(0, 2);
    d.family = Family::lognormal;
    d.p1 = args.size() > 0 ? args[0] : 0.0;
    d.p2 = args.size() > 1 ? args[1] : 1.0;
  } else if (name == "student_t" || name == "t") {
    need(0, 1);
    d.family = Family::student_t;
    d.p1 = args.empty() ? 2.0 : args[0];
  } else if (name == "cauchy") {
    need(0, 2);
    d.family = Family::cauchy;
    d.p1 = args.size() > 0 ? args[0] : 0.0;
    d.p2 = args.size() > 1 ? args[1] : 1.0;
  } else if (name == "beta") {
    need(0, 2);
    if (args.size() == 1) throw InputError("beta needs both shape parameters");
    d.family = Family::beta;
    d.p1 = args.empty() ? 2.0 : args[0];
    d.p2 = args.empty() ? 5.0 : args[1];
  } else if (name == "exponential") {
    need(0, 1);
    d.family = Family::exponential;
    d.p1 = args.empty() ? 1.0 : args[0];
  } else if (name == "normal_mixture" || name == "mixture") {
    d.family = Family::normal_mixture;
    if (args.empty()) args = {0.5, -1.0, 1.0, 0.5, 1.0, 1.0};
    if (args.size() % 3 != 0) throw InputError("normal_mixture takes (weight, mean, sd) triplets");
    for (std::size_t i = 0; i < args.size(); i += 3) {
      d.weights.push_back(args[i]);
      d.means.push_back(args[i + 1]);
      d.sds.push_back(args[i + 2]);
    }
  } else {
    throw InputError("unknown dgp '" + name + "'");
  }
  d.validate();
  return d;
}

std::string DGP::name() const {
  char buf[64];
  switch (family) {
    case Family::normal: std::snprintf(buf, sizeof buf, "normal(%g,%g)", p1, p2); return buf;
    case Family::lognormal: std::snprintf(buf, sizeof buf, "lognormal(%g,%g)", p1, p2); return buf;
    case Family::student_t: std::snprintf(buf, sizeof buf, "student_t(%g)", p1); return buf;
    case Family::cauchy: std::snprintf(buf, sizeof buf, "cauchy(%g,%g)", p1, p2); return buf;
    case Family::beta: std::snprintf(buf, sizeof buf, "beta(%g,%g)", p1, p2); return buf;
    case Family::exponential: std::snprintf(buf, sizeof buf, "exponential(%g)", p1); return buf;
    case Family::normal_mixture: {
      std::string s = "normal_mixture(";
      for (std::size_t i = 0; i < weights.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%g,%g,%g", i ? "," : "", weights[i], means[i], sds[i]);
        s += buf;
      }
      return s + ")";
    }
  }
  return "?";
}

void DGP::validate() const {
  auto pos = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be positive");
  };
  switch (family) {
    case Family::normal:
    case Family::lognormal:
    case Family::cauchy:
      if (!std::isfinite(p1)) throw InputError("location must be finite");
      pos(p2, "scale");
      break;
    case Family::student_t: pos(p1, "df"); break;
    case Family::beta:
      pos(p1, "beta shape a");
      pos(p2, "beta shape b");
      break;
    case Family::exponential: pos(p1, "rate"); break;
    case Family::normal_mixture: {
      if (weights.empty()) throw InputError("mixture needs at least one component");
      double s = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) throw InputError("mixture weights must be positive");
        if (!std::isfinite(means[i])) throw InputError("mixture means must be finite");
        pos(sds[i], "mixture sd");
        s += weights[i];
      }
      if (std::fabs(s - 1.0) > 1e-9) throw InputError("mixture weights must sum to 1");
      break;
    }
  }
}

double DGP::cdf(double x) const {
  switch (family) {
    case Family::normal: return special::norm_cdf((x - p1) / p2);
    case Family::lognormal: return x <= 0.0 ? 0.0 : special::norm_cdf((std::log(x) - p1) / p2);
    case Family::student_t: return special::student_t_cdf(x, p1);
    case Family::cauchy: return 0.5 + std::atan((x - p1) / p2) / std::numbers::pi;
    case Family::beta: return special::beta_cdf(x, p1, p2);
    case Family::exponential: return x <= 0.0 ? 0.0 : -std::expm1(-p1 * x);
    case Family::normal_mixture: {
      double s = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * special::norm_cdf((x - means[i]) / sds[i]);
      return s;
    }
  }
  return NAN;
}

double DGP::quantile(double u) const {
  switch (family) {
    case Family::normal: return p1 + p2 * special::norm_quantile(u);
    case Family::lognormal: return std::exp(p1 + p2 * special::norm_quantile(u));
    case Family::student_t: return special::student_t_quantile(u, p1);
    case Family::cauchy: return p1 + p2 * std::tan(std::numbers::pi * (u - 0.5));
    case Family::beta: return special::beta_quantile(u, p1, p2);
    case Family::exponential: return -std::log1p(-u) / p1;
    case Family::normal_mixture: return true_quantile(*this, u);
  }
  return NAN;
}

double DGP::draw(rng::Stream& s) const {
  if (family == Family::normal_mixture) {
    // component by one uniform, then the normal by inversion
    const double c = s.uniform();
    double acc = 0.0;
    std::size_t k = weights.size() - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (c < acc) {
        k = i;
        break;
      }
    }
    return means[k] + sds[k] * special::norm_quantile(s.uniform());
  }
  return quantile(s.uniform());
}

double true_quantile(const DGP& dgp, double tau, bool* used_fallback) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0,1)");
  if (used_fallback) *used_fallback = false;
  if (dgp.family != DGP::Family::normal_mixture) return dgp.quantile(tau);

  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < dgp.weights.size(); ++i) {
    lo = std::min(lo, dgp.means[i]);
    hi = std::max(hi, dgp.means[i]);
  }
  double width = std::max(1.0, hi - lo);
  auto f = [&](double x) { return dgp.cdf(x) - tau; };
  bool bracketed = false;
  for (int i = 0; i < 60 && !bracketed; ++i) {
    const double flo = f(lo), fhi = f(hi);
    if (flo <= 0.0 && fhi >= 0.0) {
      bracketed = true;
      break;
    }
    if (flo > 0.0) lo -= width;
    if (fhi < 0.0) hi += width;
    width *= 2.0;
  }
  if (bracketed) {
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-15 * std::max(1.0, std::fabs(a)); };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    if (iters < 200) return 0.5 * (r.first + r.second);
  }
  if (used_fallback) *used_fallback = true;
  rng::Stream s(0x5eed5eedULL);
  std::vector<double> draws(10'000'000);
  for (auto& d : draws) d = dgp.draw(s);
  std::sort(draws.begin(), draws.end());
  return quantile_type8(draws, tau);
}

std::optional<double> interval_score(double L, double U, double theta, double alpha) {
  if (!std::isfinite(L) || !std::isfinite(U)) return std::nullopt;
  double s = U - L;
  if (theta < L) s += (2.0 / alpha) * (L - theta);
  if (theta > U) s += (2.0 / alpha) * (theta - U);
  return s;
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m = {"snqesa",    "snqesa_disc", "snqesa_min", "exact",
                                             "pctboot",   "bca",         "smboot",     "subsample",
                                             "moutofn",   "waldkde",     "hd",         "mj"};
  return m;
}

bool is_known_method(const std::string& m) {
  const auto& k = known_methods();
  return std::find(k.begin(), k.end(), m) != k.end();
}

IntervalResult compute_interval(const std::string& method, const Sample& sample, const QuantileSpec& spec,
                                const ResamplePlan& plan) {
  if (method == "snqesa") return snqesa_ci(sample, spec);
  if (method == "snqesa_disc" || method == "exact") return exact_binomial_ci(sample, spec);
  if (method == "snqesa_min") return min_length_ci(sample, spec);
  if (method == "pctboot") return pct_bootstrap_ci(sample, spec, plan);
  if (method == "bca") return bca_ci(sample, spec, plan);
  if (method == "smboot") return smoothed_bootstrap_ci(sample, spec, plan);
  if (method == "subsample") return subsample_ci(sample, spec, plan);
  if (method == "moutofn") return m_out_of_n_ci(sample, spec, plan);
  if (method == "waldkde") return wald_kde_ci(sample, spec);
  if (method == "hd") return harrell_davis_ci(sample, spec, plan);
  if (method == "mj") return maritz_jarrett_ci(sample, spec, plan);
  throw InputError("unknown method '" + method + "'");
}

void StudyConfig::validate() const {
  dgp.validate();
  spec.validate();
  if (n < 2) throw InputError("n must be >= 2");
  if (R < 1) throw InputError("R must be >= 1");
  if (B < 1) throw InputError("B must be >= 1");
  if (methods.empty()) throw InputError("no methods requested");
  for (const auto& m : methods)
    if (!is_known_method(m)) throw InputError("unknown method '" + m + "'");
}

StudyConfig parse_study_config(const std::string& text) {
  StudyConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "dgp") c.dgp = DGP::parse(val);
    else if (key == "tau") c.spec.tau = parse_double(val, "tau");
    else if (key == "alpha") c.spec.alpha = parse_double(val, "alpha");
    else if (key == "n") c.n = static_cast<std::size_t>(std::max(0LL, parse_int(val, "n")));
    else if (key == "R") c.R = static_cast<int>(parse_int(val, "R"));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(val, "seed"));
    else if (key == "B") c.B = static_cast<int>(parse_int(val, "B"));
    else if (key == "ridge_c") c.spec.ridge_c = parse_double(val, "ridge_c");
    else if (key == "c0") c.spec.c0 = parse_double(val, "c0");
    else if (key == "lattice") c.spec.lattice = parse_lattice(val);
    else if (key == "timing") c.timing = (val == "1" || val == "true" || val == "yes");
    else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : split(val, ','))
        if (!m.empty()) c.methods.push_back(m);
    } else {
      throw InputError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

const SimRow* SimReport::find(const std::string& method) const {
  for (const auto& r : rows)
    if (r.method == method) return &r;
  return nullptr;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string SimReport::to_csv() const {
  std::string out =
      "method,coverage,se_cov,mean_len,med_len,mean_time_s,mean_bias,med_bias,rmse_bias,mean_IS,med_IS,fail_rate\n";
  for (const auto& r : rows) {
    out += r.method;
    for (double v : {r.coverage, r.se_cov, r.mean_len, r.med_len, r.mean_time, r.mean_bias, r.med_bias, r.rmse_bias,
                     r.mean_is, r.med_is, r.fail_rate}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

struct Outcome {
  double lower = NAN;
  double upper = NAN;
  double elapsed = 0.0;
  bool failed = false;
};

}  // namespace

SimReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  const double theta = true_quantile(cfg.dgp, cfg.spec.tau);
  const std::size_t M = cfg.methods.size();
  const auto R = static_cast<std::size_t>(cfg.R);
  std::vector<Outcome> outcomes(R * M);

  std::vector<std::uint64_t> tags(M);
  for (std::size_t j = 0; j < M; ++j) tags[j] = rng::method_tag(cfg.methods[j]);

  auto replicate = [&](std::size_t r) {
    rng::Stream s(rng::derive(cfg.seed, r));
    std::vector<double> x(cfg.n);
    for (auto& v : x) v = cfg.dgp.draw(s);
    const Sample sample(std::move(x));
    for (std::size_t j = 0; j < M; ++j) {
      ResamplePlan plan;
      plan.B = cfg.B;
      plan.seed = rng::derive2(cfg.seed, r, tags[j]);
      Outcome& o = outcomes[r * M + j];
      try {
        const IntervalResult ir = compute_interval(cfg.methods[j], sample, cfg.spec, plan);
        o.lower = ir.lower;
        o.upper = ir.upper;
        o.elapsed = ir.elapsed;
        o.failed = ir.failed || std::isnan(ir.lower) || std::isnan(ir.upper);
      } catch (const std::exception&) {
        o.failed = true;
      }
    }
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, R));
  if (threads <= 1) {
    for (std::size_t r = 0; r < R; ++r) replicate(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < R; r = next++) replicate(r);
      });
    for (auto& th : pool) th.join();
  }

  // ordered fold over r; independent of scheduling
  SimReport rep;
  rep.true_q = theta;
  rep.R = cfg.R;
  for (std::size_t j = 0; j < M; ++j) {
    SimRow row;
    row.method = cfg.methods[j];
    std::size_t ok = 0, fails = 0, covered = 0;
    std::vector<double> lens, biases, scores;
    double tsum = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const Outcome& o = outcomes[r * M + j];
      if (o.failed) {
        ++fails;
        continue;
      }
      ++ok;
      tsum += o.elapsed;
      if (o.lower <= theta && theta <= o.upper) ++covered;
      if (std::isfinite(o.lower) && std::isfinite(o.upper)) {
        lens.push_back(o.upper - o.lower);
        biases.push_back(0.5 * (o.lower + o.upper) - theta);
      }
      if (auto is = interval_score(o.lower, o.upper, theta, cfg.spec.alpha)) scores.push_back(*is);
    }
    row.fail_rate = static_cast<double>(fails) / static_cast<double>(R);
    if (ok > 0) {
      const double p = static_cast<double>(covered) / static_cast<double>(ok);
      row.coverage = p;
      row.se_cov = std::sqrt(p * (1.0 - p) / static_cast<double>(ok));
      if (cfg.timing) row.mean_time = tsum / static_cast<double>(ok);
    }
    row.mean_len = mean_of(lens);
    row.med_len = median_of(lens);
    row.mean_bias = mean_of(biases);
    row.med_bias = median_of(biases);
    if (!biases.empty()) {
      double s = 0.0;
      for (double b : biases) s += b * b;
      row.rmse_bias = std::sqrt(s / static_cast<double>(biases.size()));
    }
    row.mean_is = mean_of(scores);
    row.med_is = median_of(scores);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

SimReport run_study(const DGP& dgp, double tau, std::size_t n, double alpha, int R,
                    const std::vector<std::string>& methods, std::uint64_t master_seed) {
  StudyConfig c;
  c.dgp = dgp;
  c.spec.tau = tau;
  c.spec.alpha = alpha;
  c.n = n;
  c.R = R;
  c.methods = methods;
  c.seed = master_seed;
  return run_study(c);
}

}  // namespace snq
