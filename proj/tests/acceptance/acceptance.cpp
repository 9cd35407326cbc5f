// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is nonzero when any selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <thread>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "snqesa/baselines.hpp"
#include "snqesa/binom_tilt.hpp"
#include "snqesa/ci_engine.hpp"
#include "snqesa/cli.hpp"
#include "snqesa/risk_backtest.hpp"
#include "snqesa/saddle_solver.hpp"
#include "snqesa/score_kernel.hpp"
#include "snqesa/sim_lab.hpp"
#include "snqesa/tail_engine.hpp"

using namespace snq;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// 1: saddlepoint tails against exact mid-p binomial tails on the lattice
Outcome tail_accuracy() {
  const auto t0 = Clock::now();
  const int ns[] = {50, 100, 200, 500};
  double worst[4] = {0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    const int n = ns[i];
    for (double tau : {0.25, 0.5, 0.9, 0.95}) {
      for (int k = 0; k <= n; ++k) {
        const auto r = directed_tail(score_from_count(k, n, tau, 0.25), tau, n);
        const double ex = r.up ? oracle::midp_lower(k, n, tau) : oracle::midp_upper(k, n, tau);
        if (ex < 1e-8) continue;
        worst[i] = std::max(worst[i], std::fabs(r.p_dir / ex - 1));
      }
    }
  }
  const double el = seconds_since(t0);
  bool mono = true;
  for (int i = 1; i < 4; ++i) mono = mono && worst[i] <= worst[i - 1];
  const bool ok = worst[0] <= 0.05 && worst[3] <= 0.01 && mono && el < 10;
  return {ok, fmt("max rel err n=50 %.4f, n=100 %.4f, n=200 %.4f, n=500 %.4f; non-increasing=%s; %.2fs", worst[0],
                  worst[1], worst[2], worst[3], mono ? "yes" : "no", el)};
}

// 2: constrained solve reproduces the binomial tilt; forced degeneracy reproduces the binomial path
Outcome tilt_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 eng(2024);
  std::uniform_real_distribution<double> ud(0, 1);
  int converged = 0, other = 0;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double tau = 0.01 + 0.98 * ud(eng);
    const std::size_t n = (std::size_t)std::exp(std::log(10.0) + ud(eng) * std::log(1e4));
    const double u = 0.001 + 0.998 * ud(eng);
    const double x = h_eval(u, tau, n);
    const auto sol = solve_constrained(x, tau, n);
    if (sol.status != SolverStatus::converged) {
      ++other;
      continue;
    }
    ++converged;
    worst = std::max(worst, std::fabs(sol.p_hat - invert_h(x, tau, n)));
  }
  // degeneracy: a huge threshold forces every solve onto the fallback
  TailConfig forced;
  forced.solver.degeneracy_delta = 1e300;
  int fb = 0, mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const double tau = 0.05 + 0.9 * ud(eng);
    const std::size_t n = 20 + eng() % 500;
    const double k = std::floor(ud(eng) * (n + 1));
    const auto st = score_from_count(std::min(k, (double)n), n, tau, 0.25);
    const auto r = directed_tail(st, tau, n, forced);
    if (r.solver_status != SolverStatus::degenerate_fallback) continue;
    ++fb;
    const bool lower = r.up;
    const double core = binomial_path(r.u_eval, tau, n, lower, LatticeMode::midp, forced.c0);
    const double p = std::clamp(core + 0.5 * r.atom, 0.0, 1.0);
    if (p != r.p_dir) ++mismatch;
  }
  const double el = seconds_since(t0);
  const bool ok = worst <= 1e-10 && mismatch == 0 && fb > 0 && el < 5;
  return {ok, fmt("%d/1000 converged (%d not), max |p_hat-u_x| = %.2e; %d forced fallbacks, %d mismatches; %.2fs",
                  converged, other, worst, fb, mismatch, el)};
}

// 3: T = h(Ybar) without the ridge, and the pivot orders events like the count
Outcome pivot_identity() {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> ud(0, 1);
  std::normal_distribution<double> nd;
  double worst = 0;
  int order_viol = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + eng() % 300;
    std::vector<double> x(n);
    for (auto& v : x) v = nd(eng);
    QuantileSpec sp;
    sp.tau = 0.02 + 0.96 * ud(eng);
    sp.ridge_c = 0.0;
    const double t = nd(eng) * 1.2;
    const Sample s(x);
    const auto st = score_stats(s, t, sp);
    const double ybar = st.K / (double)n;
    const double h = (ybar > 0 && ybar < 1) ? h_eval(ybar, sp.tau, n) : oracle::pivot(st.K, n, sp.tau, 0.0);
    worst = std::max(worst, std::fabs(st.T - h) / std::max(1.0, std::fabs(h)));
    // {T >= T(k)} must coincide with {K <= k} for every lattice k
    for (std::size_t k = 0; k <= n; k += 1 + n / 25) {
      const double tk = score_from_count((double)k, n, sp.tau, 0.0).T;
      if ((st.T >= tk) != (st.K <= (double)k)) ++order_viol;
    }
  }
  return {worst <= 1e-12 && order_viol == 0,
          fmt("max |T - h(Ybar)| = %.2e over 1000 cases; event-order violations = %d", worst, order_viol)};
}

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

// 4
Outcome table_normal() {
  const auto t0 = Clock::now();
  const auto rep =
      run_study(DGP::parse("normal"), 0.95, 100, 0.05, 2000, {"snqesa", "snqesa_min", "exact", "snqesa_disc"}, 20240501);
  const auto *a = rep.find("snqesa"), *m = rep.find("snqesa_min"), *e = rep.find("exact"), *d = rep.find("snqesa_disc");
  const bool same = e->coverage == d->coverage && e->mean_len == d->mean_len && e->mean_is == d->mean_is;
  const bool c1 = in(a->coverage, 0.929, 0.969), c2 = in(a->mean_len, 0.647, 0.747);
  const bool c3 = in(m->coverage, 0.940, 0.980), c4 = in(e->coverage, 0.980, 1.0);
  const double el = seconds_since(t0);
  return {c1 && c2 && c3 && c4 && same && el < 300,
          fmt("SNQESA cov %.4f [%s] len %.4f [%s]; min cov %.4f [%s]; exact cov %.4f [%s]; disc==exact %s; %.1fs",
              a->coverage, c1 ? "ok" : "out", a->mean_len, c2 ? "ok" : "out", m->coverage, c3 ? "ok" : "out",
              e->coverage, c4 ? "ok" : "out", same ? "yes" : "no", el)};
}

// 5
Outcome table_lognormal() {
  const auto rep = run_study(DGP::parse("lognormal"), 0.95, 100, 0.05, 2000, {"snqesa", "waldkde"}, 20240502);
  const double a = rep.find("snqesa")->coverage, w = rep.find("waldkde")->coverage;
  const bool c1 = in(a, 0.928, 0.968), c2 = w <= 0.55;
  return {c1 && c2, fmt("SNQESA cov %.4f [%s]; WaldKDE cov %.4f [%s]", a, c1 ? "ok" : "out", w, c2 ? "ok" : "out")};
}

// 6
Outcome table_cauchy() {
  const auto rep = run_study(DGP::parse("cauchy"), 0.95, 100, 0.05, 1000, {"snqesa", "pctboot"}, 20240503);
  const auto *a = rep.find("snqesa"), *p = rep.find("pctboot");
  const bool c1 = in(a->coverage, 0.926, 0.976), c2 = a->mean_len < p->mean_len;
  return {c1 && c2, fmt("SNQESA cov %.4f [%s]; mean length SNQESA %.3f vs PctBoot %.3f [%s]", a->coverage,
                        c1 ? "ok" : "out", a->mean_len, p->mean_len, c2 ? "ok" : "out")};
}

// 7
Outcome exact_oracle() {
  int cases = 0, pair_bad = 0, len_bad = 0, minlen_bad = 0;
  std::mt19937_64 eng(7);
  std::normal_distribution<double> nd;
  for (int n = 2; n <= 30; ++n)
    for (int ti = 1; ti <= 9; ++ti)
      for (double a : {0.01, 0.05, 0.1}) {
        const double tau = ti / 10.0;
        ++cases;
        std::vector<double> below(n + 2), above(n + 2);
        for (int k = 0; k <= n + 1; ++k) {
          below[k] = oracle::below(k, n, tau);
          above[k] = oracle::at_or_above(k, n, tau);
        }
        // equal-tailed: the feasible pair with the largest l and smallest u
        std::size_t bl = 0, bu = n + 1;
        bool found = false;
        for (int l = 0; l <= n; ++l)
          for (int u = l + 1; u <= n + 1; ++u)
            if (below[l] <= a / 2 + 1e-12 && above[u] <= a / 2 + 1e-12) {
              if (!found || l > (int)bl || (l == (int)bl && u < (int)bu)) {
                bl = l;
                bu = u;
              }
              found = true;
            }
        const auto got = exact_rank_pair(n, tau, a);
        if (got.first != bl || got.second != bu) ++pair_bad;

        std::vector<double> x(n);
        for (auto& v : x) v = nd(eng);
        const Sample s(x);
        QuantileSpec sp;
        sp.tau = tau;
        sp.alpha = a;
        const auto e = exact_binomial_ci(s, sp);
        const auto m = min_length_ci(s, sp);
        if (m.length() > e.length()) ++len_bad;
        // shortest feasible pair by enumeration
        auto at = [&](int k) {
          return k == 0 ? -INFINITY : (k == n + 1 ? INFINITY : s.order_stat(k));
        };
        double best = INFINITY;
        for (int l = 0; l <= n; ++l)
          for (int u = l + 1; u <= n + 1; ++u)
            if (below[l] + above[u] <= a + 1e-12) best = std::min(best, at(u) - at(l));
        if (!(m.length() == best || (std::isinf(best) && std::isinf(m.length())))) ++minlen_bad;
      }
  return {pair_bad == 0 && len_bad == 0 && minlen_bad == 0,
          fmt("%d designs: equal-tailed pair mismatches %d; min-length longer than equal-tailed %d; min-length not "
              "shortest %d",
              cases, pair_bad, len_bad, minlen_bad)};
}

// 8
Outcome endpoint_residuals() {
  std::mt19937_64 eng(8);
  std::uniform_real_distribution<double> ud(0, 1);
  std::normal_distribution<double> nd;
  int cases = 0, closed = 0, bad = 0, nest_bad = 0;
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = (std::size_t)std::exp(std::log(20.0) + ud(eng) * std::log(100.0));
    std::vector<double> x(n);
    const int fam = i % 3;
    for (auto& v : x) {
      const double z = nd(eng);
      v = fam == 0 ? z : fam == 1 ? std::exp(z) : z / std::sqrt(-2 * std::log(ud(eng)));
    }
    QuantileSpec sp;
    sp.tau = 0.05 + 0.9 * ud(eng);
    const double alphas[] = {0.01, 0.05, 0.1, 0.2};
    sp.alpha = alphas[eng() % 4];
    const Sample s(x);
    const TailConfig cfg = TailConfig::from_spec(sp);
    const auto r = snqesa_ci(s, sp, cfg);
    ++cases;
    if (!r.open_lo) {
      ++closed;
      const double e = std::fabs(interpolated_tail(s, r.lower, sp, cfg).p_up - sp.alpha / 2);
      worst = std::max(worst, e);
      bad += e > 1e-6;
    }
    if (!r.open_hi) {
      ++closed;
      const double e = std::fabs(interpolated_tail(s, r.upper, sp, cfg).p_down - sp.alpha / 2);
      worst = std::max(worst, e);
      bad += e > 1e-6;
    }
    QuantileSpec tight = sp;
    tight.alpha = sp.alpha / 2;
    const auto w = snqesa_ci(s, tight);
    if (w.lower > r.lower || w.upper < r.upper) ++nest_bad;
  }
  return {bad == 0 && nest_bad == 0, fmt("%d cases, %d closed endpoints, max |p - alpha/2| = %.2e, %d over 1e-6; "
                                         "nesting violations %d",
                                         cases, closed, worst, bad, nest_bad)};
}

// 9
Outcome backtest_formulas() {
  const double lr = kupiec_pof(std::vector<int>(250, 0), 0.01).lr;
  const double e1 = std::fabs(lr + 500 * std::log(0.99));
  std::mt19937_64 eng(9);
  double e2 = 0;
  for (int i = 0; i < 1000; ++i) {
    std::bernoulli_distribution bd(0.002 + 0.2 * (i % 10) / 10.0);
    std::vector<int> h(2 + eng() % 1500);
    for (auto& v : h) v = bd(eng);
    const auto p = kupiec_pof(h, 0.01), ind = christoffersen_ind(h), cc = conditional_coverage(h, 0.01);
    e2 = std::max(e2, std::fabs(cc.lr - (p.lr + ind.lr)));
  }
  const bool z = zone_for_count(4) == Zone::green && zone_for_count(5) == Zone::yellow &&
                 zone_for_count(9) == Zone::yellow && zone_for_count(10) == Zone::red;
  return {e1 <= 1e-10 && e2 <= 1e-12 && z,
          fmt("POF(250,0) error %.1e; max |LR_cc - LR_pof - LR_ind| %.1e over 1000 sequences; zones 4/5/9/10 %s", e1, e2,
              z ? "green/yellow/yellow/red" : "wrong")};
}

// 10
ReturnSeries synthetic_series(std::size_t len, std::uint64_t seed, bool hetero) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  ReturnSeries s;
  double s2 = 1e-4, prev = 0;
  for (std::size_t i = 0; i < len; ++i) {
    s.dates.push_back(fmt("%04zu-%02zu-%02zu", 1900 + i / 336, 1 + (i / 28) % 12, 1 + i % 28));
    if (hetero) s2 = 1e-6 + 0.94 * s2 + 0.05 * prev * prev;  // EWMA-type recursion with a small intercept
    prev = std::sqrt(s2) * nd(eng);
    s.r.push_back(prev);
  }
  return s;
}

Outcome var_calibration() {
  RollingOptions opt;
  opt.with_ci = false;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  const double se = std::sqrt(0.01 * 0.99 / 5000);
  std::string detail;
  bool ok = true;
  for (bool hetero : {false, true}) {
    int good = 0, in_band = 0, pof_ok = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto s = synthetic_series(5250, 1000 * seed + hetero, hetero);
      const auto p = rolling_var(s, VarModel::fhs, 250, 0.99, opt);
      const auto rep = backtest(p);
      const bool band = std::fabs(rep.pi_hat - 0.01) <= 3 * se;
      in_band += band;
      pof_ok += rep.pof.p > 0.05;
      good += band && rep.pof.p > 0.05;
    }
    ok = ok && good >= 45;
    detail += fmt("%s: %d/50 seeds pass (rate band %d, POF p>0.05 %d)%s", hetero ? "EWMA-heteroskedastic" : "iid",
                  good, in_band, pof_ok, hetero ? "" : "; ");
  }
  return {ok, detail};
}

// 11
Outcome performance() {
  std::mt19937_64 eng(11);
  std::normal_distribution<double> nd;
  QuantileSpec sp;
  sp.tau = 0.95;
  double el[2];
  const std::size_t sizes[2] = {100000, 1000000};
  for (int i = 0; i < 2; ++i) {
    std::vector<double> x(sizes[i]);
    for (auto& v : x) v = nd(eng);
    const auto t0 = Clock::now();
    const Sample s(std::move(x));
    const auto r = snqesa_ci(s, sp);
    el[i] = seconds_since(t0);
    if (!std::isfinite(r.length())) el[i] = INFINITY;
  }
  // directed_tail cost must not grow with n
  auto cost = [&](std::size_t n) {
    const auto t0 = Clock::now();
    double acc = 0;
    for (int k = 0; k < 2000; ++k) {
      const double K = n * (0.90 + 0.1 * k / 2000.0);
      acc += directed_tail(score_from_count(K, n, 0.95, 0.25), 0.95, n).p_dir;
    }
    return seconds_since(t0) / 2000 + acc * 0;
  };
  const double small = cost(1000), large = cost(100000000);
  const bool o1 = large < 5 * small + 2e-5;
  return {el[0] < 0.1 && el[1] < 1.5 && o1,
          fmt("n=1e5 %.1f ms, n=1e6 %.1f ms (including the sort); directed_tail %.1f us at n=1e3 vs %.1f us at n=1e8",
              el[0] * 1e3, el[1] * 1e3, small * 1e6, large * 1e6)};
}

// 12
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "snqesa");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  return run_cli((int)argv.size(), argv.data(), o, e);
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path d = fs::temp_directory_path() / "snqesa_acceptance";
  fs::create_directories(d);
  std::ofstream(d / "study.cfg") << "dgp = student_t(3)\ntau = 0.9\nn = 80\nR = 200\nseed = 99\nB = 200\n"
                                    "methods = snqesa,snqesa_min,exact,pctboot,bca,smboot,subsample,moutofn,waldkde,hd,mj\n";
  std::vector<std::string> sims;
  int rc = 0;
  for (const char* th : {"1", "1", "3", "8"}) {
    const auto out = d / (std::string("sim_") + th + std::to_string(sims.size()) + ".csv");
    rc |= cli({"simulate", (d / "study.cfg").string(), "--threads", th, "--out", out.string()});
    sims.push_back(slurp(out));
  }
  const std::string data = std::string(SNQESA_TEST_DATA_DIR) + "/synthetic_returns.csv";
  std::vector<std::string> bts;
  int i = 0;
  for (const char* th : {"1", "1", "4"}) {
    const auto prefix = (d / ("bt" + std::to_string(i++))).string();
    rc |= cli({"backtest", data, "--threads", th, "--out", prefix, "--episode", "ep:2014-01-01:2014-12-31"});
    bts.push_back(slurp(prefix + "_report.csv") + slurp(prefix + "_path_hs.csv") + slurp(prefix + "_path_fhs.csv") +
                  slurp(prefix + "_stability.csv") + slurp(prefix + "_episodes.csv"));
  }
  bool same = rc == 0 && !sims[0].empty() && !bts[0].empty();
  for (const auto& s : sims) same = same && s == sims[0];
  for (const auto& b : bts) same = same && b == bts[0];
  return {same, fmt("simulate x4 (threads 1,1,3,8) and backtest x3 (threads 1,1,4): %s", same ? "byte-identical" : "differ")};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {"tail accuracy against exact mid-p tails", tail_accuracy},
    {"tilt identity and degeneracy fallback", tilt_identity},
    {"pivot equals h(Ybar); event-count equivalence", pivot_identity},
    {"normal design tau=0.95 n=100 R=2000", table_normal},
    {"lognormal design tau=0.95 n=100 R=2000", table_lognormal},
    {"Cauchy design tau=0.95 n=100 R=1000", table_cauchy},
    {"exact and minimum-length rank pairs vs enumeration", exact_oracle},
    {"endpoint residuals and nesting", endpoint_residuals},
    {"backtest formulas", backtest_formulas},
    {"FHS VaR calibration", var_calibration},
    {"performance budget", performance},
    {"CLI determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i)
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) which.push_back(std::atoi(argv[++i]));
  if (which.empty())
    for (int i = 1; i <= (int)kCriteria.size(); ++i) which.push_back(i);
  int failed = 0;
  for (int c : which) {
    if (c < 1 || c > (int)kCriteria.size()) {
      std::fprintf(stderr, "no criterion %d\n", c);
      return 2;
    }
    Outcome o;
    try {
      o = kCriteria[c - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %s: %s: %s\n", c, o.pass ? "PASS" : "FAIL", kCriteria[c - 1].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
