#include "snqesa/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <optional>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "snqesa/ci_engine.hpp"
#include "snqesa/risk_backtest.hpp"
#include "snqesa/score_kernel.hpp"
#include "snqesa/sim_lab.hpp"
#include "snqesa/tail_engine.hpp"

namespace snq {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw InputError("cannot write '" + path + "'");
  o << text;
  if (!o) throw InputError("write failed for '" + path + "'");
}

double parse_double(const std::string& tok, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(where + ": bad number '" + tok + "'");
}

// Whitespace/comma separated numbers; a non-numeric first token is read as a header.
std::vector<double> parse_values(const std::string& text, const std::string& source) {
  std::vector<double> v;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      if (v.empty() && lineno == 1 && !std::isdigit(static_cast<unsigned char>(tok[0])) && tok[0] != '-' &&
          tok[0] != '+' && tok[0] != '.')
        break;
      v.push_back(parse_double(tok, source + " line " + std::to_string(lineno)));
    }
  }
  return v;
}

struct Common {
  double tau = 0.5;
  double alpha = 0.05;
  double ridge_c = 0.25;
  std::string lattice = "midp";
  double c0 = 2.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;

  QuantileSpec spec() const {
    QuantileSpec s;
    s.tau = tau;
    s.alpha = alpha;
    s.ridge_c = ridge_c;
    s.lattice = parse_lattice(lattice);
    s.c0 = c0;
    s.validate();
    return s;
  }
  unsigned worker_count() const {
    if (threads) return threads;
    const unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
  }
};

void emit(std::ostream& o, const std::string& k, double v) { o << k << '=' << format_number(v) << '\n'; }
void emit(std::ostream& o, const std::string& k, const std::string& v) { o << k << '=' << v << '\n'; }

// Output goes to --out when given, else to the primary stream.
void deliver(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty())
    out << text;
  else
    write_file(c.out, text);
}

std::vector<double> load_data(const std::string& file, const std::string& inline_values) {
  if (!file.empty() && !inline_values.empty()) throw InputError("give either a data file or --values, not both");
  if (!inline_values.empty()) return parse_values(inline_values, "--values");
  if (file.empty()) throw InputError("no data: pass a file or --values");
  return parse_values(read_file(file), file);
}

Episode parse_episode(const std::string& s) {
  // label:start:end
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (b == std::string::npos) throw InputError("episode must look like label:YYYY-MM-DD:YYYY-MM-DD");
  Episode e{s.substr(0, a), s.substr(a + 1, b - a - 1), s.substr(b + 1)};
  if (e.label.empty() || e.start.size() != 10 || e.end.size() != 10 || e.end < e.start)
    throw InputError("bad episode '" + s + "'");
  return e;
}

void add_common(CLI::App* app, Common& c, bool with_alpha) {
  app->add_option("--tau", c.tau, "quantile level in (0,1)")->capture_default_str();
  if (with_alpha) app->add_option("--alpha", c.alpha, "significance level in (0,1)")->capture_default_str();
  app->add_option("--ridge-c", c.ridge_c, "ridge constant c in Q + c/sqrt(n)")->capture_default_str();
  app->add_option("--lattice", c.lattice, "lattice correction")
      ->check(CLI::IsMember({"midp", "cf", "none"}))
      ->capture_default_str();
  app->add_option("--c0", c.c0, "r* / Lugannani-Rice switch threshold")->capture_default_str();
  app->add_option("--out", c.out, "output path (or prefix for backtest)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-normalized quantile inference with saddlepoint tails"};
  app.name("snqesa");
  app.require_subcommand(1);

  Common pv_c, ci_c, sim_c, bt_c;
  std::string pv_file, pv_values, ci_file, ci_values, ci_method = "snqesa", sim_file, bt_file, model = "both";
  double t = NAN;
  int B = 1000;
  bool prices = false, no_ci = false;
  std::size_t window = 250;
  double ci_level = 0.95;
  std::size_t top_k = 10;
  std::vector<std::string> episodes;

  auto* pv = app.add_subcommand("pvalue", "directed and two-sided p-values at a threshold t");
  add_common(pv, pv_c, false);
  pv->add_option("file", pv_file, "data file (numbers separated by whitespace or commas)");
  pv->add_option("--values", pv_values, "inline comma-separated data");
  pv->add_option("--t", t, "threshold")->required();

  auto* ci = app.add_subcommand("ci", "confidence interval for the tau-quantile");
  add_common(ci, ci_c, true);
  ci->add_option("file", ci_file, "data file");
  ci->add_option("--values", ci_values, "inline comma-separated data");
  ci->add_option("--method", ci_method, "interval method")->capture_default_str();
  ci->add_option("--seed", ci_c.seed, "seed for resampling methods")->capture_default_str();
  ci->add_option("--B", B, "bootstrap replicates")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage study from a config file");
  sim->add_option("config", sim_file, "study config (key = value lines)")->required();
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--seed", sim_seed, "override the config seed");
  sim->add_option("--threads", sim_c.threads, "worker threads (0: logical cores)");
  sim->add_option("--out", sim_c.out, "CSV output path");

  auto* bt = app.add_subcommand("backtest", "rolling VaR forecasts and backtests");
  bt_c.tau = 0.99;
  bt_c.alpha = 0.05;
  add_common(bt, bt_c, false);
  bt->add_option("returns", bt_file, "CSV with header date,return (or date,price with --prices)")->required();
  bt->add_flag("--prices", prices, "input holds prices; convert to log-returns");
  bt->add_option("--window", window, "rolling window length m")->capture_default_str();
  bt->add_option("--ci-level", ci_level, "confidence level of the VaR intervals")->capture_default_str();
  bt->add_flag("--no-ci", no_ci, "skip the per-window intervals");
  bt->add_option("--model", model, "VaR model")->check(CLI::IsMember({"hs", "fhs", "both"}))->capture_default_str();
  bt->add_option("--episode", episodes, "stress episode label:start:end (repeatable)");
  bt->add_option("--top-k", top_k, "largest losses scored per episode")->capture_default_str();
  bt->add_option("--threads", bt_c.threads, "worker threads (0: logical cores)");
  bt->add_option("--seed", bt_c.seed, "unused; accepted for interface symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*pv) {
      const QuantileSpec spec = pv_c.spec();
      const Sample s(load_data(pv_file, pv_values));
      const ScoreStats st = score_stats(s, t, spec);
      const TailResult tr = directed_tail(st, spec.tau, s.n(), TailConfig::from_spec(spec));
      std::ostringstream o;
      emit(o, "n", static_cast<double>(s.n()));
      emit(o, "t", t);
      emit(o, "K", st.K);
      emit(o, "T", st.T);
      emit(o, "p_up", tr.p_up);
      emit(o, "p_down", tr.p_down);
      emit(o, "p_two", tr.p_two_sided);
      emit(o, "side", tr.up ? "up" : "down");
      emit(o, "branch", branch_name(tr.branch));
      emit(o, "lattice", lattice_name(tr.lattice_mode));
      emit(o, "r", tr.r);
      emit(o, "q_pm", tr.q_pm);
      emit(o, "w", tr.w);
      emit(o, "r_star", tr.has_r_star ? tr.r_star : NAN);
      emit(o, "solver_status", status_name(tr.solver_status));
      deliver(pv_c, o.str(), out);
      return 0;
    }
    if (*ci) {
      if (!is_known_method(ci_method)) throw InputError("unknown method '" + ci_method + "'");
      const QuantileSpec spec = ci_c.spec();
      const Sample s(load_data(ci_file, ci_values));
      ResamplePlan plan;
      plan.B = B;
      plan.seed = ci_c.seed;
      plan.validate();
      const IntervalResult r = compute_interval(ci_method, s, spec, plan);
      if (r.failed) {
        err << "snqesa: interval failed: " << r.diagnostic << '\n';
        return 3;
      }
      std::ostringstream o;
      emit(o, "method", r.method);
      emit(o, "level", r.level);
      emit(o, "lower", r.lower);
      emit(o, "upper", r.upper);
      emit(o, "length", r.length());
      emit(o, "open_lo", r.open_lo ? "1" : "0");
      emit(o, "open_hi", r.open_hi ? "1" : "0");
      emit(o, "residual_lo", r.tail_residual_lo);
      emit(o, "residual_hi", r.tail_residual_hi);
      emit(o, "diagnostic", r.diagnostic.empty() ? "none" : r.diagnostic);
      deliver(ci_c, o.str(), out);
      return 0;
    }
    if (*sim) {
      StudyConfig cfg = parse_study_config(read_file(sim_file));
      if (sim_seed) cfg.seed = *sim_seed;
      cfg.threads = sim_c.worker_count();
      cfg.validate();
      const SimReport rep = run_study(cfg);
      deliver(sim_c, rep.to_csv(), out);
      return 0;
    }
    if (*bt) {
      const ReturnSeries series = ReturnSeries::from_csv(read_file(bt_file), prices);
      RollingOptions opt;
      opt.with_ci = !no_ci;
      opt.ci_level = ci_level;
      opt.ridge_c = bt_c.ridge_c;
      opt.lattice = parse_lattice(bt_c.lattice);
      opt.c0 = bt_c.c0;
      opt.threads = bt_c.worker_count();
      std::vector<Episode> eps;
      for (const auto& e : episodes) eps.push_back(parse_episode(e));
      std::vector<VarModel> models;
      if (model == "both")
        models = {VarModel::hs, VarModel::fhs};
      else
        models = {parse_model(model)};

      const std::string prefix = bt_c.out.empty() ? "backtest" : bt_c.out;
      std::vector<BacktestReport> reports;
      std::vector<std::pair<VarModel, std::vector<EpisodeScore>>> scores;
      for (VarModel m : models) {
        const VaRPath path = rolling_var(series, m, window, bt_c.tau, opt);
        reports.push_back(backtest(path));
        std::string tag = model_name(m);
        for (char& ch : tag) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        write_file(prefix + "_path_" + tag + ".csv", path_csv(path));
        if (!eps.empty()) scores.emplace_back(m, extreme_event_scores(path, eps, top_k));
        if (path.degenerate_windows)
          err << "snqesa: " << model_name(m) << ": " << path.degenerate_windows
              << " window(s) with zero dispersion\n";
      }
      write_file(prefix + "_report.csv", report_csv(reports));
      write_file(prefix + "_stability.csv", stability_csv(reports));
      if (!eps.empty()) write_file(prefix + "_episodes.csv", episodes_csv(scores));
      out << report_csv(reports);
      return 0;
    }
  } catch (const InputError& e) {
    err << "snqesa: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "snqesa: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "snqesa: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace snq
