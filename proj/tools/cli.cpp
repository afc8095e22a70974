#include "cli.hpp"

#include "misport/backtest.hpp"
#include "misport/error.hpp"
#include "misport/json_io.hpp"
#include "misport/market_graph.hpp"
#include "misport/mis_qubo.hpp"
#include "misport/rng.hpp"
#include "misport/sb_solver.hpp"
#include "misport/timeseries.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace misport::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LogLevel { Quiet, Info, Debug };

class Log {
public:
  Log(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
  void info(const std::string& msg) const {
    if (level_ != LogLevel::Quiet) err_ << "[info] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ == LogLevel::Debug) err_ << "[debug] " << msg << '\n';
  }
  void warn(const std::string& msg) const {
    if (level_ != LogLevel::Quiet) err_ << "[warn] " << msg << '\n';
  }

private:
  std::ostream& err_;
  LogLevel level_;
};

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string log_level = "info";
};

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write '" + path + "'");
  body(f);
  if (!f) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

// ─── shared backtest flags ───────────────────────────────────────────────────

struct BacktestFlags {
  std::string prices;
  double theta = 0.23;
  std::string weighting = "ivw";
  double cost_bps = 10.0;
  std::size_t window_days = 756;
  int window_months = 0;
  std::string solver = "sb";
  std::size_t restarts = 10;
  std::string sb_config;
  std::size_t max_months = 0;
  double timeout_secs = 0.0;
  bool repair = false;
  bool drop_zero_vol = false;
};

void add_backtest_flags(CLI::App* sub, BacktestFlags& f, bool single_theta) {
  sub->add_option("--prices", f.prices, "price CSV (date,ticker...)")->required()->check(CLI::ExistingFile);
  if (single_theta) {
    sub->add_option("--theta", f.theta, "correlation threshold")->capture_default_str()->check(CLI::Range(-1.0, 1.0));
    sub->add_option("--weighting", f.weighting, "ew | ivw")
        ->capture_default_str()
        ->check(CLI::IsMember({"ew", "ivw"}));
  }
  sub->add_option("--cost-bps", f.cost_bps, "trading cost in basis points of turnover")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  auto* days = sub->add_option("--window-days", f.window_days, "trailing lookback in trading days")
                   ->capture_default_str()
                   ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  auto* months = sub->add_option("--window-months", f.window_months, "lookback in calendar months instead")
                     ->check(CLI::PositiveNumber);
  days->excludes(months);
  sub->add_option("--solver", f.solver, "sb | greedy | exact")
      ->capture_default_str()
      ->check(CLI::IsMember({"sb", "greedy", "exact"}));
  sub->add_option("--restarts", f.restarts, "SB restarts per month")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--sb-config", f.sb_config, "SB parameter JSON")->check(CLI::ExistingFile);
  sub->add_option("--max-months", f.max_months, "stop after this many holding months (0 = all)");
  sub->add_option("--timeout-secs", f.timeout_secs, "exact solver time limit per month (0 = none)")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--repair", f.repair, "greedily repair infeasible SB runs");
  sub->add_flag("--drop-zero-vol", f.drop_zero_vol, "drop zero-volatility names under IVW");
}

BacktestConfig make_config(const BacktestFlags& f, const Globals& g) {
  BacktestConfig c;
  c.theta = f.theta;
  c.weighting = *parse_weighting(f.weighting);
  c.cost_rate = f.cost_bps / 1e4;
  c.lookback_days = f.window_days;
  if (f.window_months > 0) {
    c.window_mode = WindowMode::CalendarMonths;
    c.lookback_months = f.window_months;
  }
  c.solver = *parse_solver_kind(f.solver);
  c.restarts = f.restarts;
  c.seed = g.seed;
  if (!f.sb_config.empty()) c.sb = load_sb_params(f.sb_config);
  if (f.max_months > 0) c.max_months = f.max_months;
  if (f.timeout_secs > 0) c.exact.timeout = std::chrono::duration<double>(f.timeout_secs);
  c.repair = f.repair;
  c.drop_zero_vol = f.drop_zero_vol;
  c.threads = g.threads;
  return c;
}

PricePanel load_panel(const std::string& path, const Log& log) {
  LoadedPrices lp = load_prices(path);
  for (const auto& w : lp.warnings) log.warn(w);
  log.info("loaded " + std::to_string(lp.panel.n_tickers()) + " tickers x " +
           std::to_string(lp.panel.n_dates()) + " dates from " + path);
  return std::move(lp.panel);
}

// ─── subcommands ─────────────────────────────────────────────────────────────

struct SynthFlags {
  std::size_t stocks = 20;
  std::size_t days = 1000;
  std::size_t factors = 3;
  std::string start = "2010-01-04";
  std::string out;
  std::string caps_out;
};

int cmd_synth(const SynthFlags& f, const Globals& g, std::ostream& out, const Log& log) {
  SynthConfig c;
  c.n_stocks = f.stocks;
  c.n_days = f.days;
  c.n_factors = f.factors;
  c.seed = g.seed;
  c.start_date = f.start;
  const PricePanel panel = synth_panel(c);
  save_prices(f.out, panel);
  out << "wrote " << panel.n_tickers() << " stocks x " << panel.n_dates() << " days to " << f.out << '\n';
  if (!f.caps_out.empty()) {
    const auto caps = synth_caps(panel, g.seed);
    write_file(f.caps_out, [&](std::ostream& o) { write_caps(o, caps); });
    out << "wrote " << caps.size() << " capitalisation records to " << f.caps_out << '\n';
  }
  log.debug("seed " + std::to_string(g.seed));
  return kOk;
}

struct GraphFlags {
  std::string prices;
  double theta = 0.23;
  std::size_t window_days = 0;
  std::string out;
};

int cmd_build_graph(const GraphFlags& f, const Globals& g, std::ostream& out, const Log& log) {
  const PricePanel panel = load_panel(f.prices, log);
  const ReturnMatrix returns = log_returns(panel);
  const std::size_t window = f.window_days == 0 ? returns.n_rows() : f.window_days;
  const CorrelationMatrix corr = correlation(returns, window, g.threads);
  for (std::size_t i = 0; i < corr.zero_variance.size(); ++i)
    if (corr.zero_variance[i]) log.warn(corr.tickers[i] + " has zero variance in the window");
  const MarketGraph graph = build_graph(corr, f.theta);
  save_edge_list(f.out, graph);
  out << "nodes " << graph.n_nodes() << " edges " << graph.edge_count() << " density "
      << (graph.n_nodes() < 2 ? std::string("undefined") : num(edge_density(graph))) << " theta " << f.theta
      << " window " << window << '\n';
  return kOk;
}

struct SolveFlags {
  std::string graph;
  std::string solver = "sb";
  std::size_t restarts = 10;
  std::string sb_config;
  std::size_t node_limit = 4096;
  double timeout_secs = 0.0;
  bool repair = false;
  std::string out;
};

int cmd_solve(const SolveFlags& f, const Globals& g, bool restarts_given, bool seed_given, std::ostream& out,
              const Log& log) {
  const MarketGraph graph = load_edge_list(f.graph);
  log.info("graph with " + std::to_string(graph.n_nodes()) + " nodes and " + std::to_string(graph.edge_count()) +
           " edges");
  MisSolution solution;
  switch (*parse_solver_kind(f.solver)) {
    case SolverKind::Exact: {
      ExactOptions o;
      o.node_limit = f.node_limit;
      if (f.timeout_secs > 0) o.timeout = std::chrono::duration<double>(f.timeout_secs);
      solution = solve_exact(graph, o);
      break;
    }
    case SolverKind::Greedy:
      solution = solve_greedy(graph);
      break;
    case SolverKind::Sb: {
      SbParams p = f.sb_config.empty() ? SbParams{} : load_sb_params(f.sb_config);
      if (restarts_given || f.sb_config.empty()) p.restarts = f.restarts;
      if (seed_given || f.sb_config.empty()) p.seed = g.seed;
      SbMisOptions o;
      o.repair = f.repair;
      o.threads = g.threads;
      const SbMisResult r = solve_mis_sb_detailed(graph, p, o);
      for (const auto& run : r.runs) {
        out << "run " << run.run_index << " seed " << run.seed_used;
        if (run.failed)
          out << " failed: " << run.failure << '\n';
        else
          out << " energy " << std::setprecision(12) << run.energy << " size " << run.decoded.size() << " feasible "
              << (verify(graph, run.decoded).feasible ? "yes" : "no") << '\n';
      }
      if (!r.best)
        fail(ErrorCode::Data, "no feasible solution in " + std::to_string(p.restarts) +
                                  " runs; try more restarts or --repair");
      solution = *r.best;
      break;
    }
  }
  const std::string text = solution_to_json(solution, graph).dump(2) + "\n";
  if (f.out.empty())
    out << text;
  else
    write_file(f.out, [&](std::ostream& o) { o << text; });
  out << "size " << solution.size() << " feasible " << (solution.feasible ? "yes" : "no") << '\n';
  return kOk;
}

int cmd_backtest(const BacktestFlags& f, const std::string& json_out, std::string csv_out, const Globals& g,
                 std::ostream& out, const Log& log) {
  const BacktestConfig config = make_config(f, g);
  config.validate();
  const PricePanel panel = load_panel(f.prices, log);
  const BacktestReport report = run_backtest(panel, config);
  for (const auto& w : report.warnings) log.warn(w);
  for (const auto& m : report.months)
    log.debug(m.formation_date + " size " + std::to_string(m.n_constituents) + " return " + num(m.ret));
  write_file(json_out, [&](std::ostream& o) { o << report_to_json(report).dump(2) << '\n'; });
  if (csv_out.empty()) {
    std::filesystem::path p(json_out);
    csv_out = (p.parent_path() / (p.stem().string() + "_cumulative.csv")).string();
  }
  write_file(csv_out, [&](std::ostream& o) { write_cumulative_csv(o, report); });
  out << "months " << report.months.size() << " final cumulative "
      << num(report.cumulative.empty() ? 0.0 : report.cumulative.back()) << '\n';
  if (report.summary)
    out << "annual return " << num(report.summary->annual_return) << " risk " << num(report.summary->annual_risk)
        << " sharpe " << num(report.summary->sharpe) << '\n';
  else
    out << "summary needs at least 12 months\n";
  out << "wrote " << json_out << " and " << csv_out << '\n';
  return kOk;
}

struct SweepFlags {
  double theta_min = 0.18;
  double theta_max = 0.36;
  double theta_step = 0.01;
  std::vector<std::string> weightings{"ew", "ivw"};
  std::string out;
};

int cmd_sweep(const BacktestFlags& bf, const SweepFlags& f, const Globals& g, std::ostream& out, const Log& log) {
  BacktestConfig config = make_config(bf, g);
  config.validate();
  const auto thetas = theta_grid(f.theta_min, f.theta_max, f.theta_step);
  std::vector<Weighting> ws;
  for (const auto& w : f.weightings) ws.push_back(*parse_weighting(w));
  const PricePanel panel = load_panel(bf.prices, log);
  log.info("sweeping " + std::to_string(thetas.size()) + " thresholds x " + std::to_string(ws.size()) +
           " weightings");
  const auto rows = sweep_theta(panel, config, thetas, ws);
  for (const auto& r : rows) {
    if (!r.error.empty()) log.warn("theta " + num(r.theta) + ": " + r.error);
    for (const auto& c : r.cells)
      if (!c.error.empty() && r.error.empty())
        log.warn("theta " + num(r.theta) + " " + std::string(to_string(c.weighting)) + ": " + c.error);
  }
  if (f.out.empty())
    write_sweep_csv(out, rows, ws);
  else {
    write_file(f.out, [&](std::ostream& o) { write_sweep_csv(o, rows, ws); });
    out << "wrote " << rows.size() << " rows to " << f.out << '\n';
  }
  return kOk;
}

struct BenchFlags {
  std::vector<std::size_t> sizes{20, 50, 100};
  std::size_t graphs = 10;
  double theta = 0.25;
  std::vector<std::string> solvers{"sb", "greedy", "exact"};
  double timeout_secs = 10.0;
  std::size_t restarts = 10;
  std::size_t days = 1000;
  std::size_t factors = 3;
  std::string out;
};

int cmd_bench(const BenchFlags& f, const Globals& g, std::ostream& out, const Log& log) {
  struct Acc {
    std::size_t completed = 0, timeouts = 0, failures = 0;
    double time = 0.0, size = 0.0, rel = 0.0;
  };
  std::ostringstream csv;
  csv << "size,solver,graphs,completed,timeouts,failures,mean_time_s,mean_size,mean_relative_size\n";
  for (std::size_t n : f.sizes) {
    std::map<std::string, Acc> acc;
    for (std::size_t k = 0; k < f.graphs; ++k) {
      SynthConfig sc;
      sc.n_stocks = n;
      sc.n_days = f.days;
      sc.n_factors = f.factors;
      sc.seed = stream_seed(g.seed, n * 100003 + k);
      const PricePanel panel = synth_panel(sc);
      const ReturnMatrix rets = log_returns(panel);
      const MarketGraph graph = build_graph(correlation(rets, rets.n_rows(), g.threads), f.theta);
      std::map<std::string, std::optional<std::pair<std::size_t, double>>> got;
      for (const auto& s : f.solvers) {
        const auto start = std::chrono::steady_clock::now();
        std::optional<MisSolution> sol;
        try {
          switch (*parse_solver_kind(s)) {
            case SolverKind::Exact: {
              ExactOptions o;
              o.node_limit = std::max<std::size_t>(n, 1);
              if (f.timeout_secs > 0) o.timeout = std::chrono::duration<double>(f.timeout_secs);
              sol = solve_exact(graph, o);
              break;
            }
            case SolverKind::Greedy:
              sol = solve_greedy(graph);
              break;
            case SolverKind::Sb: {
              SbParams p;
              p.restarts = f.restarts;
              p.seed = sc.seed;
              SbMisOptions o;
              o.threads = g.threads;
              sol = solve_mis_sb(graph, p, o);
              break;
            }
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Timeout) throw;
          ++acc[s].timeouts;
          log.info("n=" + std::to_string(n) + " graph " + std::to_string(k) + ": " + s + " timed out");
          got[s] = std::nullopt;
          continue;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!sol) {
          ++acc[s].failures;
          got[s] = std::nullopt;
          continue;
        }
        got[s] = std::make_pair(sol->size(), secs);
      }
      std::size_t best = 0;
      for (const auto& [s, r] : got)
        if (r) best = std::max(best, r->first);
      for (const auto& [s, r] : got) {
        if (!r) continue;
        Acc& a = acc[s];
        ++a.completed;
        a.time += r->second;
        a.size += static_cast<double>(r->first);
        a.rel += best == 0 ? 1.0 : static_cast<double>(r->first) / static_cast<double>(best);
      }
    }
    for (const auto& s : f.solvers) {
      const Acc& a = acc[s];
      const double c = static_cast<double>(a.completed);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      csv << n << ',' << s << ',' << f.graphs << ',' << a.completed << ',' << a.timeouts << ',' << a.failures << ','
          << num(a.completed ? a.time / c : nan) << ',' << num(a.completed ? a.size / c : nan) << ','
          << num(a.completed ? a.rel / c : nan) << '\n';
    }
  }
  if (f.out.empty())
    out << csv.str();
  else {
    write_file(f.out, [&](std::ostream& o) { o << csv.str(); });
    out << csv.str() << "wrote " << f.out << '\n';
  }
  return kOk;
}

struct DifrFlags {
  std::string caps;
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t months = 16;
  std::string out;
};

int cmd_difr(const BacktestFlags& bf, const DifrFlags& f, bool range_given, const Globals& g, std::ostream& out,
             const Log& log) {
  const BacktestConfig config = make_config(bf, g);
  config.validate();
  const PricePanel panel = load_panel(bf.prices, log);
  const auto caps = load_caps(f.caps);
  const BacktestReport report = run_backtest(panel, config);
  DifrPeriod period;
  if (range_given) {
    period = {f.first, f.last};
  } else {
    const std::size_t m = report.months.size();
    period = {m > f.months ? m - f.months : 0, m == 0 ? 0 : m - 1};
  }
  const auto rows = difr_analysis(panel, report, caps, period);
  out << "period " << report.months.at(period.first).formation_date << " .. " << report.months.at(period.last).date
      << " (" << period.last - period.first + 1 << " months)\n";
  if (f.out.empty())
    write_difr_csv(out, rows);
  else {
    write_file(f.out, [&](std::ostream& o) { write_difr_csv(o, rows); });
    out << "wrote " << rows.size() << " rows to " << f.out << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlation-diversified portfolios from maximum independent sets of market graphs", "misport"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--log-level", g.log_level, "quiet | info | debug")
      ->capture_default_str()
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  SynthFlags synth;
  auto* s_synth = app.add_subcommand("synth", "write a synthetic factor-model price panel");
  s_synth->add_option("--stocks", synth.stocks)->capture_default_str()->check(CLI::PositiveNumber);
  s_synth->add_option("--days", synth.days)->capture_default_str()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  s_synth->add_option("--factors", synth.factors)->capture_default_str();
  s_synth->add_option("--start-date", synth.start)->capture_default_str();
  s_synth->add_option("--out", synth.out, "price CSV path")->required();
  s_synth->add_option("--caps-out", synth.caps_out, "also write month-end capitalisations");

  GraphFlags graph;
  auto* s_graph = app.add_subcommand("build-graph", "threshold the return correlation matrix into an edge list");
  s_graph->add_option("--prices", graph.prices)->required()->check(CLI::ExistingFile);
  s_graph->add_option("--theta", graph.theta)->capture_default_str();
  s_graph->add_option("--window-days", graph.window_days, "trailing return rows (0 = all)")->capture_default_str();
  s_graph->add_option("--out", graph.out, "edge list path")->required();

  SolveFlags solve;
  auto* s_solve = app.add_subcommand("solve", "find an independent set of an edge-list graph");
  s_solve->add_option("--graph", solve.graph)->required()->check(CLI::ExistingFile);
  s_solve->add_option("--solver", solve.solver)->capture_default_str()->check(CLI::IsMember({"sb", "greedy", "exact"}));
  auto* solve_restarts =
      s_solve->add_option("--restarts", solve.restarts)->capture_default_str()->check(CLI::PositiveNumber);
  s_solve->add_option("--sb-config", solve.sb_config, "SB parameter JSON")->check(CLI::ExistingFile);
  s_solve->add_option("--node-limit", solve.node_limit, "largest graph the exact solver accepts")
      ->capture_default_str();
  s_solve->add_option("--timeout-secs", solve.timeout_secs, "exact solver time limit (0 = none)")
      ->check(CLI::NonNegativeNumber);
  s_solve->add_flag("--repair", solve.repair);
  s_solve->add_option("--out", solve.out, "solution JSON path (stdout when absent)");

  BacktestFlags bt;
  std::string bt_out, bt_csv;
  auto* s_bt = app.add_subcommand("backtest", "monthly-rebalance simulation of the MIS strategy");
  add_backtest_flags(s_bt, bt, true);
  s_bt->add_option("--out", bt_out, "report JSON path")->required();
  s_bt->add_option("--cumulative-out", bt_csv, "cumulative return CSV (default <out>_cumulative.csv)");

  BacktestFlags sw_bt;
  SweepFlags sweep;
  auto* s_sweep = app.add_subcommand("sweep", "backtest over a grid of thresholds and weightings");
  add_backtest_flags(s_sweep, sw_bt, false);
  s_sweep->add_option("--theta-min", sweep.theta_min)->capture_default_str()->check(CLI::Range(-1.0, 1.0));
  s_sweep->add_option("--theta-max", sweep.theta_max)->capture_default_str()->check(CLI::Range(-1.0, 1.0));
  s_sweep->add_option("--theta-step", sweep.theta_step)->capture_default_str()->check(CLI::PositiveNumber);
  s_sweep->add_option("--weightings", sweep.weightings)
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"ew", "ivw"}));
  s_sweep->add_option("--out", sweep.out, "CSV path (stdout when absent)");

  BenchFlags bench;
  auto* s_bench = app.add_subcommand("bench", "solver time and relative size on synthetic market graphs");
  s_bench->add_option("--sizes", bench.sizes)->delimiter(',')->capture_default_str()->check(CLI::PositiveNumber);
  s_bench->add_option("--graphs-per-size", bench.graphs)->capture_default_str()->check(CLI::PositiveNumber);
  s_bench->add_option("--theta", bench.theta)->capture_default_str();
  s_bench->add_option("--solvers", bench.solvers)
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"sb", "greedy", "exact"}));
  s_bench->add_option("--timeout-secs", bench.timeout_secs)->capture_default_str()->check(CLI::NonNegativeNumber);
  s_bench->add_option("--restarts", bench.restarts)->capture_default_str()->check(CLI::PositiveNumber);
  s_bench->add_option("--days", bench.days)->capture_default_str()->check(CLI::Range(std::size_t{3}, std::size_t{1} << 24));
  s_bench->add_option("--factors", bench.factors)->capture_default_str();
  s_bench->add_option("--out", bench.out, "CSV path");

  BacktestFlags df_bt;
  DifrFlags difr;
  auto* s_difr = app.add_subcommand("difr", "per-stock return difference against a cap-weighted benchmark");
  add_backtest_flags(s_difr, df_bt, true);
  s_difr->add_option("--caps", difr.caps, "capitalisation CSV (date,ticker,cap)")->required()->check(CLI::ExistingFile);
  auto* d_first = s_difr->add_option("--first", difr.first, "first report month index");
  auto* d_last = s_difr->add_option("--last", difr.last, "last report month index (inclusive)");
  d_first->needs(d_last);
  d_last->needs(d_first);
  s_difr->add_option("--months", difr.months, "trailing months when no range is given")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  s_difr->add_option("--out", difr.out, "CSV path (stdout when absent)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  const LogLevel level =
      g.log_level == "quiet" ? LogLevel::Quiet : (g.log_level == "debug" ? LogLevel::Debug : LogLevel::Info);
  const Log log(err, level);
  try {
    if (s_sweep->parsed() && sweep.theta_min > sweep.theta_max)
      throw UsageError("--theta-min must not exceed --theta-max");
    if (s_synth->parsed()) return cmd_synth(synth, g, out, log);
    if (s_graph->parsed()) return cmd_build_graph(graph, g, out, log);
    if (s_solve->parsed())
      return cmd_solve(solve, g, solve_restarts->count() > 0, seed_opt->count() > 0, out, log);
    if (s_bt->parsed()) return cmd_backtest(bt, bt_out, bt_csv, g, out, log);
    if (s_sweep->parsed()) return cmd_sweep(sw_bt, sweep, g, out, log);
    if (s_bench->parsed()) return cmd_bench(bench, g, out, log);
    if (s_difr->parsed()) return cmd_difr(df_bt, difr, d_first->count() > 0, g, out, log);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace misport::cli
