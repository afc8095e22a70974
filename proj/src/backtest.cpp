#include "misport/backtest.hpp"

#include "misport/dates.hpp"
#include "misport/error.hpp"
#include "misport/parallel.hpp"
#include "misport/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace misport {

std::string_view to_string(Weighting w) noexcept {
  return w == Weighting::Equal ? "ew" : "ivw";
}

std::optional<Weighting> parse_weighting(std::string_view text) noexcept {
  if (text == "ew" || text == "EW") return Weighting::Equal;
  if (text == "ivw" || text == "IVW") return Weighting::InverseVolatility;
  return std::nullopt;
}

WeightMap weights_ew(std::span<const std::string> tickers) {
  if (tickers.empty()) fail(ErrorCode::EmptyPortfolio, "cannot weight an empty selection");
  WeightMap w;
  const double each = 1.0 / static_cast<double>(tickers.size());
  for (const auto& t : tickers) w[t] = each;
  if (w.size() != tickers.size()) fail(ErrorCode::InvalidArgument, "duplicate ticker in selection");
  return w;
}

WeightMap weights_ivw(std::span<const std::string> tickers, std::span<const double> vols) {
  if (tickers.empty()) fail(ErrorCode::EmptyPortfolio, "cannot weight an empty selection");
  if (tickers.size() != vols.size())
    fail(ErrorCode::InvalidArgument, "ticker and volatility counts differ");
  for (std::size_t i = 0; i < vols.size(); ++i) {
    if (vols[i] == 0.0) fail(ErrorCode::ZeroVolatility, "zero volatility for " + tickers[i]);
    if (!(vols[i] > 0.0) || !std::isfinite(vols[i]))
      fail(ErrorCode::InvalidArgument, "invalid volatility for " + tickers[i]);
  }
  // Identical vols: skip the reciprocal sum so the result matches EW bit for bit.
  if (std::all_of(vols.begin(), vols.end(), [&](double v) { return v == vols[0]; }))
    return weights_ew(tickers);
  double total = 0.0;
  for (double v : vols) total += 1.0 / v;
  WeightMap w;
  for (std::size_t i = 0; i < tickers.size(); ++i) w[tickers[i]] = (1.0 / vols[i]) / total;
  if (w.size() != tickers.size()) fail(ErrorCode::InvalidArgument, "duplicate ticker in selection");
  return w;
}

namespace {

double price_of(const PriceMap& prices, const std::string& ticker, const std::string& month) {
  auto it = prices.find(ticker);
  if (it == prices.end())
    fail(ErrorCode::Data, "missing price for " + ticker + " at " + (month.empty() ? "rebalance" : month));
  if (!(it->second > 0.0) || !std::isfinite(it->second))
    fail(ErrorCode::Data, "non-positive price for " + ticker + " at " + month);
  return it->second;
}

}  // namespace

RebalanceResult rebalance(const Portfolio& current, const WeightMap& target, const PriceMap& prices,
                          double cost_rate) {
  if (!(cost_rate >= 0.0)) fail(ErrorCode::InvalidArgument, "cost_rate must be >= 0");
  if (!(current.value > 0.0)) fail(ErrorCode::Accounting, "portfolio value must be positive");
  for (const auto& [t, w] : current.holdings) price_of(prices, t, current.month);

  const double v = current.value;
  double turnover = 0.0;
  for (const auto& [t, w] : target) {
    auto it = current.holdings.find(t);
    const double before = it == current.holdings.end() ? 0.0 : it->second * v;
    turnover += std::abs(w * v - before);
  }
  for (const auto& [t, w] : current.holdings)
    if (!target.contains(t)) turnover += w * v;

  RebalanceResult out;
  out.turnover = turnover;
  out.cost = cost_rate * turnover;
  out.portfolio.month = current.month;
  out.portfolio.value = v - out.cost;
  if (!(out.portfolio.value > 0.0)) fail(ErrorCode::Accounting, "trading cost exceeds portfolio value");
  out.portfolio.holdings = target;
  for (const auto& [t, w] : target)
    out.portfolio.shares[t] = w * out.portfolio.value / price_of(prices, t, current.month);
  return out;
}

double monthly_return(double prev_value, double value) {
  if (!(prev_value > 0.0)) fail(ErrorCode::Accounting, "previous value must be positive");
  return value / prev_value - 1.0;
}

Summary summarize(std::span<const double> r) {
  if (r.size() < 12)
    fail(ErrorCode::InsufficientData, "need at least 12 monthly returns, got " + std::to_string(r.size()));
  const double n = static_cast<double>(r.size());
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
  double sd = 0.0;
  // A constant series must give exactly zero risk; the mean of equal values
  // is not always bitwise equal to them.
  if (!std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; })) {
    double ss = 0.0;
    for (double x : r) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / n);
  }
  Summary s;
  s.months = r.size();
  s.annual_return = 12.0 * (sd == 0.0 ? r[0] : mean);
  s.annual_risk = std::sqrt(12.0) * sd;
  if (s.annual_risk > 0.0)
    s.sharpe = s.annual_return / s.annual_risk;
  else if (s.annual_return > 0.0)
    s.sharpe = std::numeric_limits<double>::infinity();
  else if (s.annual_return < 0.0)
    s.sharpe = -std::numeric_limits<double>::infinity();
  else
    s.sharpe = std::numeric_limits<double>::quiet_NaN();
  return s;
}

void BacktestConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, "backtest config: " + what); };
  if (!(theta >= -1.0 && theta <= 1.0)) bad("theta must be in [-1, 1]");
  if (!(cost_rate >= 0.0) || !std::isfinite(cost_rate)) bad("cost_rate must be >= 0");
  if (window_mode == WindowMode::TradingDays && lookback_days < 2) bad("lookback_days must be >= 2");
  if (window_mode == WindowMode::CalendarMonths && lookback_months < 1) bad("lookback_months must be >= 1");
  if (restarts < 1) bad("restarts must be >= 1");
  if (!(initial_value > 0.0) || !std::isfinite(initial_value)) bad("initial_value must be > 0");
  if (max_months && *max_months < 1) bad("max_months must be >= 1");
  SbParams p = sb;
  p.restarts = restarts;
  p.validate();
}

std::vector<RebalancePoint> rebalance_schedule(const PricePanel& panel, const BacktestConfig& config) {
  config.validate();
  const std::size_t n = panel.n_dates();
  std::vector<RebalancePoint> points;
  for (std::size_t b = 0; b < n; ++b) {
    const bool month_end = b + 1 == n || dates::month_key(panel.dates[b]) != dates::month_key(panel.dates[b + 1]);
    if (!month_end) continue;
    RebalancePoint pt;
    pt.date_index = b;
    if (config.window_mode == WindowMode::TradingDays) {
      const std::size_t t = config.lookback_days;
      if (b < t + 1) continue;
      pt.window = {b - 1 - t, b - 1};
    } else {
      const std::string start = dates::add_months(panel.dates[b], -config.lookback_months);
      if (panel.dates.front() > start || b < 1) continue;
      // return row r covers dates[r] -> dates[r + 1]
      std::size_t lo = 0;
      while (lo + 1 < b && panel.dates[lo + 1] <= start) ++lo;
      pt.window = {lo, b - 1};
      if (pt.window.end < pt.window.begin + 2) continue;
    }
    points.push_back(pt);
  }
  if (config.max_months && points.size() > *config.max_months + 1) points.resize(*config.max_months + 1);
  if (points.size() < 3)
    fail(ErrorCode::InsufficientData, "panel covers " +
                                          std::to_string(points.size() < 1 ? 0 : points.size() - 1) +
                                          " evaluation months after the lookback; need at least 2");
  return points;
}

namespace {

MisSolution run_solver(const MarketGraph& graph, const BacktestConfig& config, std::size_t month,
                       unsigned threads, bool& found) {
  found = true;
  switch (config.solver) {
    case SolverKind::Exact:
      return solve_exact(graph, config.exact);
    case SolverKind::Greedy:
      return solve_greedy(graph);
    case SolverKind::Sb: {
      SbParams p = config.sb;
      p.restarts = config.restarts;
      p.seed = stream_seed(config.seed, month);
      SbMisOptions opts;
      opts.repair = config.repair;
      opts.threads = threads;
      auto best = solve_mis_sb(graph, p, opts);
      if (!best) {
        found = false;
        return {};
      }
      return *best;
    }
  }
  found = false;
  return {};
}

}  // namespace

std::vector<MonthSignal> compute_signals(const PricePanel& panel, const BacktestConfig& config) {
  panel.validate();
  const auto points = rebalance_schedule(panel, config);
  const ReturnMatrix returns = log_returns(panel);
  std::vector<MonthSignal> out;
  out.reserve(points.size() - 1);
  for (std::size_t m = 0; m + 1 < points.size(); ++m) {
    MonthSignal s;
    s.point = points[m];
    s.end_index = points[m + 1].date_index;
    const CorrelationMatrix corr = correlation(returns, s.point.window, config.threads);
    s.vols = volatility(returns, s.point.window);
    const MarketGraph graph = build_graph(corr, config.theta);
    s.edge_density = graph.n_nodes() < 2 ? std::numeric_limits<double>::quiet_NaN() : edge_density(graph);
    s.degrees.resize(graph.n_nodes());
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) s.degrees[i] = graph.degree(i);
    bool found = false;
    MisSolution sol = run_solver(graph, config, m, config.threads, found);
    if (found && sol.feasible && !sol.nodes.empty()) s.selection = std::move(sol);
    out.push_back(std::move(s));
  }
  return out;
}

BacktestReport simulate(const PricePanel& panel, std::span<const MonthSignal> signals,
                        const BacktestConfig& config) {
  config.validate();
  BacktestReport report;
  report.config = config;
  report.tickers = panel.tickers;

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < panel.n_tickers(); ++i) column[panel.tickers[i]] = i;
  auto prices_at = [&](std::size_t row, const WeightMap& a, const WeightMap& b) {
    PriceMap out;
    for (const WeightMap* m : {&a, &b})
      for (const auto& [t, w] : *m) out[t] = panel.prices(row, column.at(t));
    return out;
  };

  Portfolio current;
  current.value = config.initial_value;
  double cumulative = 1.0;
  for (const MonthSignal& sig : signals) {
    const std::size_t f = sig.point.date_index;
    const std::size_t e = sig.end_index;
    if (f >= panel.n_dates() || e >= panel.n_dates() || e <= f)
      fail(ErrorCode::InvalidArgument, "signal dates outside the panel");
    MonthRecord rec;
    rec.formation_date = panel.dates[f];
    rec.date = panel.dates[e];
    rec.formation_index = f;
    rec.date_index = e;
    rec.edge_density = sig.edge_density;
    rec.degrees = sig.degrees;
    rec.value_before = current.value;
    current.month = rec.formation_date;

    std::optional<WeightMap> target;
    if (sig.selection) {
      std::vector<std::string> names;
      std::vector<double> vols;
      for (std::size_t node : sig.selection->nodes) {
        if (config.weighting == Weighting::InverseVolatility && config.drop_zero_vol && sig.vols[node] == 0.0) {
          report.warnings.push_back(rec.formation_date + ": dropped zero-volatility " + panel.tickers[node]);
          continue;
        }
        names.push_back(panel.tickers[node]);
        vols.push_back(sig.vols[node]);
      }
      if (!names.empty()) {
        target = config.weighting == Weighting::Equal ? weights_ew(names) : weights_ivw(names, vols);
        rec.mis_size = sig.selection->size();
      }
    }

    if (target) {
      const PriceMap px = prices_at(f, current.holdings, *target);
      RebalanceResult rr = rebalance(current, *target, px, config.cost_rate);
      rec.turnover = rr.turnover;
      rec.cost = rr.cost;
      current = std::move(rr.portfolio);
    } else {
      rec.feasible = false;
      report.warnings.push_back(rec.formation_date + ": no feasible selection, holding previous portfolio");
    }
    rec.value_after = current.value;
    rec.holdings = current.holdings;
    rec.n_constituents = current.holdings.size();

    // Value each holding forward; a fully cash portfolio stays flat.
    double growth = 1.0;
    WeightMap drifted;
    if (!current.holdings.empty()) {
      const PriceMap p0 = prices_at(f, current.holdings, {});
      const PriceMap p1 = prices_at(e, current.holdings, {});
      growth = 0.0;
      for (const auto& [t, w] : current.holdings) {
        const double rel = price_of(p1, t, rec.date) / price_of(p0, t, rec.formation_date);
        drifted[t] = w * rel;
        growth += w * rel;
      }
      for (auto& [t, w] : drifted) w /= growth;
    }
    rec.ret = (rec.value_after / rec.value_before) * growth - 1.0;
    rec.value_end = rec.value_after * growth;
    current.holdings = std::move(drifted);
    current.value = rec.value_end;

    cumulative *= 1.0 + rec.ret;
    report.monthly_returns.push_back(rec.ret);
    report.cumulative.push_back(cumulative - 1.0);
    report.months.push_back(std::move(rec));
  }
  if (report.monthly_returns.size() >= 12) report.summary = summarize(report.monthly_returns);
  return report;
}

BacktestReport run_backtest(const PricePanel& panel, const BacktestConfig& config) {
  const auto signals = compute_signals(panel, config);
  return simulate(panel, signals, config);
}

// ─── Sweep ───────────────────────────────────────────────────────────────────

std::vector<double> theta_grid(double min, double max, double step) {
  if (!std::isfinite(min) || !std::isfinite(max) || max < min)
    fail(ErrorCode::InvalidArgument, "theta range must satisfy min <= max");
  if (min == max) return {min};
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "theta step must be > 0");
  const auto count = static_cast<std::size_t>(std::llround((max - min) / step)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::round((min + static_cast<double>(i) * step) * 1e9) / 1e9;
  return out;
}

std::vector<SweepRow> sweep_theta(const PricePanel& panel, const BacktestConfig& base,
                                  std::span<const double> thetas, std::span<const Weighting> weightings) {
  if (thetas.empty() || weightings.empty())
    fail(ErrorCode::InvalidArgument, "sweep needs at least one theta and one weighting");
  panel.validate();
  std::vector<SweepRow> rows(thetas.size());
  const unsigned outer = std::min<unsigned>(resolve_threads(base.threads), static_cast<unsigned>(thetas.size()));
  parallel_for(thetas.size(), outer, [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.theta = thetas[k];
    for (Weighting w : weightings) row.cells.push_back({w, std::nullopt, {}});
    BacktestConfig cfg = base;
    cfg.theta = thetas[k];
    cfg.seed = stream_seed(base.seed, k);
    cfg.threads = outer > 1 ? 1 : base.threads;
    std::vector<MonthSignal> signals;
    try {
      signals = compute_signals(panel, cfg);
    } catch (const std::exception& e) {
      row.error = e.what();
      for (auto& c : row.cells) c.error = e.what();
      return;
    }
    double dmax = -std::numeric_limits<double>::infinity(), dmin = std::numeric_limits<double>::infinity();
    double dsum = 0.0;
    std::size_t dcount = 0;
    std::vector<double> sizes;
    for (const auto& s : signals) {
      if (!std::isnan(s.edge_density)) {
        dmax = std::max(dmax, s.edge_density);
        dmin = std::min(dmin, s.edge_density);
        dsum += s.edge_density;
        ++dcount;
      }
      sizes.push_back(s.selection ? static_cast<double>(s.selection->size()) : 0.0);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.density_max = dcount ? dmax : nan;
    row.density_min = dcount ? dmin : nan;
    row.density_avg = dcount ? dsum / static_cast<double>(dcount) : nan;
    row.size_max = static_cast<std::size_t>(*std::max_element(sizes.begin(), sizes.end()));
    row.size_min = static_cast<std::size_t>(*std::min_element(sizes.begin(), sizes.end()));
    row.size_avg = std::accumulate(sizes.begin(), sizes.end(), 0.0) / static_cast<double>(sizes.size());
    double ss = 0.0;
    for (double x : sizes) ss += (x - row.size_avg) * (x - row.size_avg);
    row.size_sd = std::sqrt(ss / static_cast<double>(sizes.size()));

    for (auto& cell : row.cells) {
      try {
        BacktestConfig wc = cfg;
        wc.weighting = cell.weighting;
        const BacktestReport rep = simulate(panel, signals, wc);
        if (!rep.summary)
          fail(ErrorCode::InsufficientData, "fewer than 12 months for a summary");
        cell.summary = rep.summary;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  });
  return rows;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, std::span<const Weighting> weightings) {
  out << "theta,density_max,density_min,density_avg,size_max,size_min,size_avg,size_sd";
  for (Weighting w : weightings) {
    const std::string p(to_string(w));
    out << ',' << p << "_return," << p << "_risk," << p << "_sharpe";
  }
  out << '\n';
  for (const auto& row : rows) {
    out << fmt(row.theta) << ',' << fmt(row.density_max) << ',' << fmt(row.density_min) << ','
        << fmt(row.density_avg) << ',' << row.size_max << ',' << row.size_min << ',' << fmt(row.size_avg)
        << ',' << fmt(row.size_sd);
    for (std::size_t k = 0; k < weightings.size(); ++k) {
      const SweepCell* cell = k < row.cells.size() ? &row.cells[k] : nullptr;
      if (cell && cell->summary)
        out << ',' << fmt(cell->summary->annual_return) << ',' << fmt(cell->summary->annual_risk) << ','
            << fmt(cell->summary->sharpe);
      else
        out << ",,,";
    }
    out << '\n';
  }
}

// ─── Capitalisations and DIFR ────────────────────────────────────────────────

std::vector<CapRecord> parse_caps(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorCode::Parse, source + ":" + std::to_string(lineno) + ": " + what);
  };
  if (!std::getline(in, line)) {
    lineno = 1;
    bad("empty capitalisation file");
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,ticker,cap") bad("expected header date,ticker,cap");
  std::vector<CapRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) bad("expected 3 fields");
    CapRecord r;
    r.date = line.substr(0, c1);
    r.ticker = line.substr(c1 + 1, c2 - c1 - 1);
    if (!dates::parse_iso(r.date)) bad("invalid date '" + r.date + "'");
    if (r.ticker.empty()) bad("empty ticker");
    const char* first = line.data() + c2 + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, r.cap);
    if (ec != std::errc() || ptr != last || !std::isfinite(r.cap) || r.cap < 0.0)
      bad("invalid capitalisation '" + std::string(first, last) + "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CapRecord> load_caps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return parse_caps(in, path.string());
}

void write_caps(std::ostream& out, std::span<const CapRecord> caps) {
  out << "date,ticker,cap\n";
  for (const auto& r : caps) out << r.date << ',' << r.ticker << ',' << fmt(r.cap) << '\n';
}

std::vector<CapRecord> synth_caps(const PricePanel& panel, std::uint64_t seed) {
  panel.validate();
  SplitMix64 rng(stream_seed(seed, 0xCA95));
  std::vector<double> shares(panel.n_tickers());
  for (double& s : shares) s = std::exp(rng.uniform(std::log(1e6), std::log(1e8)));
  std::vector<CapRecord> out;
  for (std::size_t t = 0; t < panel.n_dates(); ++t) {
    const bool month_end =
        t + 1 == panel.n_dates() || dates::month_key(panel.dates[t]) != dates::month_key(panel.dates[t + 1]);
    if (!month_end) continue;
    for (std::size_t i = 0; i < panel.n_tickers(); ++i)
      out.push_back({panel.dates[t], panel.tickers[i], panel.prices(t, i) * shares[i]});
  }
  return out;
}

namespace {

std::vector<double> caps_at(std::span<const CapRecord> caps, std::span<const std::string> tickers,
                            const std::string& date) {
  std::map<std::string, std::pair<std::string, double>> latest;
  for (const auto& r : caps) {
    if (r.date > date) continue;
    auto it = latest.find(r.ticker);
    if (it == latest.end() || it->second.first <= r.date) latest[r.ticker] = {r.date, r.cap};
  }
  std::vector<double> out(tickers.size());
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    auto it = latest.find(tickers[i]);
    if (it == latest.end()) fail(ErrorCode::Data, "no capitalisation for " + tickers[i] + " on or before " + date);
    out[i] = it->second.second;
  }
  return out;
}

}  // namespace

std::vector<double> benchmark_weights(std::span<const CapRecord> caps, std::span<const std::string> tickers,
                                      const std::string& date) {
  std::vector<double> w = caps_at(caps, tickers, date);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorCode::Data, "total capitalisation is zero on " + date);
  for (double& x : w) x /= total;
  return w;
}

std::vector<DifrRow> difr_table(const DifrInputs& in) {
  const std::size_t n = in.tickers.size();
  const std::size_t t = in.stock_returns.rows();
  auto check = [&](const Matrix& m, const char* name, bool optional) {
    if (optional && m.rows() == 0) return;
    if (m.rows() != t || m.cols() != n)
      fail(ErrorCode::InvalidArgument, std::string("DIFR input '") + name + "' has the wrong shape");
  };
  if (in.stock_returns.cols() != n) fail(ErrorCode::InvalidArgument, "DIFR returns have the wrong shape");
  check(in.strategy_weights, "strategy_weights", false);
  check(in.benchmark_weights, "benchmark_weights", false);
  check(in.degrees, "degrees", true);
  check(in.caps, "caps", true);

  std::vector<DifrRow> rows(n);
  const double months = static_cast<double>(std::max<std::size_t>(t, 1));
  for (std::size_t i = 0; i < n; ++i) {
    DifrRow& r = rows[i];
    r.ticker = in.tickers[i];
    for (std::size_t m = 0; m < t; ++m) {
      const double ret = in.stock_returns(m, i);
      r.strategy_return += ret * in.strategy_weights(m, i);
      r.benchmark_return += ret * in.benchmark_weights(m, i);
      r.avg_strategy_weight += in.strategy_weights(m, i);
      r.avg_benchmark_weight += in.benchmark_weights(m, i);
      if (in.degrees.rows()) r.avg_degree += in.degrees(m, i);
      if (in.caps.rows()) r.avg_cap += in.caps(m, i);
    }
    r.difr = r.strategy_return - r.benchmark_return;
    r.avg_strategy_weight /= months;
    r.avg_benchmark_weight /= months;
    r.avg_degree /= months;
    r.avg_cap /= months;
  }
  std::sort(rows.begin(), rows.end(), [](const DifrRow& a, const DifrRow& b) {
    if (a.difr != b.difr) return a.difr > b.difr;
    return a.ticker < b.ticker;
  });
  for (std::size_t i = 0; i < n; ++i) rows[i].rank = i + 1;
  return rows;
}

DifrInputs difr_inputs(const PricePanel& panel, const BacktestReport& report, std::span<const CapRecord> caps,
                       DifrPeriod period) {
  if (report.months.empty() || period.first > period.last || period.last >= report.months.size())
    fail(ErrorCode::Range, "DIFR period [" + std::to_string(period.first) + ", " + std::to_string(period.last) +
                               "] is outside the report's " + std::to_string(report.months.size()) + " months");
  const std::size_t n = panel.n_tickers();
  const std::size_t t = period.last - period.first + 1;
  DifrInputs in;
  in.tickers = panel.tickers;
  in.stock_returns = Matrix(t, n);
  in.strategy_weights = Matrix(t, n);
  in.benchmark_weights = Matrix(t, n);
  in.degrees = Matrix(t, n);
  in.caps = Matrix(t, n);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < n; ++i) column[panel.tickers[i]] = i;
  for (std::size_t m = 0; m < t; ++m) {
    const MonthRecord& rec = report.months[period.first + m];
    if (rec.date_index >= panel.n_dates() || rec.formation_index >= rec.date_index)
      fail(ErrorCode::Range, "report month " + rec.formation_date + " does not match the panel");
    for (std::size_t i = 0; i < n; ++i)
      in.stock_returns(m, i) = panel.prices(rec.date_index, i) / panel.prices(rec.formation_index, i) - 1.0;
    for (const auto& [tk, w] : rec.holdings) {
      auto it = column.find(tk);
      if (it == column.end()) fail(ErrorCode::Data, "held ticker " + tk + " is not in the panel");
      in.strategy_weights(m, it->second) = w;
    }
    const auto c = caps_at(caps, panel.tickers, rec.formation_date);
    const double total = std::accumulate(c.begin(), c.end(), 0.0);
    if (!(total > 0.0)) fail(ErrorCode::Data, "total capitalisation is zero on " + rec.formation_date);
    for (std::size_t i = 0; i < n; ++i) {
      in.caps(m, i) = c[i];
      in.benchmark_weights(m, i) = c[i] / total;
      if (i < rec.degrees.size()) in.degrees(m, i) = static_cast<double>(rec.degrees[i]);
    }
  }
  return in;
}

std::vector<DifrRow> difr_analysis(const PricePanel& panel, const BacktestReport& report,
                                   std::span<const CapRecord> caps, DifrPeriod period) {
  return difr_table(difr_inputs(panel, report, caps, period));
}

void write_difr_csv(std::ostream& out, std::span<const DifrRow> rows) {
  out << "rank,ticker,difr,strategy_return,benchmark_return,avg_strategy_weight,avg_benchmark_weight,"
         "avg_degree,avg_cap\n";
  for (const auto& r : rows)
    out << r.rank << ',' << r.ticker << ',' << fmt(r.difr) << ',' << fmt(r.strategy_return) << ','
        << fmt(r.benchmark_return) << ',' << fmt(r.avg_strategy_weight) << ',' << fmt(r.avg_benchmark_weight)
        << ',' << fmt(r.avg_degree) << ',' << fmt(r.avg_cap) << '\n';
}

}  // namespace misport
