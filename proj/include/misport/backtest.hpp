#pragma once

#include "misport/market_graph.hpp"
#include "misport/mis_qubo.hpp"
#include "misport/sb_solver.hpp"
#include "misport/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace misport {

using WeightMap = std::map<std::string, double>;
using PriceMap = std::map<std::string, double>;

enum class Weighting { Equal, InverseVolatility };
enum class WindowMode { TradingDays, CalendarMonths };

std::string_view to_string(Weighting w) noexcept;
std::optional<Weighting> parse_weighting(std::string_view text) noexcept;

// ─── Weights and trading ─────────────────────────────────────────────────────

/// w_i = 1/N. Throws Error(EmptyPortfolio) for an empty selection.
WeightMap weights_ew(std::span<const std::string> tickers);

/// w_i = (1/v_i) / sum_k (1/v_k). Equal volatilities give exactly the EW
/// weights. Throws Error(ZeroVolatility) naming the first offending ticker.
WeightMap weights_ivw(std::span<const std::string> tickers, std::span<const double> vols);

struct Portfolio {
  std::string month;
  WeightMap holdings;  // fraction of value per ticker, all > 0
  std::map<std::string, double> shares;
  double value = 0.0;
};

struct RebalanceResult {
  Portfolio portfolio;
  double turnover = 0.0;  // buy amount + |sell amount|
  double cost = 0.0;
};

/// Moves `current` (already valued at today's prices) to `target` weights.
/// Trades are sized on the pre-cost value; the cost is cost_rate * turnover
/// and the new value is current.value - cost. Fractional shares.
RebalanceResult rebalance(const Portfolio& current, const WeightMap& target, const PriceMap& prices,
                          double cost_rate);

/// value / prev_value - 1. Throws Error(Accounting) when prev_value <= 0.
double monthly_return(double prev_value, double value);

// ─── Performance summary ─────────────────────────────────────────────────────

struct Summary {
  double annual_return = 0.0;  // 12 * mean monthly return
  double annual_risk = 0.0;    // sqrt(12) * population std of monthly returns
  double sharpe = 0.0;         // +/-inf for zero risk, NaN when undefined
  std::size_t months = 0;
};

/// Throws Error(InsufficientData) for fewer than 12 returns.
Summary summarize(std::span<const double> monthly_returns);

// ─── Backtest ────────────────────────────────────────────────────────────────

struct BacktestConfig {
  double theta = 0.23;
  Weighting weighting = Weighting::InverseVolatility;
  double cost_rate = 0.001;
  std::size_t lookback_days = 756;
  WindowMode window_mode = WindowMode::TradingDays;
  int lookback_months = 36;
  SolverKind solver = SolverKind::Sb;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  SbParams sb;  // restarts and seed above take precedence
  ExactOptions exact{.node_limit = 4096, .timeout = std::nullopt};
  bool repair = false;
  bool drop_zero_vol = false;
  double initial_value = 1.0;
  std::optional<std::size_t> max_months;
  unsigned threads = 0;

  void validate() const;
};

/// One rebalance point: trades at the close of panel date `date_index` using
/// return rows in `window`, all dated strictly before it.
struct RebalancePoint {
  std::size_t date_index = 0;
  RowWindow window;
};

/// Month-end rebalance points with enough history, in date order. The last
/// point is the final valuation date.
std::vector<RebalancePoint> rebalance_schedule(const PricePanel& panel, const BacktestConfig& config);

/// Per-month selection result, independent of the weighting.
struct MonthSignal {
  RebalancePoint point;
  std::size_t end_index = 0;  // panel date closing the holding month
  double edge_density = 0.0;  // NaN for a single-node universe
  std::optional<MisSolution> selection;
  std::vector<double> vols;
  std::vector<std::size_t> degrees;
};

std::vector<MonthSignal> compute_signals(const PricePanel& panel, const BacktestConfig& config);

struct MonthRecord {
  std::string formation_date;
  std::string date;  // end of the holding month
  std::size_t formation_index = 0;
  std::size_t date_index = 0;
  double ret = 0.0;
  std::size_t n_constituents = 0;
  std::size_t mis_size = 0;
  double edge_density = 0.0;
  double turnover = 0.0;
  double cost = 0.0;
  bool feasible = true;  // false: no feasible selection, previous holdings kept
  double value_before = 0.0;  // pre-trade value at formation
  double value_after = 0.0;   // post-cost value at formation
  double value_end = 0.0;     // value at `date`
  WeightMap holdings;         // target weights set at formation
  std::vector<std::size_t> degrees;
};

struct BacktestReport {
  BacktestConfig config;
  std::vector<std::string> tickers;
  std::vector<MonthRecord> months;
  std::vector<double> monthly_returns;
  std::vector<double> cumulative;  // prod(1 + R) - 1
  std::optional<Summary> summary;  // present with >= 12 months
  std::vector<std::string> warnings;
};

BacktestReport simulate(const PricePanel& panel, std::span<const MonthSignal> signals,
                        const BacktestConfig& config);

BacktestReport run_backtest(const PricePanel& panel, const BacktestConfig& config);

// ─── Threshold sweep ─────────────────────────────────────────────────────────

struct SweepCell {
  Weighting weighting = Weighting::Equal;
  std::optional<Summary> summary;
  std::string error;
};

struct SweepRow {
  double theta = 0.0;
  double density_max = 0.0;
  double density_min = 0.0;
  double density_avg = 0.0;
  std::size_t size_max = 0;
  std::size_t size_min = 0;
  double size_avg = 0.0;
  double size_sd = 0.0;
  std::vector<SweepCell> cells;  // one per weighting, in request order
  std::string error;
};

/// theta_i = min + i * step for i = 0..round((max - min) / step).
std::vector<double> theta_grid(double min, double max, double step);

/// One backtest per (theta, weighting). Selections are shared across
/// weightings of the same theta; each theta draws the solver seed from
/// stream (config.seed, theta index).
std::vector<SweepRow> sweep_theta(const PricePanel& panel, const BacktestConfig& base,
                                  std::span<const double> thetas, std::span<const Weighting> weightings);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows,
                     std::span<const Weighting> weightings);

// ─── DIFR ────────────────────────────────────────────────────────────────────

struct CapRecord {
  std::string date;
  std::string ticker;
  double cap = 0.0;
};

/// Capitalisation CSV: header `date,ticker,cap`.
std::vector<CapRecord> parse_caps(std::istream& in, const std::string& source = "<stream>");
std::vector<CapRecord> load_caps(const std::filesystem::path& path);
void write_caps(std::ostream& out, std::span<const CapRecord> caps);

/// Month-end capitalisations price * shares for a synthetic panel, with
/// log-uniform share counts drawn from `seed`.
std::vector<CapRecord> synth_caps(const PricePanel& panel, std::uint64_t seed);

/// Cap-weighted benchmark weights over `tickers` using each ticker's latest
/// capitalisation on or before `date`. Throws Error(Data) when one is missing.
std::vector<double> benchmark_weights(std::span<const CapRecord> caps,
                                      std::span<const std::string> tickers, const std::string& date);

struct DifrInputs {
  std::vector<std::string> tickers;
  Matrix stock_returns;      // [month x ticker] simple monthly returns
  Matrix strategy_weights;   // [month x ticker]
  Matrix benchmark_weights;  // [month x ticker]
  Matrix degrees;            // [month x ticker], optional (may be empty)
  Matrix caps;               // [month x ticker], optional (may be empty)
};

struct DifrRow {
  std::size_t rank = 0;  // 1 = largest DIFR
  std::string ticker;
  double difr = 0.0;
  double strategy_return = 0.0;
  double benchmark_return = 0.0;
  double avg_strategy_weight = 0.0;
  double avg_benchmark_weight = 0.0;
  double avg_degree = 0.0;
  double avg_cap = 0.0;
};

/// DIFR_i = sum_t R_i(t) w^S_i(t) - sum_t R_i(t) w^B_i(t), sorted descending
/// (ties by ticker).
std::vector<DifrRow> difr_table(const DifrInputs& inputs);

/// Inclusive range of report month indices.
struct DifrPeriod {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Assembles DifrInputs from a report: R_i(t) is the stock's return over
/// holding month t and both weight sets are fixed at its formation date.
/// Throws Error(Range) when the period is outside the report.
DifrInputs difr_inputs(const PricePanel& panel, const BacktestReport& report,
                       std::span<const CapRecord> caps, DifrPeriod period);

std::vector<DifrRow> difr_analysis(const PricePanel& panel, const BacktestReport& report,
                                   std::span<const CapRecord> caps, DifrPeriod period);

void write_difr_csv(std::ostream& out, std::span<const DifrRow> rows);

}  // namespace misport
