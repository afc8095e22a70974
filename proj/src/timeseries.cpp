#include "misport/timeseries.hpp"

#include "misport/dates.hpp"
#include "misport/error.hpp"
#include "misport/parallel.hpp"
#include "misport/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace misport {

// ─── PricePanel ──────────────────────────────────────────────────────────────

void PricePanel::validate() const {
  if (prices.rows() != dates.size() || prices.cols() != tickers.size())
    fail(ErrorCode::Data, "price matrix is " + std::to_string(prices.rows()) + "x" +
                              std::to_string(prices.cols()) + " but panel has " +
                              std::to_string(dates.size()) + " dates and " +
                              std::to_string(tickers.size()) + " tickers");
  for (std::size_t t = 1; t < dates.size(); ++t)
    if (!(dates[t - 1] < dates[t]))
      fail(ErrorCode::Data, "dates not strictly increasing at '" + dates[t] + "'");
  for (std::size_t t = 0; t < prices.rows(); ++t)
    for (std::size_t i = 0; i < prices.cols(); ++i)
      if (!(prices(t, i) > 0.0) || !std::isfinite(prices(t, i)))
        fail(ErrorCode::Data, "non-positive price for " + tickers[i] + " on " + dates[t]);
}

// ─── CSV ─────────────────────────────────────────────────────────────────────

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t row, std::size_t col,
                              const std::string& what) {
  fail(ErrorCode::Parse,
       source + ": row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + what);
}

}  // namespace

LoadedPrices parse_prices(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) parse_error(source, 1, 1, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_csv_line(line);
  if (trim(header[0]) != "date") parse_error(source, 1, 1, "first header cell must be 'date'");
  std::vector<std::string> tickers;
  std::set<std::string, std::less<>> seen;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (name.empty()) parse_error(source, 1, c + 1, "empty ticker name");
    if (!seen.emplace(name).second)
      parse_error(source, 1, c + 1, "duplicate ticker '" + std::string(name) + "'");
    tickers.emplace_back(name);
  }

  const std::size_t n = tickers.size();
  std::vector<std::string> row_dates;
  std::vector<double> values;  // NaN marks a missing cell
  std::vector<bool> drop(n, false);
  std::vector<std::string> drop_reason(n);

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != n + 1)
      parse_error(source, row, std::min(cells.size(), n + 2),
                  "expected " + std::to_string(n + 1) + " cells, found " +
                      std::to_string(cells.size()));
    const auto date = trim(cells[0]);
    if (!dates::parse_iso(date))
      parse_error(source, row, 1, "invalid date '" + std::string(date) + "'");
    if (!row_dates.empty() && !(row_dates.back() < date))
      parse_error(source, row, 1, "date '" + std::string(date) + "' is not after '" + row_dates.back() + "'");
    row_dates.emplace_back(date);

    for (std::size_t c = 0; c < n; ++c) {
      const auto cell = trim(cells[c + 1]);
      if (cell.empty()) {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
        if (!drop[c]) {
          drop[c] = true;
          drop_reason[c] = "missing value on " + std::string(date);
        }
        continue;
      }
      double v = 0.0;
      const auto* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (ec != std::errc{} || ptr != end)
        parse_error(source, row, c + 2, "invalid number '" + std::string(cell) + "'");
      if (!(v > 0.0) || !std::isfinite(v)) {
        if (!drop[c]) {
          drop[c] = true;
          drop_reason[c] = "non-positive price on " + std::string(date);
        }
      }
      values.push_back(v);
    }
  }
  if (row_dates.empty()) parse_error(source, 2, 1, "no data rows");

  LoadedPrices result;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < n; ++c) {
    if (drop[c])
      result.warnings.push_back("dropped ticker " + tickers[c] + ": " + drop_reason[c]);
    else
      keep.push_back(c);
  }
  if (keep.empty()) fail(ErrorCode::EmptyUniverse, source + ": no tickers with complete positive prices");

  PricePanel& panel = result.panel;
  panel.dates = std::move(row_dates);
  panel.prices = Matrix(panel.dates.size(), keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    panel.tickers.push_back(tickers[keep[k]]);
    for (std::size_t t = 0; t < panel.dates.size(); ++t) panel.prices(t, k) = values[t * n + keep[k]];
  }
  return result;
}

LoadedPrices load_prices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open price file '" + path.string() + "'");
  return parse_prices(in, path.string());
}

void write_prices(std::ostream& out, const PricePanel& panel) {
  out << "date";
  for (const auto& t : panel.tickers) out << ',' << t;
  out << '\n';
  char buf[64];
  for (std::size_t t = 0; t < panel.n_dates(); ++t) {
    out << panel.dates[t];
    for (std::size_t i = 0; i < panel.n_tickers(); ++i) {
      // Shortest round-trip representation keeps reloads bit-identical.
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, panel.prices(t, i));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

void save_prices(const std::filesystem::path& path, const PricePanel& panel) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write price file '" + path.string() + "'");
  write_prices(out, panel);
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

// ─── Returns and statistics ──────────────────────────────────────────────────

ReturnMatrix log_returns(const PricePanel& panel) {
  if (panel.n_dates() < 2)
    fail(ErrorCode::InsufficientData, "log returns need at least 2 dates, panel has " +
                                          std::to_string(panel.n_dates()));
  ReturnMatrix r;
  r.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  r.tickers = panel.tickers;
  r.values = Matrix(panel.n_dates() - 1, panel.n_tickers());
  for (std::size_t t = 1; t < panel.n_dates(); ++t)
    for (std::size_t i = 0; i < panel.n_tickers(); ++i)
      r.values(t - 1, i) = std::log(panel.prices(t, i) / panel.prices(t - 1, i));
  return r;
}

PricePanel prices_from_returns(const ReturnMatrix& returns, const std::string& first_date,
                               double initial_price) {
  PricePanel p;
  p.dates.reserve(returns.n_rows() + 1);
  p.dates.push_back(first_date);
  p.dates.insert(p.dates.end(), returns.dates.begin(), returns.dates.end());
  p.tickers = returns.tickers;
  p.prices = Matrix(returns.n_rows() + 1, returns.n_tickers());
  for (std::size_t i = 0; i < returns.n_tickers(); ++i) {
    // Accumulate in log space so the round trip does not compound rounding.
    double log_level = std::log(initial_price);
    p.prices(0, i) = initial_price;
    for (std::size_t t = 0; t < returns.n_rows(); ++t) {
      log_level += returns.values(t, i);
      p.prices(t + 1, i) = std::exp(log_level);
    }
  }
  return p;
}

namespace {

RowWindow trailing(const ReturnMatrix& returns, std::size_t window_days) {
  if (window_days == 0) fail(ErrorCode::InvalidArgument, "window must be at least one day");
  if (returns.n_rows() < window_days)
    fail(ErrorCode::InsufficientData, "window of " + std::to_string(window_days) +
                                          " days exceeds " + std::to_string(returns.n_rows()) +
                                          " return rows");
  return {returns.n_rows() - window_days, returns.n_rows()};
}

void check_window(const ReturnMatrix& returns, RowWindow w) {
  if (w.begin >= w.end || w.end > returns.n_rows())
    fail(ErrorCode::InsufficientData, "row window [" + std::to_string(w.begin) + ", " +
                                          std::to_string(w.end) + ") invalid for " +
                                          std::to_string(returns.n_rows()) + " rows");
}

/// Column i over the window, copied contiguous.
std::vector<double> column(const ReturnMatrix& r, RowWindow w, std::size_t i) {
  std::vector<double> out(w.size());
  for (std::size_t t = 0; t < w.size(); ++t) out[t] = r.values(w.begin + t, i);
  return out;
}

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> volatility(const ReturnMatrix& returns, std::size_t window_days) {
  return volatility(returns, trailing(returns, window_days));
}

std::vector<double> volatility(const ReturnMatrix& returns, RowWindow window) {
  check_window(returns, window);
  std::vector<double> vols(returns.n_tickers());
  for (std::size_t i = 0; i < returns.n_tickers(); ++i) {
    const auto x = column(returns, window, i);
    // exact zero for a constant column, whatever the rounding of its mean
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) continue;
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    vols[i] = std::sqrt(ss / static_cast<double>(x.size()));
  }
  return vols;
}

CorrelationMatrix correlation(const ReturnMatrix& returns, std::size_t window_days,
                              unsigned threads) {
  return correlation(returns, trailing(returns, window_days), threads);
}

CorrelationMatrix correlation(const ReturnMatrix& returns, RowWindow window, unsigned threads) {
  check_window(returns, window);
  const std::size_t n = returns.n_tickers();
  const std::size_t len = window.size();

  // Centered columns and their root sum of squares.
  std::vector<std::vector<double>> centered(n);
  std::vector<double> norm(n, 0.0);
  std::vector<bool> flat(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = column(returns, window, i);
    flat[i] = std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
    const double m = mean_of(x);
    double ss = 0.0;
    for (double& v : x) {
      v -= m;
      ss += v * v;
    }
    if (ss == 0.0) flat[i] = true;
    norm[i] = std::sqrt(ss);
    centered[i] = std::move(x);
  }

  CorrelationMatrix c;
  c.tickers = returns.tickers;
  c.window_days = len;
  c.zero_variance = flat;
  c.values = Matrix(n, n, 0.0);

  parallel_for(n, threads, [&](std::size_t i) {
    c.values(i, i) = 1.0;
    if (flat[i]) return;
    const double* xi = centered[i].data();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (flat[j]) continue;
      const double* xj = centered[j].data();
      double cross = 0.0;
      for (std::size_t t = 0; t < len; ++t) cross += xi[t] * xj[t];
      const double v = std::clamp(cross / (norm[i] * norm[j]), -1.0, 1.0);
      c.values(i, j) = v;
      c.values(j, i) = v;
    }
  });
  return c;
}

// ─── Synthetic data ──────────────────────────────────────────────────────────

PricePanel synth_panel(const SynthConfig& cfg) {
  if (cfg.n_stocks == 0 || cfg.n_days == 0)
    fail(ErrorCode::InvalidArgument, "synthetic panel needs positive stock and day counts");
  const auto start = dates::parse_iso(cfg.start_date);
  if (!start) fail(ErrorCode::InvalidArgument, "invalid start date '" + cfg.start_date + "'");

  SplitMix64 rng(stream_seed(cfg.seed, 0));
  const std::size_t n = cfg.n_stocks;
  const std::size_t k = cfg.n_factors;

  Matrix loadings(n, k);
  std::vector<double> idio(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      if (cfg.fixed_loading)
        loadings(i, f) = *cfg.fixed_loading;
      else if (f == 0)
        loadings(i, f) = rng.uniform(cfg.market_loading_min, cfg.market_loading_max);
      else
        loadings(i, f) = cfg.sector_loading_sd * rng.normal();
    }
    idio[i] = rng.uniform(cfg.idio_vol_min, cfg.idio_vol_max);
  }

  PricePanel p;
  p.dates = dates::business_days(*start, cfg.n_days);
  p.tickers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream name;
    name << 'S' << std::setw(4) << std::setfill('0') << i;
    p.tickers.push_back(name.str());
  }
  p.prices = Matrix(cfg.n_days, n);

  std::vector<double> log_level(n, std::log(cfg.initial_price));
  std::vector<double> factors(k);
  for (std::size_t i = 0; i < n; ++i) p.prices(0, i) = cfg.initial_price;
  for (std::size_t t = 1; t < cfg.n_days; ++t) {
    for (auto& f : factors) f = cfg.factor_vol * rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double r = cfg.drift + idio[i] * rng.normal();
      for (std::size_t f = 0; f < k; ++f) r += loadings(i, f) * factors[f];
      log_level[i] += r;
      p.prices(t, i) = std::exp(log_level[i]);
    }
  }
  return p;
}

PricePanel synth_panel(std::size_t n_stocks, std::size_t n_days, std::size_t n_factors,
                       std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_stocks = n_stocks;
  cfg.n_days = n_days;
  cfg.n_factors = n_factors;
  cfg.seed = seed;
  return synth_panel(cfg);
}

}  // namespace misport
