#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace misport {

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dividend-adjusted closes, one row per business day and one column per
/// ticker. Prices are strictly positive and dates strictly increasing.
struct PricePanel {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Matrix prices;

  std::size_t n_dates() const noexcept { return dates.size(); }
  std::size_t n_tickers() const noexcept { return tickers.size(); }

  /// Throws Error(Data) when an invariant is broken.
  void validate() const;

  friend bool operator==(const PricePanel&, const PricePanel&) = default;
};

/// Daily log returns; row t belongs to panel date t + 1.
struct ReturnMatrix {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Matrix values;

  std::size_t n_rows() const noexcept { return values.rows(); }
  std::size_t n_tickers() const noexcept { return values.cols(); }
};

/// Half-open row range [begin, end) of a ReturnMatrix.
struct RowWindow {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
};

struct CorrelationMatrix {
  std::vector<std::string> tickers;
  Matrix values;
  std::size_t window_days = 0;
  /// Columns with zero dispersion over the window; their off-diagonal
  /// coefficients are 0.
  std::vector<bool> zero_variance;
};

struct LoadedPrices {
  PricePanel panel;
  std::vector<std::string> warnings;
};

/// Parses the price CSV format (`date,<ticker>,...`). Tickers with an empty
/// or non-positive cell anywhere are dropped and reported in `warnings`.
LoadedPrices parse_prices(std::istream& in, const std::string& source = "<stream>");
LoadedPrices load_prices(const std::filesystem::path& path);

void write_prices(std::ostream& out, const PricePanel& panel);
void save_prices(const std::filesystem::path& path, const PricePanel& panel);

ReturnMatrix log_returns(const PricePanel& panel);

/// Rebuilds prices from log returns: P(0) = initial_price, P(t) = P(t-1)·exp(R(t)).
PricePanel prices_from_returns(const ReturnMatrix& returns, const std::string& first_date,
                               double initial_price = 100.0);

/// Population standard deviation of each column over the trailing
/// `window_days` rows.
std::vector<double> volatility(const ReturnMatrix& returns, std::size_t window_days);
std::vector<double> volatility(const ReturnMatrix& returns, RowWindow window);

/// Pearson correlation over the trailing `window_days` rows.
CorrelationMatrix correlation(const ReturnMatrix& returns, std::size_t window_days,
                              unsigned threads = 1);
CorrelationMatrix correlation(const ReturnMatrix& returns, RowWindow window, unsigned threads = 1);

/// Linear factor model for synthetic log returns:
///   r_i(t) = drift + sum_f loading_if * F_f(t) + idio_i * eps_i(t)
/// Factor 0 is a market factor with loadings drawn uniformly from
/// [market_loading_min, market_loading_max]; factors 1.. are sector-like with
/// N(0, sector_loading_sd) loadings. `fixed_loading` overrides all loadings.
struct SynthConfig {
  std::size_t n_stocks = 20;
  std::size_t n_days = 1000;
  std::size_t n_factors = 3;
  std::uint64_t seed = 0;

  double factor_vol = 0.01;
  double market_loading_min = 0.3;
  double market_loading_max = 1.5;
  double sector_loading_sd = 0.5;
  std::optional<double> fixed_loading;
  double idio_vol_min = 0.005;
  double idio_vol_max = 0.025;
  double drift = 0.0002;
  double initial_price = 100.0;
  std::string start_date = "2010-01-04";
};

PricePanel synth_panel(const SynthConfig& config);
PricePanel synth_panel(std::size_t n_stocks, std::size_t n_days, std::size_t n_factors,
                       std::uint64_t seed);

}  // namespace misport
