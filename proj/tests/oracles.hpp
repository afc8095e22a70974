#pragma once

// Reference implementations used only by tests. They are deliberately naive
// and share no code with the library beyond its public types.

#include "misport/market_graph.hpp"
#include "misport/timeseries.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace oracle {

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

inline Edges random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  Edges e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return e;
}

inline misport::MarketGraph graph(std::size_t n, const Edges& e) {
  return misport::MarketGraph::from_edges(n, e);
}

inline Edges cycle(std::size_t n) {
  Edges e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
  return e;
}

inline Edges complete(std::size_t n) {
  Edges e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return e;
}

// Neighbour masks for n <= 32.
inline std::vector<std::uint32_t> masks(std::size_t n, const Edges& e) {
  std::vector<std::uint32_t> m(n, 0);
  for (auto [i, j] : e) {
    m[i] |= 1U << j;
    m[j] |= 1U << i;
  }
  return m;
}

inline bool independent(std::uint32_t set, const std::vector<std::uint32_t>& nb) {
  for (std::size_t i = 0; i < nb.size(); ++i)
    if ((set >> i & 1U) && (nb[i] & set)) return false;
  return true;
}

// Every independent set of maximum size, as bit masks.
inline std::vector<std::uint32_t> maximum_independent_sets(std::size_t n, const Edges& e) {
  const auto nb = masks(n, e);
  int best = -1;
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    if (!independent(s, nb)) continue;
    const int c = std::popcount(s);
    if (c > best) {
      best = c;
      out.clear();
    }
    if (c == best) out.push_back(s);
  }
  return out;
}

inline std::size_t independence_number(std::size_t n, const Edges& e) {
  return static_cast<std::size_t>(std::popcount(maximum_independent_sets(n, e).front()));
}

// A * sum_edges b_i b_j - B * sum_i b_i straight from the definition.
inline double qubo_cost(std::size_t n, const Edges& e, double a, double b, std::uint32_t bits) {
  double cost = 0.0;
  for (auto [i, j] : e)
    if ((bits >> i & 1U) && (bits >> j & 1U)) cost += a;
  for (std::size_t i = 0; i < n; ++i)
    if (bits >> i & 1U) cost -= b;
  return cost;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    mx += x[t];
    my += y[t];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double population_std(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline std::vector<double> column(const misport::Matrix& m, std::size_t c, std::size_t begin, std::size_t end) {
  std::vector<double> out;
  for (std::size_t r = begin; r < end; ++r) out.push_back(m(r, c));
  return out;
}

// Business-day-like ISO dates: consecutive calendar days skipping weekends.
inline std::vector<std::string> weekdays(int year, unsigned month, unsigned day, std::size_t count) {
  using namespace std::chrono;
  sys_days d{std::chrono::year{year} / month / day};
  std::vector<std::string> out;
  while (out.size() < count) {
    const weekday wd{d};
    if (wd != Saturday && wd != Sunday) {
      const year_month_day ymd{d};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                    static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
      out.emplace_back(buf);
    }
    d += days{1};
  }
  return out;
}

// Panel whose prices follow the given per-day log returns from 100.
inline misport::PricePanel panel_from_log_returns(const std::vector<std::vector<double>>& rets,
                                                  const std::vector<std::string>& tickers) {
  misport::PricePanel p;
  p.tickers = tickers;
  p.dates = weekdays(2015, 1, 1, rets.size() + 1);
  p.prices = misport::Matrix(rets.size() + 1, tickers.size());
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    double lp = std::log(100.0);
    p.prices(0, i) = 100.0;
    for (std::size_t t = 0; t < rets.size(); ++t) {
      lp += rets[t][i];
      p.prices(t + 1, i) = std::exp(lp);
    }
  }
  return p;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("misport_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace oracle
