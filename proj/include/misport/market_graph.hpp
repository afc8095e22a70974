#pragma once

#include "misport/bitset.hpp"
#include "misport/timeseries.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace misport {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph over the stock universe, stored as a packed
/// symmetric bit matrix. Immutable after construction.
class MarketGraph {
public:
  MarketGraph() = default;

  /// Builds from an explicit edge list. Self-loops and out-of-range endpoints
  /// are rejected; duplicate edges are merged.
  static MarketGraph from_edges(std::size_t n_nodes, std::span<const Edge> edges, double theta = 0.0,
                                std::vector<std::string> tickers = {});

  std::size_t n_nodes() const noexcept { return adjacency_.size(); }
  double theta() const noexcept { return theta_; }
  const std::vector<std::string>& tickers() const noexcept { return tickers_; }
  const BitMatrix& adjacency() const noexcept { return adjacency_; }
  std::span<const Word> neighbors(std::size_t node) const noexcept { return adjacency_.row(node); }

  bool has_edge(std::size_t i, std::size_t j) const;
  std::size_t degree(std::size_t node) const;
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// Unordered pairs (i < j) in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const MarketGraph&, const MarketGraph&) = default;

private:
  friend MarketGraph build_graph(const CorrelationMatrix& corr, double theta);

  MarketGraph(std::size_t n, double theta, std::vector<std::string> tickers);
  void add_edge(std::size_t i, std::size_t j) noexcept;

  BitMatrix adjacency_;
  double theta_ = 0.0;
  std::vector<std::string> tickers_;
  std::size_t edge_count_ = 0;
};

/// Edge (i, j) for i != j iff corr[i][j] >= theta.
MarketGraph build_graph(const CorrelationMatrix& corr, double theta);

/// |E| / (n(n-1)/2). Throws Error(UndefinedDensity) for fewer than 2 nodes.
double edge_density(const MarketGraph& graph);

/// Edge-list text format: header `n_nodes theta`, then one `i j` pair per
/// line with 0-based indices and i < j.
void write_edge_list(std::ostream& out, const MarketGraph& graph);
MarketGraph read_edge_list(std::istream& in, const std::string& source = "<stream>");

void save_edge_list(const std::filesystem::path& path, const MarketGraph& graph);
MarketGraph load_edge_list(const std::filesystem::path& path);

}  // namespace misport
