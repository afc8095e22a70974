#include "misport/market_graph.hpp"

#include "misport/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace misport {

namespace {

std::vector<std::string> index_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return names;
}

void check_node(const MarketGraph& g, std::size_t node) {
  if (node >= g.n_nodes())
    fail(ErrorCode::Index, "node " + std::to_string(node) + " out of range for graph with " +
                               std::to_string(g.n_nodes()) + " nodes");
}

}  // namespace

MarketGraph::MarketGraph(std::size_t n, double theta, std::vector<std::string> tickers)
    : adjacency_(n), theta_(theta), tickers_(std::move(tickers)) {
  if (tickers_.empty()) tickers_ = index_names(n);
  if (tickers_.size() != n)
    fail(ErrorCode::InvalidArgument, "ticker list has " + std::to_string(tickers_.size()) +
                                         " names for " + std::to_string(n) + " nodes");
}

void MarketGraph::add_edge(std::size_t i, std::size_t j) noexcept {
  if (adjacency_.test(i, j)) return;
  adjacency_.set(i, j);
  adjacency_.set(j, i);
  ++edge_count_;
}

MarketGraph MarketGraph::from_edges(std::size_t n_nodes, std::span<const Edge> edges, double theta,
                                    std::vector<std::string> tickers) {
  MarketGraph g(n_nodes, theta, std::move(tickers));
  for (const auto& [i, j] : edges) {
    if (i >= n_nodes || j >= n_nodes)
      fail(ErrorCode::Index, "edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") out of range for " + std::to_string(n_nodes) + " nodes");
    if (i == j) fail(ErrorCode::InvalidArgument, "self-loop on node " + std::to_string(i));
    g.add_edge(i, j);
  }
  return g;
}

bool MarketGraph::has_edge(std::size_t i, std::size_t j) const {
  check_node(*this, i);
  check_node(*this, j);
  return adjacency_.test(i, j);
}

std::size_t MarketGraph::degree(std::size_t node) const {
  check_node(*this, node);
  return popcount(adjacency_.row(node));
}

std::vector<Edge> MarketGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < n_nodes(); ++i)
    for_each_bit(adjacency_.row(i), [&](std::size_t j) {
      if (j > i) out.emplace_back(i, j);
    });
  return out;
}

MarketGraph build_graph(const CorrelationMatrix& corr, double theta) {
  const std::size_t n = corr.values.rows();
  MarketGraph g(n, theta, corr.tickers);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (corr.values(i, j) >= theta) g.add_edge(i, j);
  return g;
}

double edge_density(const MarketGraph& graph) {
  const std::size_t n = graph.n_nodes();
  if (n < 2)
    fail(ErrorCode::UndefinedDensity, "edge density undefined for " + std::to_string(n) + " node(s)");
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(graph.edge_count()) / pairs;
}

// ─── Edge-list I/O ───────────────────────────────────────────────────────────

void write_edge_list(std::ostream& out, const MarketGraph& graph) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, graph.theta());
  out << graph.n_nodes() << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  // Ticker names ride along in a comment so plain `i j` readers still work.
  const auto& names = graph.tickers();
  bool named = false, plain = true;
  for (std::size_t i = 0; i < names.size(); ++i) {
    named = named || names[i] != std::to_string(i);
    plain = plain && !names[i].empty() && names[i].find_first_of(" \t\r\n") == std::string::npos;
  }
  if (named && plain) {
    out << "# tickers";
    for (const auto& t : names) out << ' ' << t;
    out << '\n';
  }
  for (const auto& [i, j] : graph.edges()) out << i << ' ' << j << '\n';
}

MarketGraph read_edge_list(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> tickers;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] == '#') {
        std::istringstream c(line.substr(first + 1));
        std::string word;
        if (c >> word && word == "tickers") {
          tickers.clear();
          while (c >> word) tickers.push_back(word);
        }
        continue;
      }
      if (first != std::string::npos) return true;
    }
    return false;
  };
  auto bad = [&](const std::string& what) {
    fail(ErrorCode::Parse, source + ": line " + std::to_string(line_no) + ": " + what);
  };

  if (!next_line()) bad("missing header `n_nodes theta`");
  std::size_t n = 0;
  double theta = 0.0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> n >> theta) || (header >> extra)) bad("expected header `n_nodes theta`");
  }

  std::vector<Edge> edges;
  while (next_line()) {
    std::istringstream row(line);
    long long i = -1;
    long long j = -1;
    std::string extra;
    if (!(row >> i >> j) || (row >> extra)) bad("expected `i j`");
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n)
      bad("node index out of range");
    if (i == j) bad("self-loop");
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  if (!tickers.empty() && tickers.size() != n)
    fail(ErrorCode::Parse, source + ": ticker comment lists " + std::to_string(tickers.size()) + " names for " +
                               std::to_string(n) + " nodes");
  return MarketGraph::from_edges(n, edges, theta, std::move(tickers));
}

void save_edge_list(const std::filesystem::path& path, const MarketGraph& graph) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write edge list '" + path.string() + "'");
  write_edge_list(out, graph);
}

MarketGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open edge list '" + path.string() + "'");
  return read_edge_list(in, path.string());
}

}  // namespace misport
