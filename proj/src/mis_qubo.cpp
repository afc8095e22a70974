#include "misport/mis_qubo.hpp"

#include "misport/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace misport {

// ─── QUBO / Ising ────────────────────────────────────────────────────────────

double QuboProblem::cost(std::span<const Bit> bits) const {
  if (bits.size() != n_bits)
    fail(ErrorCode::InvalidArgument, "bit vector of length " + std::to_string(bits.size()) +
                                         " for " + std::to_string(n_bits) + "-bit QUBO");
  double total = 0.0;
  for (const auto& t : quadratic)
    if (bits[t.i] && bits[t.j]) total += t.coeff;
  for (std::size_t i = 0; i < n_bits; ++i)
    if (bits[i]) total += linear[i];
  return total;
}

double IsingProblem::energy(std::span<const Spin> spins) const {
  if (spins.size() != n_spins)
    fail(ErrorCode::InvalidArgument, "spin vector of length " + std::to_string(spins.size()) +
                                         " for " + std::to_string(n_spins) + "-spin problem");
  double pair = 0.0;
  if (uniform) {
    // Only the support contributes; every term is value * s_i * s_j.
    for (std::size_t i = 0; i < n_spins; ++i) {
      long long aligned = 0;
      for_each_bit(uniform->support->row(i), [&](std::size_t j) {
        if (j > i) aligned += spins[i] * spins[j];
      });
      pair += uniform->value * static_cast<double>(aligned);
    }
  } else {
    for (std::size_t i = 0; i < n_spins; ++i)
      for (std::size_t j = i + 1; j < n_spins; ++j)
        pair += coupling(i, j) * spins[i] * spins[j];
  }
  double field = 0.0;
  for (std::size_t i = 0; i < n_spins; ++i) field += bias[i] * spins[i];
  return -pair - field;
}

QuboProblem to_qubo(const MarketGraph& graph, double penalty, double reward) {
  if (!(penalty > 0.0) || !(reward > 0.0) || !(reward < penalty))
    fail(ErrorCode::InvalidPenalty, "MIS encoding needs 0 < B < A, got A=" + std::to_string(penalty) +
                                        " B=" + std::to_string(reward));
  QuboProblem q;
  q.n_bits = graph.n_nodes();
  q.penalty = penalty;
  q.reward = reward;
  q.linear.assign(q.n_bits, -reward);
  for (const auto& [i, j] : graph.edges()) q.quadratic.push_back({i, j, penalty});
  return q;
}

IsingProblem qubo_to_ising(const QuboProblem& qubo) {
  const std::size_t n = qubo.n_bits;
  IsingProblem p;
  p.n_spins = n;
  p.coupling = Matrix(n, n, 0.0);
  p.bias.assign(n, 0.0);

  double offset = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.bias[i] = -qubo.linear[i] / 2.0;
    offset += qubo.linear[i] / 2.0;
  }

  bool single_value = !qubo.quadratic.empty();
  for (const auto& t : qubo.quadratic) {
    if (t.i == t.j || t.i >= n || t.j >= n)
      fail(ErrorCode::InvalidArgument, "invalid quadratic term (" + std::to_string(t.i) + ", " +
                                           std::to_string(t.j) + ")");
    const double quarter = t.coeff / 4.0;
    p.coupling(t.i, t.j) -= quarter;
    p.coupling(t.j, t.i) -= quarter;
    p.bias[t.i] -= quarter;
    p.bias[t.j] -= quarter;
    offset += quarter;
    if (t.coeff != qubo.quadratic.front().coeff) single_value = false;
  }
  p.offset = offset;

  if (single_value) {
    auto support = std::make_shared<BitMatrix>(n);
    for (const auto& t : qubo.quadratic) {
      support->set(t.i, t.j);
      support->set(t.j, t.i);
    }
    // Duplicate terms would make the dense entry a multiple of the value.
    bool consistent = true;
    const double value = -qubo.quadratic.front().coeff / 4.0;
    for (const auto& t : qubo.quadratic)
      if (p.coupling(t.i, t.j) != value) consistent = false;
    if (consistent) p.uniform = UniformCoupling{std::move(support), value};
  }
  return p;
}

std::vector<Spin> spins_from_bits(std::span<const Bit> bits) {
  std::vector<Spin> s(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? Spin{1} : Spin{-1};
  return s;
}

// ─── Solutions ───────────────────────────────────────────────────────────────

std::string_view to_string(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::Sb: return "sb";
    case SolverKind::Greedy: return "greedy";
    case SolverKind::Exact: return "exact";
  }
  return "unknown";
}

std::optional<SolverKind> parse_solver_kind(std::string_view text) noexcept {
  if (text == "sb") return SolverKind::Sb;
  if (text == "greedy") return SolverKind::Greedy;
  if (text == "exact") return SolverKind::Exact;
  return std::nullopt;
}

std::vector<std::size_t> decode(std::span<const Spin> spins) {
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] == 1)
      nodes.push_back(i);
    else if (spins[i] != -1)
      fail(ErrorCode::Decode, "spin " + std::to_string(i) + " has value " +
                                  std::to_string(static_cast<int>(spins[i])) + ", expected +1 or -1");
  }
  return nodes;
}

Verification verify(const MarketGraph& graph, std::span<const std::size_t> nodes) {
  DynamicBitset selected(graph.n_nodes());
  for (std::size_t v : nodes) {
    if (v >= graph.n_nodes())
      fail(ErrorCode::Index, "node " + std::to_string(v) + " out of range for graph with " +
                                 std::to_string(graph.n_nodes()) + " nodes");
    selected.set(v);
  }
  Verification out;
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    if (!selected.test(i)) continue;
    for_each_bit(graph.neighbors(i), [&](std::size_t j) {
      if (j > i && selected.test(j)) out.violated.emplace_back(i, j);
    });
  }
  out.feasible = out.violated.empty();
  return out;
}

MisSolution make_solution(const MarketGraph& graph, std::vector<std::size_t> nodes, SolverKind source) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  MisSolution s;
  s.feasible = verify(graph, nodes).feasible;
  s.nodes = std::move(nodes);
  s.source = source;
  return s;
}

// ─── Greedy ──────────────────────────────────────────────────────────────────

namespace {

/// Minimum-degree greedy restricted to the nodes set in `alive`.
std::vector<std::size_t> greedy_on(const MarketGraph& graph, DynamicBitset alive) {
  const std::size_t n = graph.n_nodes();
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (alive.test(v)) degree[v] = popcount_and(graph.neighbors(v), alive.words());

  std::vector<std::size_t> chosen;
  std::size_t remaining = alive.count();
  while (remaining > 0) {
    std::size_t best = n;
    for_each_bit(alive.words(), [&](std::size_t v) {
      if (best == n || degree[v] < degree[best]) best = v;
    });
    chosen.push_back(best);

    std::vector<std::size_t> removed{best};
    for_each_bit(graph.neighbors(best), [&](std::size_t u) {
      if (alive.test(u)) removed.push_back(u);
    });
    for (std::size_t u : removed) alive.reset(u);
    remaining -= removed.size();
    for (std::size_t u : removed)
      for_each_bit(graph.neighbors(u), [&](std::size_t w) {
        if (alive.test(w)) --degree[w];
      });
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

MisSolution solve_greedy(const MarketGraph& graph) {
  DynamicBitset alive(graph.n_nodes());
  alive.set_all();
  MisSolution s;
  s.nodes = greedy_on(graph, std::move(alive));
  s.feasible = true;
  s.source = SolverKind::Greedy;
  return s;
}

std::vector<std::size_t> repair(const MarketGraph& graph, std::span<const std::size_t> nodes) {
  const std::size_t n = graph.n_nodes();
  DynamicBitset selected(n);
  for (std::size_t v : nodes) {
    if (v >= n) fail(ErrorCode::Index, "node " + std::to_string(v) + " out of range");
    selected.set(v);
  }
  for (const auto& [i, j] : verify(graph, nodes).violated) {
    if (!selected.test(i) || !selected.test(j)) continue;
    const std::size_t di = graph.degree(i);
    const std::size_t dj = graph.degree(j);
    selected.reset(di > dj || (di == dj && i > j) ? i : j);
  }

  DynamicBitset free(n);
  for (std::size_t v = 0; v < n; ++v)
    if (!selected.test(v) && !intersects(graph.neighbors(v), selected.words())) free.set(v);

  std::vector<std::size_t> out;
  for_each_bit(selected.words(), [&](std::size_t v) { out.push_back(v); });
  const auto extension = greedy_on(graph, std::move(free));
  out.insert(out.end(), extension.begin(), extension.end());
  std::sort(out.begin(), out.end());
  return out;
}

// ─── Exact branch and bound ──────────────────────────────────────────────────

namespace {

class CliqueSearch {
public:
  CliqueSearch(const MarketGraph& graph, const ExactOptions& options)
      : n_(graph.n_nodes()), complement_(n_), options_(options) {
    // Vertices with few graph edges (many complement edges) first.
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::vector<std::size_t> deg(n_);
    for (std::size_t v = 0; v < n_; ++v) deg[v] = graph.degree(v);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return deg[a] < deg[b]; });
    std::vector<std::size_t> position(n_);
    for (std::size_t k = 0; k < n_; ++k) position[order_[k]] = k;

    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (a != b && !graph.adjacency().test(order_[a], order_[b])) complement_.set(a, b);

    if (options_.timeout) deadline_ = std::chrono::steady_clock::now() +
                                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(*options_.timeout);

    // Incumbent from the greedy heuristic, relabelled.
    for (std::size_t v : solve_greedy(graph).nodes) best_.push_back(position[v]);
  }

  std::vector<std::size_t> run() {
    std::vector<Word> candidates(words_for(n_), 0);
    for (std::size_t k = 0; k < n_; ++k) set_bit(candidates, k);
    if (n_ > 0) expand(candidates);

    std::vector<std::size_t> nodes;
    for (std::size_t k : best_) nodes.push_back(order_[k]);
    std::sort(nodes.begin(), nodes.end());
    return nodes;
  }

private:
  void check_deadline() {
    if (!deadline_ || (++visits_ & 0x3FF) != 0) return;
    if (std::chrono::steady_clock::now() > *deadline_)
      fail(ErrorCode::Timeout, "exact solver exceeded its time limit on " + std::to_string(n_) + " nodes");
  }

  void expand(std::vector<Word>& candidates) {
    check_deadline();

    // Greedy colouring of the complement: each class is a clique of the
    // graph, so it can contribute at most one node to the independent set.
    std::vector<std::size_t> vertex;
    std::vector<std::size_t> bound;
    std::vector<Word> uncoloured = candidates;
    std::vector<Word> klass(uncoloured.size());
    std::size_t colour = 0;
    while (std::any_of(uncoloured.begin(), uncoloured.end(), [](Word w) { return w != 0; })) {
      ++colour;
      klass = uncoloured;
      for (std::size_t k = 0; k < klass.size(); ++k) {
        while (klass[k]) {
          const std::size_t v = k * kWordBits + static_cast<std::size_t>(std::countr_zero(klass[k]));
          reset_bit(uncoloured, v);
          reset_bit(klass, v);
          const auto nbrs = complement_.row(v);
          for (std::size_t m = k; m < klass.size(); ++m) klass[m] &= ~nbrs[m];
          vertex.push_back(v);
          bound.push_back(colour);
        }
      }
    }

    std::vector<Word> next(candidates.size());
    for (std::size_t idx = vertex.size(); idx-- > 0;) {
      if (current_.size() + bound[idx] <= best_.size()) return;
      const std::size_t v = vertex[idx];
      current_.push_back(v);
      const auto nbrs = complement_.row(v);
      bool empty = true;
      for (std::size_t m = 0; m < next.size(); ++m) {
        next[m] = candidates[m] & nbrs[m];
        empty = empty && next[m] == 0;
      }
      if (empty) {
        if (current_.size() > best_.size()) best_ = current_;
      } else {
        std::vector<Word> sub = next;
        expand(sub);
      }
      current_.pop_back();
      reset_bit(candidates, v);
    }
  }

  std::size_t n_;
  BitMatrix complement_;
  ExactOptions options_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> current_;
  std::vector<std::size_t> best_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::uint64_t visits_ = 0;
};

}  // namespace

MisSolution solve_exact(const MarketGraph& graph, const ExactOptions& options) {
  if (graph.n_nodes() > options.node_limit)
    fail(ErrorCode::SizeLimit, "exact solver limited to " + std::to_string(options.node_limit) +
                                   " nodes, graph has " + std::to_string(graph.n_nodes()));
  CliqueSearch search(graph, options);
  MisSolution s;
  s.nodes = search.run();
  s.feasible = true;
  s.source = SolverKind::Exact;
  return s;
}

std::optional<MisSolution> select_best(std::span<const MisSolution> candidates) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "select_best needs at least one candidate");
  const MisSolution* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.feasible) continue;
    if (!best || c.size() > best->size() || (c.size() == best->size() && c.nodes < best->nodes))
      best = &c;
  }
  if (!best) return std::nullopt;
  return *best;
}

}  // namespace misport
