#pragma once

#include "misport/bitset.hpp"
#include "misport/market_graph.hpp"
#include "misport/timeseries.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace misport {

using Spin = std::int8_t;
using Bit = std::uint8_t;

// ─── QUBO / Ising ────────────────────────────────────────────────────────────

struct QuboTerm {
  std::size_t i = 0;
  std::size_t j = 0;  // i < j
  double coeff = 0.0;
};

/// cost(b) = sum_{i<j} Q_ij b_i b_j + sum_i c_i b_i.
/// For MIS encodings Q_ij = A on every edge and c_i = -B.
struct QuboProblem {
  std::size_t n_bits = 0;
  std::vector<QuboTerm> quadratic;
  std::vector<double> linear;
  double penalty = 0.0;  // A
  double reward = 0.0;   // B

  double cost(std::span<const Bit> bits) const;
};

/// Nonzero couplings that all share one value on a bit-matrix support. MIS
/// encodings always have this shape, which enables the popcount matvec.
struct UniformCoupling {
  std::shared_ptr<const BitMatrix> support;
  double value = 0.0;
};

/// E(s) = -1/2 sum_{i!=j} J_ij s_i s_j - sum_i h_i s_i, minimised.
/// `offset` links it to the source QUBO: qubo.cost(b) = energy(s(b)) + offset
/// with s_i = 2 b_i - 1.
struct IsingProblem {
  std::size_t n_spins = 0;
  Matrix coupling;  // symmetric, zero diagonal
  std::vector<double> bias;
  double offset = 0.0;
  std::optional<UniformCoupling> uniform;

  double energy(std::span<const Spin> spins) const;
};

/// MIS as QUBO with one penalty term per unordered edge. Requires 0 < B < A.
QuboProblem to_qubo(const MarketGraph& graph, double penalty = 2.0, double reward = 1.0);

/// Substitutes b = (s + 1) / 2:
///   J_ij = -Q_ij / 4,  h_i = -c_i / 2 - sum_j Q_ij / 4,
///   offset = sum Q / 4 + sum c / 2.
IsingProblem qubo_to_ising(const QuboProblem& qubo);

std::vector<Spin> spins_from_bits(std::span<const Bit> bits);

// ─── Solutions ───────────────────────────────────────────────────────────────

enum class SolverKind { Sb, Greedy, Exact };

std::string_view to_string(SolverKind kind) noexcept;
std::optional<SolverKind> parse_solver_kind(std::string_view text) noexcept;

struct MisSolution {
  std::vector<std::size_t> nodes;  // ascending
  bool feasible = false;
  SolverKind source = SolverKind::Exact;

  std::size_t size() const noexcept { return nodes.size(); }

  friend bool operator==(const MisSolution&, const MisSolution&) = default;
};

/// Nodes whose spin is +1. Throws Error(Decode) on any value other than +/-1.
std::vector<std::size_t> decode(std::span<const Spin> spins);

struct Verification {
  bool feasible = true;
  std::vector<Edge> violated;
};

Verification verify(const MarketGraph& graph, std::span<const std::size_t> nodes);

/// Wraps a node set as a solution, sorting it and filling the feasibility flag.
MisSolution make_solution(const MarketGraph& graph, std::vector<std::size_t> nodes, SolverKind source);

struct ExactOptions {
  std::size_t node_limit = 64;
  std::optional<std::chrono::duration<double>> timeout;
};

/// Branch and bound for a maximum independent set: maximum clique search on
/// the complement graph, bounded by a greedy clique cover of the candidates.
/// Throws Error(SizeLimit) above node_limit and Error(Timeout) on timeout.
MisSolution solve_exact(const MarketGraph& graph, const ExactOptions& options = {});

/// Repeatedly takes a minimum-degree node of the residual graph (lowest index
/// on ties), then deletes it and its neighbours.
MisSolution solve_greedy(const MarketGraph& graph);

/// Largest feasible candidate; equal sizes resolve to the lexicographically
/// smallest node list. nullopt when no candidate is feasible.
/// Throws Error(InvalidArgument) for an empty list.
std::optional<MisSolution> select_best(std::span<const MisSolution> candidates);

/// Drops the higher-degree endpoint of every violated edge, then extends the
/// result greedily (minimum degree first) over nodes with no selected neighbour.
std::vector<std::size_t> repair(const MarketGraph& graph, std::span<const std::size_t> nodes);

}  // namespace misport
