#pragma once

#include "misport/market_graph.hpp"
#include "misport/mis_qubo.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace misport {

/// How the coupling matvec is evaluated each step.
enum class MatvecKernel {
  Auto,    // masked popcount when the problem has uniform coupling, else dense
  Dense,   // sum_j J_ij x_j over the full row
  Masked,  // popcount over wall-pinned oscillators plus a sparse interior sum
};

/// Ballistic simulated bifurcation parameters.
///
/// The default coupling scale is c0 = kCouplingPrefactor / (sigma_J * sqrt(n))
/// where sigma_J is the root mean square of the off-diagonal couplings (the
/// bias RMS when there are no couplings).
///
/// With `balance_bias` set the bias fed to the time-evolution stage is
/// pre-scaled by c0 / eta, so the field seen by oscillator i is
/// c0 * (sum_j J_ij x_j + h_i) and the walls settle on Ising minima. Without
/// it the bias enters as eta * h_i unscaled.
struct SbParams {
  static constexpr double kCouplingPrefactor = 1.0;

  std::size_t n_steps = 1000;
  double dt = 0.2;
  double eta = 0.2;
  double alpha0 = 1.0;
  std::optional<double> coupling_scale;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  bool balance_bias = true;
  MatvecKernel kernel = MatvecKernel::Auto;

  /// Throws Error(InvalidArgument) when an invariant is broken.
  void validate() const;
};

struct SbState {
  std::vector<double> x;  // positions, |x_i| <= 1 after every step
  std::vector<double> p;  // momenta
  std::size_t step = 0;
};

struct SbRunResult {
  std::vector<Spin> spins;
  double energy = 0.0;
  std::vector<std::size_t> decoded;  // nodes with spin +1
  std::size_t run_index = 0;
  std::uint64_t seed_used = 0;
  bool failed = false;
  std::optional<std::size_t> failed_step;
  std::string failure;
};

double default_coupling_scale(const IsingProblem& problem);
double resolve_coupling_scale(const IsingProblem& problem, const SbParams& params);

/// Detuning ramp: 0 at k = 0 rising linearly to alpha0 at k = n_steps - 1.
double alpha_at(std::size_t k, const SbParams& params) noexcept;

/// One time-evolution step k:
///   dp_i = c0 * sum_j J_ij x_j                                  (MM)
///   p_i += dt * (-(alpha0 - alpha(k)) x_i + b * h_i + dp_i)     (FX)
///   x_i += dt * p_i                                             (FP)
///   |x_i| > 1  =>  x_i = sgn(x_i), p_i = 0                      (FW)
/// with b = c0 when balance_bias, else eta. Throws Error(Divergence) if any
/// state value becomes non-finite.
SbState sb_step(const SbState& state, const IsingProblem& problem, const SbParams& params,
                std::size_t k);

/// Initial state for run `run_index`: x ~ U[-0.1, 0.1] from the stream
/// (seed, run_index), p = 0.
SbState initial_state(std::size_t n, std::uint64_t seed, std::size_t run_index);

/// sgn(x) with sgn(0) = +1.
std::vector<Spin> digitize(const std::vector<double>& x);

/// Runs `restarts` independent trajectories, in parallel on up to `threads`
/// workers (0 = all cores). Results are ordered by run index and identical for
/// any thread count. A diverging run is flagged and the others proceed.
std::vector<SbRunResult> sb_solve(const IsingProblem& problem, const SbParams& params,
                                  unsigned threads = 0);

struct SbMisOptions {
  double penalty = 2.0;
  double reward = 1.0;
  bool repair = false;
  unsigned threads = 0;
};

struct SbMisResult {
  std::optional<MisSolution> best;  // nullopt when no run was feasible
  std::vector<SbRunResult> runs;
  std::vector<MisSolution> candidates;  // one per run, after optional repair
};

/// Graph -> QUBO -> Ising -> sb_solve -> decode and verify each run -> select_best.
SbMisResult solve_mis_sb_detailed(const MarketGraph& graph, const SbParams& params,
                                  const SbMisOptions& options = {});

std::optional<MisSolution> solve_mis_sb(const MarketGraph& graph, const SbParams& params,
                                        const SbMisOptions& options = {});

}  // namespace misport
