#include "misport/sb_solver.hpp"

#include "misport/error.hpp"
#include "misport/parallel.hpp"
#include "misport/rng.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <limits>

namespace misport {

void SbParams::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, "SB parameters: " + what); };
  if (n_steps < 1) bad("n_steps must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be > 0");
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) bad("alpha0 must be > 0");
  if (!std::isfinite(eta)) bad("eta must be finite");
  if (balance_bias && !(eta > 0.0)) bad("eta must be > 0 when the bias is balanced");
  if (coupling_scale && (!(*coupling_scale > 0.0) || !std::isfinite(*coupling_scale)))
    bad("coupling_scale must be > 0");
  if (restarts < 1) bad("restarts must be >= 1");
}

double default_coupling_scale(const IsingProblem& problem) {
  const std::size_t n = problem.n_spins;
  if (n == 0) return SbParams::kCouplingPrefactor;
  double sum_sq = 0.0;
  if (problem.uniform) {
    const double edges2 = static_cast<double>(problem.uniform->support->count());
    sum_sq = edges2 * problem.uniform->value * problem.uniform->value;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) sum_sq += problem.coupling(i, j) * problem.coupling(i, j);
  }
  double rms = 0.0;
  if (n > 1) rms = std::sqrt(sum_sq / (static_cast<double>(n) * static_cast<double>(n - 1)));
  if (rms == 0.0) {
    double bias_sq = 0.0;
    for (double h : problem.bias) bias_sq += h * h;
    rms = std::sqrt(bias_sq / static_cast<double>(n));
  }
  if (rms == 0.0) rms = 1.0;
  return SbParams::kCouplingPrefactor / (rms * std::sqrt(static_cast<double>(n)));
}

double resolve_coupling_scale(const IsingProblem& problem, const SbParams& params) {
  return params.coupling_scale ? *params.coupling_scale : default_coupling_scale(problem);
}

double alpha_at(std::size_t k, const SbParams& params) noexcept {
  if (params.n_steps <= 1) return 0.0;
  return params.alpha0 * static_cast<double>(k) / static_cast<double>(params.n_steps - 1);
}

namespace {

/// Holds the per-problem constants and scratch buffers for one trajectory.
class Integrator {
public:
  Integrator(const IsingProblem& problem, const SbParams& params)
      : problem_(problem),
        params_(params),
        c0_(resolve_coupling_scale(problem, params)),
        bias_coeff_(params.balance_bias ? c0_ : params.eta),
        masked_(params.kernel == MatvecKernel::Masked ||
                (params.kernel == MatvecKernel::Auto && problem.uniform.has_value())),
        delta_p_(problem.n_spins) {
    if (params.kernel == MatvecKernel::Masked && !problem.uniform)
      fail(ErrorCode::InvalidArgument, "masked matvec needs a uniform-coupling problem");
    if (masked_) {
      plus_ = DynamicBitset(problem.n_spins);
      minus_ = DynamicBitset(problem.n_spins);
      interior_ = DynamicBitset(problem.n_spins);
    }
  }

  void step(std::vector<double>& x, std::vector<double>& p, std::size_t k) {
    const std::size_t n = problem_.n_spins;
    if (masked_)
      matvec_masked(x);
    else
      matvec_dense(x);

    const double dt = params_.dt;
    const double detune = params_.alpha0 - alpha_at(k, params_);
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] += dt * (-detune * x[i] + bias_coeff_ * problem_.bias[i] + delta_p_[i]);
      x[i] += dt * p[i];
      if (std::abs(x[i]) > 1.0) {
        x[i] = x[i] > 0.0 ? 1.0 : -1.0;
        p[i] = 0.0;
      }
      finite = finite && std::isfinite(x[i]) && std::isfinite(p[i]);
    }
    if (!finite)
      fail(ErrorCode::Divergence, "non-finite oscillator state at step " + std::to_string(k));
#ifndef NDEBUG
    for (double xi : x) assert(std::abs(xi) <= 1.0);
#endif
  }

private:
  void matvec_dense(const std::vector<double>& x) {
    const std::size_t n = problem_.n_spins;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = problem_.coupling.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
      delta_p_[i] = c0_ * acc;
    }
  }

  // Oscillators pinned at a wall contribute exactly +/-1, so their part of
  // the row sum is a popcount difference; only interior ones are summed.
  void matvec_masked(const std::vector<double>& x) {
    const std::size_t n = problem_.n_spins;
    plus_.clear();
    minus_.clear();
    interior_.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] == 1.0)
        plus_.set(j);
      else if (x[j] == -1.0)
        minus_.set(j);
      else
        interior_.set(j);
    }
    const BitMatrix& support = *problem_.uniform->support;
    const double scale = c0_ * problem_.uniform->value;
    const auto plus = plus_.words();
    const auto minus = minus_.words();
    const auto interior = interior_.words();
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = support.row(i);
      long long pinned = 0;
      double free_sum = 0.0;
      for (std::size_t w = 0; w < row.size(); ++w) {
        pinned += std::popcount(row[w] & plus[w]);
        pinned -= std::popcount(row[w] & minus[w]);
        Word bits = row[w] & interior[w];
        while (bits) {
          free_sum += x[w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits))];
          bits &= bits - 1;
        }
      }
      delta_p_[i] = scale * (static_cast<double>(pinned) + free_sum);
    }
  }

  const IsingProblem& problem_;
  const SbParams& params_;
  double c0_;
  double bias_coeff_;
  bool masked_;
  std::vector<double> delta_p_;
  DynamicBitset plus_;
  DynamicBitset minus_;
  DynamicBitset interior_;
};

void check_state(const SbState& s, const IsingProblem& problem) {
  if (s.x.size() != problem.n_spins || s.p.size() != problem.n_spins)
    fail(ErrorCode::InvalidArgument, "SB state size does not match the " +
                                         std::to_string(problem.n_spins) + "-spin problem");
}

}  // namespace

SbState sb_step(const SbState& state, const IsingProblem& problem, const SbParams& params,
                std::size_t k) {
  params.validate();
  check_state(state, problem);
  SbState next = state;
  Integrator integrator(problem, params);
  integrator.step(next.x, next.p, k);
  next.step = k + 1;
  return next;
}

SbState initial_state(std::size_t n, std::uint64_t seed, std::size_t run_index) {
  SplitMix64 rng(stream_seed(seed, run_index));
  SbState s;
  s.x.resize(n);
  s.p.assign(n, 0.0);
  for (auto& xi : s.x) xi = rng.uniform(-0.1, 0.1);
  return s;
}

std::vector<Spin> digitize(const std::vector<double>& x) {
  std::vector<Spin> spins(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) spins[i] = x[i] >= 0.0 ? Spin{1} : Spin{-1};
  return spins;
}

std::vector<SbRunResult> sb_solve(const IsingProblem& problem, const SbParams& params,
                                  unsigned threads) {
  params.validate();
  std::vector<SbRunResult> results(params.restarts);
  parallel_for(params.restarts, threads, [&](std::size_t r) {
    SbRunResult& out = results[r];
    out.run_index = r;
    out.seed_used = stream_seed(params.seed, r);
    SbState s = initial_state(problem.n_spins, params.seed, r);
    Integrator integrator(problem, params);
    std::size_t k = 0;
    try {
      for (; k < params.n_steps; ++k) integrator.step(s.x, s.p, k);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Divergence) throw;
      out.failed = true;
      out.failed_step = k;
      out.failure = e.what();
      out.energy = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    out.spins = digitize(s.x);
    out.energy = problem.energy(out.spins);
    out.decoded = decode(out.spins);
  });
  return results;
}

SbMisResult solve_mis_sb_detailed(const MarketGraph& graph, const SbParams& params,
                                  const SbMisOptions& options) {
  const IsingProblem ising = qubo_to_ising(to_qubo(graph, options.penalty, options.reward));
  SbMisResult result;
  result.runs = sb_solve(ising, params, options.threads);
  for (const auto& run : result.runs) {
    if (run.failed) continue;
    auto nodes = options.repair ? repair(graph, run.decoded) : run.decoded;
    result.candidates.push_back(make_solution(graph, std::move(nodes), SolverKind::Sb));
  }
  if (!result.candidates.empty()) result.best = select_best(result.candidates);
  return result;
}

std::optional<MisSolution> solve_mis_sb(const MarketGraph& graph, const SbParams& params,
                                        const SbMisOptions& options) {
  return solve_mis_sb_detailed(graph, params, options).best;
}

}  // namespace misport
