#pragma once

#include "misport/backtest.hpp"
#include "misport/market_graph.hpp"
#include "misport/mis_qubo.hpp"
#include "misport/sb_solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace misport {

using Json = nlohmann::ordered_json;

/// Finite numbers pass through; +/-inf become the strings "inf" / "-inf" and
/// NaN becomes null.
Json number_or_marker(double value);
double number_from_marker(const Json& value);

/// `{size, feasible, nodes, tickers, source}`.
Json solution_to_json(const MisSolution& solution, const MarketGraph& graph);
MisSolution solution_from_json(const Json& j);

/// `{n_steps, dt, eta, alpha0, coupling_scale, restarts, seed}`; a null
/// coupling_scale keeps the default prescription. Unknown keys are rejected.
Json sb_params_to_json(const SbParams& params);
SbParams sb_params_from_json(const Json& j);
SbParams load_sb_params(const std::filesystem::path& path);

Json summary_to_json(const Summary& summary);

/// Summary block (null below 12 months) plus one entry per month.
Json report_to_json(const BacktestReport& report);

/// `date,return,cumulative` per holding month.
void write_cumulative_csv(std::ostream& out, const BacktestReport& report);

}  // namespace misport
