#include "misport/json_io.hpp"

#include "misport/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace misport {

Json number_or_marker(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double number_from_marker(const Json& value) {
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (value.is_string()) {
    if (value == "inf") return std::numeric_limits<double>::infinity();
    if (value == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (!value.is_number()) fail(ErrorCode::Parse, "expected a number, got " + value.dump());
  return value.get<double>();
}

Json solution_to_json(const MisSolution& solution, const MarketGraph& graph) {
  Json tickers = Json::array();
  for (std::size_t node : solution.nodes) {
    if (node >= graph.n_nodes()) fail(ErrorCode::Index, "solution node outside the graph");
    tickers.push_back(graph.tickers()[node]);
  }
  Json j;
  j["size"] = solution.size();
  j["feasible"] = solution.feasible;
  j["nodes"] = solution.nodes;
  j["tickers"] = std::move(tickers);
  j["source"] = std::string(to_string(solution.source));
  return j;
}

MisSolution solution_from_json(const Json& j) {
  try {
    MisSolution s;
    s.nodes = j.at("nodes").get<std::vector<std::size_t>>();
    s.feasible = j.at("feasible").get<bool>();
    const auto source = parse_solver_kind(j.at("source").get<std::string>());
    if (!source) fail(ErrorCode::Parse, "unknown solution source");
    s.source = *source;
    if (j.at("size").get<std::size_t>() != s.nodes.size()) fail(ErrorCode::Parse, "size does not match nodes");
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("solution JSON: ") + e.what());
  }
}

Json sb_params_to_json(const SbParams& p) {
  Json j;
  j["n_steps"] = p.n_steps;
  j["dt"] = p.dt;
  j["eta"] = p.eta;
  j["alpha0"] = p.alpha0;
  j["coupling_scale"] = p.coupling_scale ? Json(*p.coupling_scale) : Json(nullptr);
  j["restarts"] = p.restarts;
  j["seed"] = p.seed;
  return j;
}

SbParams sb_params_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::Parse, "solver config must be a JSON object");
  SbParams p;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_steps")
        p.n_steps = value.get<std::size_t>();
      else if (key == "dt")
        p.dt = value.get<double>();
      else if (key == "eta")
        p.eta = value.get<double>();
      else if (key == "alpha0")
        p.alpha0 = value.get<double>();
      else if (key == "coupling_scale")
        p.coupling_scale = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      else if (key == "restarts")
        p.restarts = value.get<std::size_t>();
      else if (key == "seed")
        p.seed = value.get<std::uint64_t>();
      else
        fail(ErrorCode::Parse, "unknown solver config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("solver config: ") + e.what());
  }
  p.validate();
  return p;
}

SbParams load_sb_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::Parse, path.string() + ": invalid JSON");
  return sb_params_from_json(j);
}

Json summary_to_json(const Summary& s) {
  Json j;
  j["annual_return"] = number_or_marker(s.annual_return);
  j["annual_risk"] = number_or_marker(s.annual_risk);
  j["sharpe"] = number_or_marker(s.sharpe);
  j["months"] = s.months;
  return j;
}

Json report_to_json(const BacktestReport& report) {
  const auto& c = report.config;
  Json j;
  j["config"] = {{"theta", c.theta},
                 {"weighting", std::string(to_string(c.weighting))},
                 {"cost_rate", c.cost_rate},
                 {"lookback_days", c.lookback_days},
                 {"solver", std::string(to_string(c.solver))},
                 {"restarts", c.restarts},
                 {"seed", c.seed}};
  j["summary"] = report.summary ? summary_to_json(*report.summary) : Json(nullptr);
  Json months = Json::array();
  for (const auto& m : report.months) {
    Json holdings = Json::object();
    for (const auto& [t, w] : m.holdings) holdings[t] = w;
    months.push_back({{"date", m.date},
                      {"formation_date", m.formation_date},
                      {"return", number_or_marker(m.ret)},
                      {"n_constituents", m.n_constituents},
                      {"mis_size", m.mis_size},
                      {"edge_density", number_or_marker(m.edge_density)},
                      {"turnover", m.turnover},
                      {"cost", m.cost},
                      {"feasible", m.feasible},
                      {"value", m.value_end},
                      {"holdings", std::move(holdings)}});
  }
  j["months"] = std::move(months);
  j["warnings"] = report.warnings;
  return j;
}

void write_cumulative_csv(std::ostream& out, const BacktestReport& report) {
  out << "date,return,cumulative\n";
  out.precision(17);
  for (std::size_t i = 0; i < report.months.size(); ++i)
    out << report.months[i].date << ',' << report.monthly_returns[i] << ',' << report.cumulative[i] << '\n';
}

}  // namespace misport
