#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ohmpath/augment.hpp"
#include "ohmpath/error.hpp"
#include "ohmpath/network.hpp"
#include "ohmpath/optimizer.hpp"
#include "ohmpath/penalty.hpp"

namespace ohmpath {

inline constexpr int kSchemaVersion = 1;

inline nlohmann::json augmented_summary_json(const AugmentedGraph& ag) {
  return {
      {"case", std::string(case_name(ag.case_tag))},
      {"v_in", ag.v_in},
      {"v_out", ag.v_out},
      {"n_total", ag.n_total},
      {"base_nodes", ag.base.node_count},
      {"base_arcs", ag.base_arc_count()},
      {"added_nodes", ag.added_nodes},
  };
}

inline nlohmann::json solution_to_json(const NetworkSolution& sol) {
  nlohmann::json currents = nlohmann::json::array();
  for (std::size_t k = 0; k < sol.arcs.size(); ++k)
    currents.push_back({sol.arcs[k].u, sol.arcs[k].v, sol.current[k]});
  nlohmann::json support = nlohmann::json::array();
  for (const Arc& a : sol.support) support.push_back({a.u, a.v});
  std::vector<int> powered_nodes;
  for (std::size_t node = 0; node < sol.powered.size(); ++node)
    if (sol.powered[node]) powered_nodes.push_back(static_cast<int>(node));
  return {
      {"potentials", sol.potentials},
      {"currents", currents},
      {"powered_nodes", powered_nodes},
      {"components", sol.component},
      {"support", support},
      {"kcl_residual", sol.kcl_residual},
  };
}

namespace detail {

inline nlohmann::json per_node_map(const std::vector<double>& values) {
  nlohmann::json map = nlohmann::json::object();
  for (std::size_t node = 0; node < values.size(); ++node)
    map[std::to_string(node)] = values[node];
  return map;
}

}  // namespace detail

inline nlohmann::json report_to_json(const PenaltyReport& report, const AugmentedGraph& ag,
                                     const PenaltyWeights& weights) {
  nlohmann::json doc = {
      {"schema", kSchemaVersion},
      {"graph", augmented_summary_json(ag)},
      {"weights",
       {{"alpha1", weights.alpha1}, {"alpha2", weights.alpha2}, {"exponent", weights.exponent}}},
      {"outflow_per_node", detail::per_node_map(report.outflow_per_node)},
      {"branch_per_node", detail::per_node_map(report.branch_per_node)},
      {"inflow_per_node", detail::per_node_map(report.inflow_per_node)},
      {"l_outflow", report.l_outflow},
      {"l_branch", report.l_branch},
      {"total", report.total},
  };
  if (report.gradient) doc["gradient"] = *report.gradient;
  return doc;
}

inline nlohmann::json run_to_json(const OptimizerRun& run) {
  nlohmann::json starts = nlohmann::json::array();
  for (const StartRecord& record : run.starts) {
    starts.push_back({
        {"index", record.index},
        {"initial", record.initial.values},
        {"final", record.final_config.values},
        {"value", record.final_value},
        {"iterations", record.iterations},
        {"status", std::string(start_status_name(record.status))},
        {"nonsmooth_retries", record.nonsmooth_retries},
    });
  }
  nlohmann::json trajectory = nlohmann::json::array();
  for (auto [iter, value] : run.trajectory) trajectory.push_back({iter, value});
  return {
      {"schema", kSchemaVersion},
      {"classification", std::string(classification_name(run.classification))},
      {"best_value", run.best_value},
      {"best_start", run.best_start_index},
      {"best_config", run.best_config.values},
      {"rounded", run.rounded.values},
      {"trajectory", trajectory},
      {"starts", starts},
  };
}

inline std::string trajectory_to_csv(const OptimizerRun& run) {
  std::ostringstream out;
  out << "iter,objective\n";
  for (auto [iter, value] : run.trajectory) {
    out.precision(17);
    out << iter << ',' << value << '\n';
  }
  return out.str();
}

/// Parses "--g"-style values: a comma list "1,0.5,0" or "@file" holding a
/// JSON array of numbers.
inline ConductanceConfig parse_config_arg(const std::string& arg) {
  ConductanceConfig g;
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) fail(ErrorCode::InvalidParameter, "cannot open config file " + arg.substr(1));
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::MalformedJson, e.what());
    }
    if (!doc.is_array()) fail(ErrorCode::MalformedJson, "config file must hold a JSON array");
    for (const auto& value : doc) {
      if (!value.is_number()) fail(ErrorCode::MalformedJson, "config entries must be numbers");
      g.values.push_back(value.get<double>());
    }
    return g;
  }
  std::istringstream in(arg);
  std::string token;
  while (std::getline(in, token, ',')) {
    try {
      std::size_t used = 0;
      double value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      g.values.push_back(value);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidParameter, "bad conductance value '" + token + "'");
    }
  }
  if (g.values.empty()) fail(ErrorCode::InvalidParameter, "empty conductance vector");
  return g;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidParameter, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidParameter, "cannot write " + path);
  out << content;
}

}  // namespace ohmpath
