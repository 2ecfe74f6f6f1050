#pragma once

// Run configuration and the plan / simulate / replay / report commands.

#include "gridplan/grid_model.hpp"
#include "gridplan/monte_carlo.hpp"
#include "gridplan/reports.hpp"
#include "gridplan/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gridplan {

enum class Formulation { scalable, full };

std::string_view to_string(Formulation f);
Formulation parse_formulation(std::string_view text);

struct ReplaySpec {
  std::string event;
  std::string day;
  std::size_t start_period = 1;  // 1-based
};

struct RunConfig {
  std::filesystem::path network;
  NetworkFormat network_format = NetworkFormat::csv_dir;
  std::optional<std::filesystem::path> outage_rates;
  std::optional<std::filesystem::path> extreme_events;
  std::optional<std::filesystem::path> profiles;
  Formulation formulation = Formulation::scalable;
  std::vector<double> lambdas{0.0, 0.5, 1.0};
  std::vector<double> volls;  // empty: the network's VoLL
  std::optional<double> cvar_alpha;
  std::optional<double> surplus_weight;
  SolveConfig solver;
  std::size_t max_relevant_candidates = 16;
  std::size_t max_scenario_slots = 200000;
  MonteCarloOptions simulation;
  std::map<std::string, std::filesystem::path> plans;  // simulate/replay; empty: the plan table in output_dir
  std::optional<ReplaySpec> replay;
  bool dump_islands = false;
  std::filesystem::path output_dir = "out";

  // Throws ValidationError for lambda outside [0,1] or non-positive VoLL.
  void validate() const;
};

// Relative paths resolve against `base_dir`. Throws SchemaError on unknown keys or wrong types.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& config);

std::string plan_name(double voll, double lambda);
inline constexpr const char* kBaselineName = "No Inv.";

// Errors keep their type; messages are prefixed with the failing stage.
std::vector<PlanningRow> cmd_plan(const RunConfig& config);
std::vector<NamedReport> cmd_simulate(const RunConfig& config);
std::vector<std::pair<std::string, ReplayResult>> cmd_replay(const RunConfig& config);
// Regenerates charts and a summary from existing outputs.
void cmd_report(const RunConfig& config);

}  // namespace gridplan
