#pragma once

// Result tables, plot data, static SVG charts and run manifests.

#include "gridplan/monte_carlo.hpp"
#include "gridplan/plan.hpp"
#include "gridplan/replay.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gridplan {

struct PlanningRow {
  double voll_usd_per_kwh = 0.0;
  double lambda = 0.0;
  PlanDecision decision;
};

// Columns: voll_usd_per_kwh, lambda, expected_loss_usd, cvar_loss_usd,
// line_investment_usd, storage_investment_usd, lines_built, storage_kwh,
// wall_time_s. `lines_built` and `storage_kwh` list ids separated by ';'.
std::string planning_table_csv(const std::vector<PlanningRow>& rows);
std::vector<PlanningRow> read_planning_table(const std::filesystem::path& csv);

using NamedReport = std::pair<std::string, MetricReport>;

// One column per plan, one row per metric.
std::string ens_table_csv(const std::vector<NamedReport>& reports);
std::string reliability_table_csv(const std::vector<NamedReport>& reports);
// Columns: plan, bin, lower_kwh, upper_kwh, hours.
std::string histogram_csv(const std::vector<NamedReport>& reports);
// Columns: period, demand_kw, then one served_kw column per plan.
std::string replay_csv(const std::vector<std::pair<std::string, ReplayResult>>& replays);

std::string replay_svg(const std::vector<std::pair<std::string, ReplayResult>>& replays);
std::string histogram_svg(const std::vector<NamedReport>& reports);
std::string frontier_svg(const std::vector<PlanningRow>& rows);

struct ManifestInput {
  std::string role;
  std::filesystem::path path;
};

// Config hash, content hashes of inputs and outputs, solver version. Output
// paths are listed relative to `output_root`, or by file name when it is empty.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             const std::vector<ManifestInput>& inputs, const std::vector<std::filesystem::path>& outputs,
                             const std::string& solver_version, const std::filesystem::path& output_root = {});

}  // namespace gridplan
