#pragma once

// Investment plans, their costs, and the bridge between plans and the
// investment columns of a planning model.

#include "gridplan/grid_model.hpp"
#include "gridplan/milp.hpp"
#include "gridplan/solver.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gridplan {

struct InvestmentPlan {
  std::set<std::string> lines;                 // built candidate lines
  std::map<std::string, double> storage_kwh;   // built candidate storage, energy capacity

  bool operator==(const InvestmentPlan&) const = default;
};

// Throws ValidationError unless built lines are candidates and each storage
// energy lies in [0, unit energy * size cap].
void validate_plan(const NetworkTopology& topology, const InvestmentPlan& plan);

std::vector<std::size_t> built_line_indices(const NetworkTopology& topology, const InvestmentPlan& plan);
// Usable energy per storage device: installed energy for existing devices,
// planned energy for candidates (zero when not built).
Eigen::VectorXd storage_capacity_kwh(const NetworkTopology& topology, const InvestmentPlan& plan);

double line_investment_usd(const NetworkTopology& topology, const InvestmentPlan& plan);
double storage_investment_usd(const NetworkTopology& topology, const InvestmentPlan& plan);

// Every combination of candidate lines, in binary counting order over the
// candidate list (first candidate = most significant bit).
std::vector<InvestmentPlan> all_line_plans(const NetworkTopology& topology);

// Investment columns of a planning model, indexed by topology line/storage
// index; empty for existing assets.
struct PlanColumns {
  std::vector<std::optional<VarId>> line_build;
  std::vector<std::optional<VarId>> storage_build;
  std::vector<std::optional<VarId>> storage_size;  // multiplier of the unit energy
};

// Fixes every investment column to the plan.
void fix_plan(Model& model, const PlanColumns& columns, const NetworkTopology& topology, const InvestmentPlan& plan);
// Fixes line columns only; storage stays free.
void fix_lines(Model& model, const PlanColumns& columns, const NetworkTopology& topology, const InvestmentPlan& plan);

InvestmentPlan decode_plan(const PlanColumns& columns, const NetworkTopology& topology, const SolveResult& result);

// Cost breakdown of a plan. The risk-weighted objective is
// investment + base_imbalance + (1 - lambda) * expected + lambda * cvar.
struct CostBreakdown {
  double line_investment_usd = 0.0;
  double storage_investment_usd = 0.0;
  double base_imbalance_usd = 0.0;
  double expected_loss_usd = 0.0;  // annual expected loss-of-load cost
  double cvar_loss_usd = 0.0;      // annual CVaR loss-of-load cost
  double lambda = 0.0;

  double investment_usd() const { return line_investment_usd + storage_investment_usd; }
  double objective_usd() const {
    return investment_usd() + base_imbalance_usd + (1.0 - lambda) * expected_loss_usd + lambda * cvar_loss_usd;
  }
};

struct PlanDecision {
  InvestmentPlan plan;
  CostBreakdown costs;
  double raw_objective = 0.0;
  double wall_time_s = 0.0;
  SolveStatus status = SolveStatus::optimal;
  std::string solver;
  std::string instance_hash;
};

nlohmann::json plan_to_json(const InvestmentPlan& plan);
InvestmentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json decision_to_json(const PlanDecision& decision);

void save_plan(const InvestmentPlan& plan, const std::filesystem::path& path);
// Accepts a bare plan object or a decision file with a "plan" member.
InvestmentPlan load_plan(const std::filesystem::path& path);

}  // namespace gridplan
