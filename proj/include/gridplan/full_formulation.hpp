#pragma once

// Scenario-based planning model with a full network copy per scenario.

#include "gridplan/milp.hpp"
#include "gridplan/plan.hpp"
#include "gridplan/scenario_model.hpp"
#include "gridplan/solver.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gridplan {

// A day-long operating trajectory. Lines in `failed_lines` are unavailable in
// periods [first_period, last_period]; an empty set is the base case.
struct FullScenario {
  std::string id;
  std::vector<std::size_t> failed_lines;
  std::size_t first_period = 0;
  std::size_t last_period = 0;
  double probability = 0.0;

  bool available(std::size_t line, std::size_t period) const;
};

struct FullOptions {
  // Guard on |scenarios| * |T| * |D|.
  std::size_t max_scenario_slots = 200000;
};

struct FullInstance {
  NetworkTopology topology;
  std::vector<FullScenario> scenarios;  // index 0 is the base case
  FullOptions options;
};

// One trajectory per (failure scenario, start period), each with the
// start-slot probability; the base case takes the residual 1 - sum. Throws
// ValidationError when the residual is negative.
std::vector<FullScenario> expand_start_slots(const ScenarioSet& scenarios, std::size_t periods);

// Throws ValidationError when scenario 0 is not a failure-free trajectory,
// probabilities do not sum to one, a failed line is not an existing line, a
// window leaves the day, or the size guard is exceeded.
FullInstance make_full_instance(NetworkTopology topology, std::vector<FullScenario> scenarios,
                                const FullOptions& options = {});

struct FullModel {
  Model model{"full"};
  PlanColumns plan;
  // loss[s][d * |T| + t]: imbalance energy terms (kWh) of scenario s.
  std::vector<std::vector<std::vector<Term>>> loss;
};

FullModel build_full_model(const FullInstance& instance);

ModelSize full_model_size(const FullInstance& instance);

// Loss in kWh per scenario and slot under a solution.
std::vector<std::vector<double>> full_losses(const FullModel& model, const SolveResult& result);

// Decodes the plan, then re-solves the model with the plan fixed and lambda = 0
// to obtain each trajectory's least imbalance, from which the expected and
// CVaR components are computed.
PlanDecision decode_full(const FullModel& model, const FullInstance& instance, const SolveResult& result,
                         const SolveConfig& config);

}  // namespace gridplan
