#pragma once

// Island-based planning model: post-failure operation is priced through the
// island catalog instead of per-scenario network variables, and only the
// no-failure case carries a network.

#include "gridplan/evaluation.hpp"
#include "gridplan/islanding.hpp"
#include "gridplan/milp.hpp"
#include "gridplan/plan.hpp"
#include "gridplan/scenario_model.hpp"
#include "gridplan/soc_profiles.hpp"

#include <vector>

namespace gridplan {

struct ScalableInstance {
  NetworkTopology topology;
  ScenarioSet scenarios;
  StateCatalog states;
  IslandCatalog catalog;
  SocProfile profiles;
};

ScalableInstance make_scalable_instance(NetworkTopology topology, ScenarioSet scenarios, SocProfile profiles,
                                        const CatalogOptions& options = {});

struct ScalableModel {
  Model model{"scalable"};
  PlanColumns plan;
  // shed[s][d * |T| + t] is the loss-of-load column of scenario s starting at (t, d).
  std::vector<std::vector<VarId>> shed;
  // Base-case imbalance columns with their objective coefficients.
  std::vector<Term> base_imbalance;
};

// Throws ValidationError when the catalog or profiles do not match the instance.
ScalableModel build_scalable_model(const ScalableInstance& instance);

// Closed-form column/row/binary counts of build_scalable_model.
ModelSize scalable_model_size(const ScalableInstance& instance);

// Plan and cost breakdown. Loss costs come from evaluate_plan on the decoded
// plan; base imbalance from the solution.
PlanDecision decode_scalable(const ScalableModel& model, const ScalableInstance& instance, const SolveResult& result);

PlanEvaluation evaluate_plan(const ScalableInstance& instance, const InvestmentPlan& plan);

}  // namespace gridplan
