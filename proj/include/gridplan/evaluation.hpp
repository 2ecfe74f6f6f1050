#pragma once

// Closed-form loss of load of a fixed plan over a scenario set, using the
// island catalog. Mirrors the island-based planning model term by term.

#include "gridplan/islanding.hpp"
#include "gridplan/plan.hpp"
#include "gridplan/scenario_model.hpp"
#include "gridplan/soc_profiles.hpp"

#include <Eigen/Core>

#include <vector>

namespace gridplan {

struct PlanEvaluation {
  // loss_kwh[s](t, d): energy shed by scenario s starting in period t of day d.
  std::vector<Eigen::MatrixXd> loss_kwh;
  double expected_usd = 0.0;  // annual, sum_d W_d sum_t sum_s rho_s pf VoLL loss
  double cvar_usd = 0.0;      // annual, sum_d W_d sum_t pf VoLL CVaR_alpha over s
  double lambda = 0.0;

  double weighted_usd() const { return (1.0 - lambda) * expected_usd + lambda * cvar_usd; }
};

// Per island: shed = delta * peak * sum of load factors over the outage
// window, minus the storage credit (capacity scaled by the start-period
// profile for routine outages, full capacity for resilience outages). The
// island terms are summed and the total clamped at zero.
PlanEvaluation evaluate_plan(const NetworkTopology& topology, const InvestmentPlan& plan, const StateCatalog& states,
                             const IslandCatalog& catalog, const SocProfile& profiles, const ScenarioSet& scenarios);

}  // namespace gridplan
