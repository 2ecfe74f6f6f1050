#include "gridplan/evaluation.hpp"

#include "gridplan/error.hpp"
#include "gridplan/risk.hpp"

#include <algorithm>

namespace gridplan {

PlanEvaluation evaluate_plan(const NetworkTopology& topology, const InvestmentPlan& plan, const StateCatalog& states,
                             const IslandCatalog& catalog, const SocProfile& profiles, const ScenarioSet& scenarios) {
  validate_plan(topology, plan);
  profiles.check_covers(topology);
  if (catalog.states.size() != states.states.size() || states.state_of_scenario.size() != scenarios.size()) {
    throw ValidationError("island catalog does not match the scenario set");
  }

  const auto& econ = topology.economics();
  const std::size_t periods = topology.periods();
  const std::size_t days = topology.days().size();
  const std::size_t count = scenarios.size();
  const double delta = topology.hours_per_period();
  const double unit_cost = econ.power_factor * econ.voll_usd_per_kwh;
  const auto built = built_line_indices(topology, plan);
  const Eigen::VectorXd capacity = storage_capacity_kwh(topology, plan);

  PlanEvaluation out;
  out.lambda = econ.lambda_risk;
  out.loss_kwh.assign(count, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(days)));

  for (std::size_t s = 1; s < count; ++s) {
    const auto& scenario = scenarios[s];
    const auto& entry = catalog.states[states.state_of_scenario[s]];
    const auto j = entry.combination_for(built);
    if (j >= entry.investments.size()) throw ValidationError("plan combination missing from island catalog");
    const auto& islands = entry.investments[j].islands;
    const bool routine = scenario.outage_class == OutageClass::routine;
    for (std::size_t d = 0; d < days; ++d) {
      const auto& factor = topology.days()[d].load_factor;
      for (std::size_t t = 0; t < periods; ++t) {
        const auto w = outage_window(t, scenario.duration_periods, periods);
        const double load_sum =
            factor.segment(static_cast<Eigen::Index>(w.first), static_cast<Eigen::Index>(w.last - w.first + 1)).sum();
        double loss = 0.0;
        for (const auto& island : islands) {
          loss += delta * load_sum * island.peak_load_kw;
          for (const auto h : island.storage) {
            const double cap = capacity[static_cast<Eigen::Index>(h)];
            loss -= routine ? cap * profiles(h, t, d) : cap;
          }
        }
        out.loss_kwh[s](static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d)) = std::max(0.0, loss);
      }
    }
  }

  Eigen::VectorXd rho(static_cast<Eigen::Index>(count));
  for (std::size_t s = 0; s < count; ++s) rho[static_cast<Eigen::Index>(s)] = scenarios[s].probability;
  Eigen::VectorXd slot(static_cast<Eigen::Index>(count));
  for (std::size_t d = 0; d < days; ++d) {
    const double weight = topology.days()[d].weight_days * unit_cost;
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t s = 0; s < count; ++s) {
        slot[static_cast<Eigen::Index>(s)] = out.loss_kwh[s](static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
      }
      out.expected_usd += weight * expectation(slot, rho);
      out.cvar_usd += weight * cvar(slot, rho, econ.cvar_alpha);
    }
  }
  return out;
}

}  // namespace gridplan
