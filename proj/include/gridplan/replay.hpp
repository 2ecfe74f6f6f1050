#pragma once

// Deterministic replay of a single extreme event on one typical day.

#include "gridplan/plan.hpp"
#include "gridplan/scenario_model.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gridplan {

struct ReplayEvent {
  std::string id;
  std::vector<std::size_t> failed_lines;
  std::size_t start_period = 0;
  int duration_periods = 1;  // outage covers outage_window(start, duration)
};

// Converts an event to periods of the topology; the duration is rounded up.
ReplayEvent replay_event(const NetworkTopology& topology, const ExtremeEvent& event, std::size_t start_period);

struct ReplayResult {
  std::string event_id;
  std::string day_id;
  std::vector<double> demand_kw;  // per period
  std::vector<double> served_kw;  // per period
  double shed_kwh = 0.0;
  double storage_kwh = 0.0;  // installed storage energy of the plan, existing included

  double served_fraction(std::size_t period) const;
};

// Storage inside each island starts the event full and discharges to cover
// the island's demand until empty; power limits are not binding.
ReplayResult extreme_event_replay(const NetworkTopology& topology, const InvestmentPlan& plan, const ReplayEvent& event,
                                  std::size_t day);

nlohmann::json replay_to_json(const ReplayResult& result);

}  // namespace gridplan
