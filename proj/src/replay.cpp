#include "gridplan/replay.hpp"

#include "gridplan/error.hpp"
#include "gridplan/islanding.hpp"

#include <algorithm>
#include <cmath>

namespace gridplan {

ReplayEvent replay_event(const NetworkTopology& topology, const ExtremeEvent& event, std::size_t start_period) {
  ReplayEvent out;
  out.id = event.id;
  for (const auto& id : event.lines) out.failed_lines.push_back(topology.line_index(id));
  std::sort(out.failed_lines.begin(), out.failed_lines.end());
  out.start_period = start_period;
  out.duration_periods = static_cast<int>(std::ceil(event.duration_hours / topology.hours_per_period() - 1e-9));
  return out;
}

double ReplayResult::served_fraction(std::size_t period) const {
  return demand_kw[period] > 0.0 ? served_kw[period] / demand_kw[period] : 1.0;
}

ReplayResult extreme_event_replay(const NetworkTopology& topology, const InvestmentPlan& plan, const ReplayEvent& event,
                                  std::size_t day) {
  validate_plan(topology, plan);
  const std::size_t T = topology.periods();
  std::vector<std::string> errors;
  if (day >= topology.days().size()) errors.push_back("replay day out of range");
  if (event.start_period >= T) errors.push_back("event '" + event.id + "' starts after the last period");
  if (event.duration_periods < 1 || static_cast<std::size_t>(event.duration_periods) > T) {
    errors.push_back("event '" + event.id + "' duration must lie in [1, " + std::to_string(T) + "] periods");
  }
  FailureState state{event.failed_lines};
  check_failure_lines(topology, state, "event '" + event.id + "'");
  if (!errors.empty()) throw ValidationError(std::move(errors));

  const auto built = built_line_indices(topology, plan);
  const Eigen::VectorXd capacity = storage_capacity_kwh(topology, plan);
  const auto partition = energized_components(topology, event.failed_lines, built);
  const auto window = outage_window(event.start_period, event.duration_periods, T);
  const double delta = topology.hours_per_period();

  ReplayResult r;
  r.event_id = event.id;
  r.day_id = topology.days()[day].id;
  r.storage_kwh = capacity.sum();
  r.demand_kw.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (const auto n : topology.load_nodes()) r.demand_kw[t] += demand(topology, n, t, day);
  }
  r.served_kw = r.demand_kw;
  for (const auto& island : partition.islands) {
    double stored = 0.0;
    for (const auto h : island.storage) stored += capacity[static_cast<Eigen::Index>(h)];
    for (std::size_t t = window.first; t <= window.last; ++t) {
      const double need = delta * island.peak_load_kw * topology.days()[day].load_factor[static_cast<Eigen::Index>(t)];
      const double used = std::min(stored, need);
      stored -= used;
      r.shed_kwh += need - used;
      r.served_kw[t] -= (need - used) / delta;
    }
  }
  for (auto& s : r.served_kw) s = std::max(0.0, s);
  return r;
}

nlohmann::json replay_to_json(const ReplayResult& r) {
  return {{"event", r.event_id},     {"day", r.day_id},           {"demand_kw", r.demand_kw},
          {"served_kw", r.served_kw}, {"shed_kwh", r.shed_kwh}, {"storage_kwh", r.storage_kwh}};
}

}  // namespace gridplan
