#pragma once

#include "gridplan/grid_model.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gridplan {

enum class OutageClass { routine, resilience };

std::string_view to_string(OutageClass c);
OutageClass parse_outage_class(std::string_view text);

// A set of simultaneously failed existing lines, independent of start time and
// duration. Line indices are sorted and unique.
struct FailureState {
  std::vector<std::size_t> failed_lines;

  bool empty() const noexcept { return failed_lines.empty(); }
  bool operator==(const FailureState&) const = default;
};

struct OutageScenario {
  std::string id;
  FailureState state;
  int duration_periods = 0;  // k_s
  OutageClass outage_class = OutageClass::routine;
  double probability = 0.0;  // per (t,d) start slot
};

// Ordered scenarios; index 0 is the reserved no-failure scenario whose
// probability is the residual mass 1 - sum of the failure probabilities.
class ScenarioSet {
public:
  ScenarioSet() : ScenarioSet(std::vector<OutageScenario>{}) {}
  // `failures` excludes the no-failure scenario. Throws ValidationError when a
  // probability is negative, a duration is below one period, a failure set is
  // empty, or the probabilities sum above one.
  explicit ScenarioSet(std::vector<OutageScenario> failures, std::vector<std::string> warnings = {});

  const std::vector<OutageScenario>& scenarios() const noexcept { return scenarios_; }
  std::size_t size() const noexcept { return scenarios_.size(); }
  const OutageScenario& operator[](std::size_t s) const { return scenarios_[s]; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
  std::vector<OutageScenario> scenarios_;
  std::vector<std::string> warnings_;
};

// Every line must exist and be an existing line.
void check_failure_lines(const NetworkTopology& topology, const FailureState& state, std::string_view owner);

struct LineOutageRate {
  std::string line_id;
  double rate_per_year = 0.0;
  double mttr_hours = 1.0;
};

struct ExtremeEvent {
  std::string id;
  std::vector<std::string> lines;
  double rate_per_year = 0.0;
  double duration_hours = 1.0;
  OutageClass outage_class = OutageClass::resilience;
};

// One routine scenario per line with a non-zero rate and one scenario per
// event. Start-slot probability = rate / (sum_d W_d * |T|). Durations are
// rounded up to whole periods.
ScenarioSet build_from_rates(const NetworkTopology& topology, std::span<const LineOutageRate> rates,
                             std::span<const ExtremeEvent> events);

// Lines incident to a substation; failing all of them models a substation outage.
std::vector<std::string> substation_outage_lines(const NetworkTopology& topology, std::string_view substation);

// Deduplicated failure states with the scenario -> state map (x^state).
// State 0 is always the no-failure state.
struct StateCatalog {
  std::vector<FailureState> states;
  std::vector<std::size_t> state_of_scenario;

  bool implies(std::size_t state, std::size_t scenario) const { return state_of_scenario[scenario] == state; }
};

StateCatalog state_catalog(const ScenarioSet& scenarios);

// Inclusive period window [start, min(start + k, |T| - 1)] of an outage that
// begins in period `start`, truncated at the end of the day.
struct PeriodWindow {
  std::size_t first;
  std::size_t last;
};
PeriodWindow outage_window(std::size_t start, int duration_periods, std::size_t periods);

std::vector<LineOutageRate> load_outage_rates(const std::filesystem::path& csv);
// Accepts {"lines": [...]} or {"substation": "<node id>"} per event.
std::vector<ExtremeEvent> load_extreme_events(const std::filesystem::path& json_path, const NetworkTopology& topology);

}  // namespace gridplan
