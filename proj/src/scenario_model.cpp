#include "gridplan/scenario_model.hpp"

#include "csv.hpp"
#include "gridplan/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace gridplan {

std::string_view to_string(OutageClass c) { return c == OutageClass::routine ? "routine" : "resilience"; }

OutageClass parse_outage_class(std::string_view text) {
  if (text == "routine") return OutageClass::routine;
  if (text == "resilience") return OutageClass::resilience;
  throw SchemaError("outage class must be 'routine' or 'resilience', got '" + std::string(text) + "'");
}

ScenarioSet::ScenarioSet(std::vector<OutageScenario> failures, std::vector<std::string> warnings)
    : warnings_(std::move(warnings)) {
  std::vector<std::string> violations;
  double mass = 0.0;
  for (auto& s : failures) {
    std::sort(s.state.failed_lines.begin(), s.state.failed_lines.end());
    s.state.failed_lines.erase(std::unique(s.state.failed_lines.begin(), s.state.failed_lines.end()),
                               s.state.failed_lines.end());
    if (s.state.empty()) violations.push_back("scenario '" + s.id + "': no failed lines");
    if (s.duration_periods < 1) violations.push_back("scenario '" + s.id + "': duration must be >= 1 period");
    if (!(s.probability >= 0.0)) violations.push_back("scenario '" + s.id + "': probability must be >= 0");
    mass += s.probability;
  }
  if (mass > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "scenario probabilities per start slot sum to " << mass << " > 1";
    violations.push_back(msg.str());
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));

  scenarios_.reserve(failures.size() + 1);
  scenarios_.push_back(OutageScenario{"no_failure", {}, 0, OutageClass::routine, std::max(0.0, 1.0 - mass)});
  for (auto& s : failures) scenarios_.push_back(std::move(s));
}

void check_failure_lines(const NetworkTopology& topology, const FailureState& state, std::string_view owner) {
  for (const auto l : state.failed_lines) {
    if (l >= topology.lines().size()) {
      throw ValidationError(std::string(owner) + ": unknown line index " + std::to_string(l));
    }
    if (topology.lines()[l].status != AssetStatus::existing) {
      throw ValidationError(std::string(owner) + ": line '" + topology.lines()[l].id + "' is a candidate and cannot fail");
    }
  }
}

namespace {

int periods_for(double hours, double hours_per_period, const std::string& owner) {
  if (!(hours > 0.0)) throw ValidationError(owner + ": duration must be positive");
  return std::max(1, static_cast<int>(std::ceil(hours / hours_per_period - 1e-9)));
}

std::size_t existing_line(const NetworkTopology& topology, const std::string& id, const std::string& owner) {
  std::size_t index = 0;
  try {
    index = topology.line_index(id);
  } catch (const ValidationError&) {
    throw ValidationError(owner + ": unknown line id '" + id + "'");
  }
  if (topology.lines()[index].status != AssetStatus::existing) {
    throw ValidationError(owner + ": line '" + id + "' is a candidate and cannot fail");
  }
  return index;
}

}  // namespace

ScenarioSet build_from_rates(const NetworkTopology& topology, std::span<const LineOutageRate> rates,
                             std::span<const ExtremeEvent> events) {
  double slots = 0.0;
  for (const auto& d : topology.days()) slots += d.weight_days * static_cast<double>(topology.periods());
  const double delta = topology.hours_per_period();

  std::vector<OutageScenario> failures;
  std::vector<std::string> warnings;
  auto add = [&](std::string id, FailureState state, double rate, double hours, OutageClass cls) {
    if (!(rate >= 0.0)) throw ValidationError(id + ": rate must be >= 0");
    const double probability = rate / slots;
    if (probability >= 1.0) warnings.push_back(id + ": start-slot probability saturates at " + std::to_string(probability));
    failures.push_back(OutageScenario{id, std::move(state), periods_for(hours, delta, id), cls, probability});
  };

  for (const auto& r : rates) {
    const std::string owner = "outage rate for line '" + r.line_id + "'";
    const auto l = existing_line(topology, r.line_id, owner);
    if (r.rate_per_year == 0.0) continue;
    add("routine_" + r.line_id, FailureState{{l}}, r.rate_per_year, r.mttr_hours, OutageClass::routine);
  }
  for (const auto& e : events) {
    const std::string owner = "event '" + e.id + "'";
    FailureState state;
    for (const auto& id : e.lines) state.failed_lines.push_back(existing_line(topology, id, owner));
    if (state.failed_lines.empty()) throw ValidationError(owner + ": no lines");
    add(e.id, std::move(state), e.rate_per_year, e.duration_hours, e.outage_class);
  }
  return ScenarioSet(std::move(failures), std::move(warnings));
}

std::vector<std::string> substation_outage_lines(const NetworkTopology& topology, std::string_view substation) {
  const auto n = topology.node_index(substation);
  if (!topology.nodes()[n].is_substation) {
    throw ValidationError("node '" + std::string(substation) + "' is not a substation");
  }
  std::vector<std::string> out;
  for (const auto l : topology.existing_lines()) {
    if (topology.line_from(l) == n || topology.line_to(l) == n) out.push_back(topology.lines()[l].id);
  }
  return out;
}

StateCatalog state_catalog(const ScenarioSet& scenarios) {
  StateCatalog catalog;
  catalog.states.push_back(FailureState{});
  std::map<std::vector<std::size_t>, std::size_t> index{{{}, 0}};
  for (const auto& s : scenarios.scenarios()) {
    const auto [it, inserted] = index.emplace(s.state.failed_lines, catalog.states.size());
    if (inserted) catalog.states.push_back(s.state);
    catalog.state_of_scenario.push_back(it->second);
  }
  return catalog;
}

PeriodWindow outage_window(std::size_t start, int duration_periods, std::size_t periods) {
  const std::size_t k = static_cast<std::size_t>(std::max(0, duration_periods));
  return PeriodWindow{start, std::min(start + k, periods - 1)};
}

std::vector<LineOutageRate> load_outage_rates(const std::filesystem::path& csv) {
  const auto table = detail::read_csv(csv, {"line_id", "rate_per_year", "mttr_hours"});
  std::vector<LineOutageRate> out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    out.push_back(LineOutageRate{table.text(r, "line_id"), table.number(r, "rate_per_year"), table.number(r, "mttr_hours")});
  }
  return out;
}

std::vector<ExtremeEvent> load_extreme_events(const std::filesystem::path& json_path, const NetworkTopology& topology) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(detail::read_text(json_path));
  } catch (const json::parse_error& e) {
    throw SchemaError(json_path.string() + ": " + e.what());
  }
  std::vector<ExtremeEvent> out;
  try {
    for (const auto& item : j) {
      ExtremeEvent e;
      e.id = item.at("id").get<std::string>();
      if (item.contains("substation")) {
        e.lines = substation_outage_lines(topology, item.at("substation").get<std::string>());
      }
      for (const auto& l : item.value("lines", json::array())) e.lines.push_back(l.get<std::string>());
      e.rate_per_year = item.at("rate_per_year").get<double>();
      e.duration_hours = item.at("duration_hours").get<double>();
      e.outage_class = parse_outage_class(item.value("class", std::string("resilience")));
      out.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw SchemaError(json_path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace gridplan
