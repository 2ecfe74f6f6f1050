#include "gridplan/plan.hpp"

#include "csv.hpp"
#include "gridplan/error.hpp"

#include <algorithm>
#include <cmath>

namespace gridplan {

void validate_plan(const NetworkTopology& topology, const InvestmentPlan& plan) {
  std::vector<std::string> violations;
  for (const auto& id : plan.lines) {
    try {
      const auto l = topology.line_index(id);
      if (topology.lines()[l].status != AssetStatus::candidate) {
        violations.push_back("plan builds line '" + id + "', which is not a candidate");
      }
    } catch (const ValidationError&) {
      violations.push_back("plan builds unknown line '" + id + "'");
    }
  }
  for (const auto& [id, kwh] : plan.storage_kwh) {
    try {
      const auto& s = topology.storage()[topology.storage_index(id)];
      if (s.status != AssetStatus::candidate) {
        violations.push_back("plan builds storage '" + id + "', which is not a candidate");
        continue;
      }
      const double cap = s.max_energy_kwh();
      if (!(kwh >= 0.0) || kwh > cap * (1.0 + 1e-9) + 1e-9) {
        violations.push_back("storage '" + id + "': energy " + detail::format_double(kwh) + " kWh outside [0, " +
                             detail::format_double(cap) + "]");
      }
    } catch (const ValidationError&) {
      violations.push_back("plan builds unknown storage '" + id + "'");
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

std::vector<std::size_t> built_line_indices(const NetworkTopology& topology, const InvestmentPlan& plan) {
  std::vector<std::size_t> out;
  for (const auto l : topology.candidate_lines()) {
    if (plan.lines.count(topology.lines()[l].id)) out.push_back(l);
  }
  return out;
}

Eigen::VectorXd storage_capacity_kwh(const NetworkTopology& topology, const InvestmentPlan& plan) {
  const auto& storage = topology.storage();
  Eigen::VectorXd cap = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(storage.size()));
  for (std::size_t h = 0; h < storage.size(); ++h) {
    const auto i = static_cast<Eigen::Index>(h);
    if (storage[h].status == AssetStatus::existing) {
      cap[i] = storage[h].unit_energy_kwh();
    } else if (const auto it = plan.storage_kwh.find(storage[h].id); it != plan.storage_kwh.end()) {
      cap[i] = it->second;
    }
  }
  return cap;
}

double line_investment_usd(const NetworkTopology& topology, const InvestmentPlan& plan) {
  double total = 0.0;
  for (const auto l : built_line_indices(topology, plan)) total += topology.lines()[l].fixed_cost_usd.value_or(0.0);
  return total;
}

double storage_investment_usd(const NetworkTopology& topology, const InvestmentPlan& plan) {
  double total = 0.0;
  for (const auto& [id, kwh] : plan.storage_kwh) {
    const auto& s = topology.storage()[topology.storage_index(id)];
    total += s.fixed_cost_usd.value_or(0.0) + s.var_cost_usd_per_kwh.value_or(0.0) * kwh;
  }
  return total;
}

std::vector<InvestmentPlan> all_line_plans(const NetworkTopology& topology) {
  const auto& candidates = topology.candidate_lines();
  const std::size_t n = candidates.size();
  if (n >= 31) throw ValidationError("too many candidate lines to enumerate");
  std::vector<InvestmentPlan> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    InvestmentPlan p;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> (n - 1 - i)) & 1U) p.lines.insert(topology.lines()[candidates[i]].id);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void fix_lines(Model& model, const PlanColumns& columns, const NetworkTopology& topology, const InvestmentPlan& plan) {
  validate_plan(topology, plan);
  for (const auto l : topology.candidate_lines()) {
    if (columns.line_build[l]) model.fix(*columns.line_build[l], plan.lines.count(topology.lines()[l].id) ? 1.0 : 0.0);
  }
}

void fix_plan(Model& model, const PlanColumns& columns, const NetworkTopology& topology, const InvestmentPlan& plan) {
  fix_lines(model, columns, topology, plan);
  for (const auto h : topology.candidate_storage()) {
    const auto& s = topology.storage()[h];
    const auto it = plan.storage_kwh.find(s.id);
    const bool built = it != plan.storage_kwh.end();
    model.fix(*columns.storage_build[h], built ? 1.0 : 0.0);
    model.fix(*columns.storage_size[h], built ? it->second / s.unit_energy_kwh() : 0.0);
  }
}

InvestmentPlan decode_plan(const PlanColumns& columns, const NetworkTopology& topology, const SolveResult& result) {
  if (!result.has_solution()) {
    throw SolverError("cannot decode a plan from a solve with status '" + std::string(to_string(result.status)) + "'",
                      result.raw_output);
  }
  InvestmentPlan plan;
  for (const auto l : topology.candidate_lines()) {
    if (result.value(*columns.line_build[l]) > 0.5) plan.lines.insert(topology.lines()[l].id);
  }
  for (const auto h : topology.candidate_storage()) {
    if (result.value(*columns.storage_build[h]) < 0.5) continue;
    const auto& s = topology.storage()[h];
    const double size = std::clamp(result.value(*columns.storage_size[h]), 0.0, s.size_cap.value_or(0.0));
    plan.storage_kwh[s.id] = size * s.unit_energy_kwh();
  }
  return plan;
}

nlohmann::json plan_to_json(const InvestmentPlan& plan) {
  nlohmann::json storage = nlohmann::json::object();
  for (const auto& [id, kwh] : plan.storage_kwh) storage[id] = kwh;
  return {{"lines", plan.lines}, {"storage_kwh", storage}};
}

InvestmentPlan plan_from_json(const nlohmann::json& j) {
  try {
    const auto& p = j.contains("plan") ? j.at("plan") : j;
    InvestmentPlan plan;
    const auto lines = p.value("lines", nlohmann::json::array());
    const auto storage = p.value("storage_kwh", nlohmann::json::object());
    for (const auto& l : lines) plan.lines.insert(l.get<std::string>());
    for (const auto& [id, kwh] : storage.items()) {
      plan.storage_kwh[id] = kwh.get<double>();
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("plan: ") + e.what());
  }
}

nlohmann::json decision_to_json(const PlanDecision& d) {
  const auto& c = d.costs;
  return {{"plan", plan_to_json(d.plan)},
          {"status", std::string(to_string(d.status))},
          {"solver", d.solver},
          {"instance_hash", d.instance_hash},
          {"objective_usd", d.raw_objective},
          {"costs",
           {{"lambda", c.lambda},
            {"line_investment_usd", c.line_investment_usd},
            {"storage_investment_usd", c.storage_investment_usd},
            {"base_imbalance_usd", c.base_imbalance_usd},
            {"expected_loss_usd", c.expected_loss_usd},
            {"cvar_loss_usd", c.cvar_loss_usd},
            {"objective_usd", c.objective_usd()}}}};
}

void save_plan(const InvestmentPlan& plan, const std::filesystem::path& path) {
  detail::write_text(path, plan_to_json(plan).dump(2) + "\n");
}

InvestmentPlan load_plan(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return plan_from_json(j);
}

}  // namespace gridplan
