#include "gridplan/full_formulation.hpp"

#include "gridplan/error.hpp"
#include "gridplan/risk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gridplan {

bool FullScenario::available(std::size_t line, std::size_t period) const {
  if (period < first_period || period > last_period) return true;
  return !std::binary_search(failed_lines.begin(), failed_lines.end(), line);
}

std::vector<FullScenario> expand_start_slots(const ScenarioSet& scenarios, std::size_t periods) {
  std::vector<FullScenario> out(1);
  out[0].id = scenarios.size() > 0 ? scenarios[0].id : "no_failure";
  double mass = 0.0;
  for (std::size_t s = 1; s < scenarios.size(); ++s) {
    const auto& sc = scenarios[s];
    for (std::size_t t = 0; t < periods; ++t) {
      const auto w = outage_window(t, sc.duration_periods, periods);
      out.push_back(FullScenario{sc.id + "@" + std::to_string(t + 1), sc.state.failed_lines, w.first, w.last,
                                 sc.probability});
      mass += sc.probability;
    }
  }
  if (mass > 1.0 + 1e-12) {
    throw ValidationError("start-slot probabilities sum to " + std::to_string(mass) + " over a day, above one");
  }
  out[0].probability = std::max(0.0, 1.0 - mass);
  return out;
}

FullInstance make_full_instance(NetworkTopology topology, std::vector<FullScenario> scenarios,
                                const FullOptions& options) {
  std::vector<std::string> errors;
  const std::size_t T = topology.periods();
  if (scenarios.empty() || !scenarios[0].failed_lines.empty()) {
    errors.push_back("scenario 0 must be the failure-free base case");
  }
  double mass = 0.0;
  for (auto& sc : scenarios) {
    std::sort(sc.failed_lines.begin(), sc.failed_lines.end());
    sc.failed_lines.erase(std::unique(sc.failed_lines.begin(), sc.failed_lines.end()), sc.failed_lines.end());
    if (!(sc.probability >= 0.0)) errors.push_back("scenario '" + sc.id + "': negative probability");
    mass += sc.probability;
    if (sc.first_period > sc.last_period || sc.last_period >= T) {
      errors.push_back("scenario '" + sc.id + "': outage window outside the day");
    }
    for (const auto l : sc.failed_lines) {
      if (l >= topology.lines().size() || topology.lines()[l].status != AssetStatus::existing) {
        errors.push_back("scenario '" + sc.id + "': failed line is not an existing line");
        break;
      }
    }
  }
  if (std::abs(mass - 1.0) > 1e-9) errors.push_back("scenario probabilities sum to " + std::to_string(mass));
  const std::size_t slots = scenarios.size() * T * topology.days().size();
  if (slots > options.max_scenario_slots) {
    errors.push_back("full model needs " + std::to_string(slots) + " scenario slots, above the guard of " +
                     std::to_string(options.max_scenario_slots));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return FullInstance{std::move(topology), std::move(scenarios), options};
}

FullModel build_full_model(const FullInstance& in) {
  const auto& topo = in.topology;
  const auto& econ = topo.economics();
  const auto& nodes = topo.nodes();
  const auto& lines = topo.lines();
  const auto& storage = topo.storage();
  const auto& days = topo.days();
  const std::size_t T = topo.periods();
  const std::size_t D = days.size();
  const std::size_t S = in.scenarios.size();
  const double delta = topo.hours_per_period();
  const double unit_cost = econ.power_factor * econ.voll_usd_per_kwh;
  const double lambda = econ.lambda_risk;
  const double tail = 1.0 - econ.cvar_alpha;
  const double span = econ.v_max_pu - econ.v_min_pu;

  FullModel out;
  auto& m = out.model;
  auto per = [](std::size_t t) { return std::to_string(t + 1); };

  out.plan.line_build.assign(lines.size(), std::nullopt);
  out.plan.storage_build.assign(storage.size(), std::nullopt);
  out.plan.storage_size.assign(storage.size(), std::nullopt);
  for (const auto l : topo.candidate_lines()) {
    const auto x = m.add_variable(index_name("xL", {lines[l].id}), VarKind::binary);
    m.add_objective(x, lines[l].fixed_cost_usd.value_or(0.0));
    out.plan.line_build[l] = x;
  }
  for (const auto h : topo.candidate_storage()) {
    const auto& s = storage[h];
    const auto fix = m.add_variable(index_name("xSDfix", {s.id}), VarKind::binary);
    const auto var = m.add_variable(index_name("xSDvar", {s.id}), VarKind::continuous, 0.0, kInfinity);
    m.add_objective(fix, s.fixed_cost_usd.value_or(0.0));
    m.add_objective(var, s.var_cost_usd_per_kwh.value_or(0.0) * s.unit_energy_kwh());
    m.add_constraint(index_name("size", {s.id}), {{var, 1.0}, {fix, -s.size_cap.value_or(0.0)}}, Sense::less_equal, 0.0);
    out.plan.storage_build[h] = fix;
    out.plan.storage_size[h] = var;
  }

  std::vector<VarId> zeta(T * D);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t t = 0; t < T; ++t) {
      zeta[d * T + t] = m.add_variable(index_name("zeta", {per(t), days[d].id}), VarKind::continuous, -kInfinity,
                                       kInfinity);
      m.add_objective(zeta[d * T + t], lambda * days[d].weight_days * unit_cost);
    }
  }

  out.loss.assign(S, std::vector<std::vector<Term>>(T * D));
  std::vector<VarId> flow(lines.size()), volt(nodes.size()), prev_soc(storage.size());
  std::vector<LinearExpr> balance(nodes.size());
  for (std::size_t s = 0; s < S; ++s) {
    const auto& sc = in.scenarios[s];
    const double rho = sc.probability;
    for (std::size_t d = 0; d < D; ++d) {
      const auto& dy = days[d].id;
      const double weight = days[d].weight_days * unit_cost;
      // Imbalance in the base case is charged in full; failure trajectories enter the expectation.
      const double imbalance_weight = s == 0 ? weight * delta : (1.0 - lambda) * weight * rho * delta;
      std::vector<VarId> soc0(storage.size());
      for (std::size_t h = 0; h < storage.size(); ++h) {
        const auto& dev = storage[h];
        soc0[h] = m.add_variable(index_name("soc0", {dev.id, dy, sc.id}), VarKind::continuous, 0.0,
                                 dev.status == AssetStatus::existing ? dev.unit_energy_kwh() : kInfinity);
        prev_soc[h] = soc0[h];
      }
      for (std::size_t t = 0; t < T; ++t) {
        const auto ts = per(t);
        const std::size_t k = d * T + t;
        for (auto& b : balance) b = LinearExpr{};
        for (std::size_t n = 0; n < nodes.size(); ++n) {
          volt[n] = m.add_variable(index_name("v", {nodes[n].id, ts, dy, sc.id}), VarKind::continuous, econ.v_min_pu,
                                   econ.v_max_pu);
        }
        for (std::size_t l = 0; l < lines.size(); ++l) {
          const auto& line = lines[l];
          const bool up = sc.available(l, t);
          const bool candidate = line.status == AssetStatus::candidate;
          const double cap = up && !candidate ? line.capacity_kw : (candidate ? kInfinity : 0.0);
          flow[l] = m.add_variable(index_name("f", {line.id, ts, dy, sc.id}), VarKind::continuous, -cap, cap);
          balance[topo.line_to(l)].add(flow[l], 1.0);
          balance[topo.line_from(l)].add(flow[l], -1.0);

          const double drop = line.impedance_pu_per_mile * line.length_mi;
          const double big = span + drop * line.capacity_kw;
          const double slack = up ? 0.0 : big;
          const std::vector<std::string> idx{line.id, ts, dy, sc.id};
          LinearExpr coupling{{flow[l], drop}, {volt[topo.line_from(l)], -1.0}, {volt[topo.line_to(l)], 1.0}};
          if (!candidate) {
            m.add_constraint(index_name("volt_up", idx), coupling, Sense::less_equal, slack);
            m.add_constraint(index_name("volt_lo", idx), coupling, Sense::greater_equal, -slack);
            continue;
          }
          const auto x = *out.plan.line_build[l];
          const double y = up ? 1.0 : 0.0;
          m.add_constraint(index_name("cap_up", idx), {{flow[l], 1.0}, {x, -y * line.capacity_kw}}, Sense::less_equal,
                           0.0);
          m.add_constraint(index_name("cap_lo", idx), {{flow[l], 1.0}, {x, y * line.capacity_kw}},
                           Sense::greater_equal, 0.0);
          LinearExpr up_row = coupling, lo_row = coupling;
          up_row.add(x, big);
          lo_row.add(x, -big);
          m.add_constraint(index_name("volt_up", idx), up_row, Sense::less_equal, big * (2.0 - y));
          m.add_constraint(index_name("volt_lo", idx), lo_row, Sense::greater_equal, -big * (2.0 - y));
        }
        for (std::size_t h = 0; h < storage.size(); ++h) {
          const auto& dev = storage[h];
          const bool candidate = dev.status == AssetStatus::candidate;
          const std::vector<std::string> idx{dev.id, ts, dy, sc.id};
          const auto pin = m.add_variable(index_name("pin", idx), VarKind::continuous, 0.0,
                                          candidate ? kInfinity : dev.p_in_max_kw);
          const auto pout = m.add_variable(index_name("pout", idx), VarKind::continuous, 0.0,
                                           candidate ? kInfinity : dev.p_out_max_kw);
          const auto soc = m.add_variable(index_name("soc", idx), VarKind::continuous, 0.0,
                                          candidate ? kInfinity : dev.unit_energy_kwh());
          balance[topo.storage_node(h)].add(pin, -1.0).add(pout, 1.0);
          m.add_constraint(index_name("soc_dyn", idx),
                           {{soc, 1.0}, {prev_soc[h], -1.0}, {pin, -dev.round_trip_eff * delta}, {pout, delta}},
                           Sense::equal, 0.0);
          if (candidate) {
            const auto size = *out.plan.storage_size[h];
            m.add_constraint(index_name("soc_cap", idx), {{soc, 1.0}, {size, -dev.unit_energy_kwh()}},
                             Sense::less_equal, 0.0);
            m.add_constraint(index_name("pin_cap", idx), {{pin, 1.0}, {size, -dev.p_in_max_kw}}, Sense::less_equal,
                             0.0);
            m.add_constraint(index_name("pout_cap", idx), {{pout, 1.0}, {size, -dev.p_out_max_kw}}, Sense::less_equal,
                             0.0);
          }
          prev_soc[h] = soc;
        }
        auto& loss = out.loss[s][k];
        for (std::size_t n = 0; n < nodes.size(); ++n) {
          const std::vector<std::string> idx{nodes[n].id, ts, dy, sc.id};
          if (nodes[n].is_substation) {
            const auto g = m.add_variable(index_name("g", idx), VarKind::continuous, 0.0,
                                          nodes[n].injection_limit_kw.value_or(kInfinity));
            balance[n].add(g, 1.0);
            m.add_constraint(index_name("bal", idx), balance[n], Sense::equal, 0.0);
            continue;
          }
          const auto minus = m.add_variable(index_name("dminus", idx), VarKind::continuous);
          const auto plus = m.add_variable(index_name("dplus", idx), VarKind::continuous);
          m.add_objective(minus, imbalance_weight);
          m.add_objective(plus, imbalance_weight * econ.surplus_weight);
          loss.push_back({minus, delta});
          loss.push_back({plus, delta * econ.surplus_weight});
          balance[n].add(minus, 1.0).add(plus, -1.0);
          m.add_constraint(index_name("bal", idx), balance[n], Sense::equal, demand(topo, n, t, d));
        }
        const auto psi = m.add_variable(index_name("psi", {ts, dy, sc.id}), VarKind::continuous);
        m.add_objective(psi, lambda * weight * rho / tail);
        LinearExpr cvar_row{{psi, 1.0}, {zeta[k], 1.0}};
        for (const auto& term : loss) cvar_row.add(term.var, -term.coef);
        m.add_constraint(index_name("cvar", {ts, dy, sc.id}), cvar_row, Sense::greater_equal, 0.0);
      }
      for (std::size_t h = 0; h < storage.size(); ++h) {
        m.add_constraint(index_name("soc_per", {storage[h].id, dy, sc.id}), {{prev_soc[h], 1.0}, {soc0[h], -1.0}},
                         Sense::equal, 0.0);
      }
    }
  }
  return out;
}

ModelSize full_model_size(const FullInstance& in) {
  const auto& topo = in.topology;
  const std::size_t T = topo.periods(), D = topo.days().size(), S = in.scenarios.size();
  const std::size_t TDS = T * D * S;
  const std::size_t N = topo.nodes().size(), NS = topo.substations().size(), NL = N - NS;
  const std::size_t LE = topo.existing_lines().size(), LC = topo.candidate_lines().size();
  const std::size_t H = topo.storage().size(), HC = topo.candidate_storage().size();
  ModelSize size;
  size.binaries = LC + HC;
  size.variables = LC + 2 * HC + T * D + TDS * (1 + 2 * NL + LE + LC + NS + N + 3 * H) + H * D * S;
  size.constraints = HC + TDS * (1 + 4 * LC + 2 * LE + N + H + 3 * HC) + H * D * S;
  return size;
}

std::vector<std::vector<double>> full_losses(const FullModel& model, const SolveResult& result) {
  std::vector<std::vector<double>> out(model.loss.size());
  for (std::size_t s = 0; s < model.loss.size(); ++s) {
    out[s].reserve(model.loss[s].size());
    for (const auto& terms : model.loss[s]) {
      double total = 0.0;
      for (const auto& term : terms) total += term.coef * result.value(term.var);
      out[s].push_back(total);
    }
  }
  return out;
}

PlanDecision decode_full(const FullModel& model, const FullInstance& in, const SolveResult& result,
                         const SolveConfig& config) {
  PlanDecision out;
  out.plan = decode_plan(model.plan, in.topology, result);
  out.status = result.status;
  out.raw_objective = result.objective;
  out.wall_time_s = result.wall_time_s;
  out.solver = result.solver;
  out.instance_hash = result.instance_hash;

  auto econ = in.topology.economics();
  const double lambda = econ.lambda_risk;
  econ.lambda_risk = 0.0;
  FullInstance neutral{in.topology.with_economics(econ), in.scenarios, in.options};
  auto fixed = build_full_model(neutral);
  fix_plan(fixed.model, fixed.plan, neutral.topology, out.plan);
  const auto rerun = solve(fixed.model, config);
  if (!rerun.has_solution()) {
    throw SolverError("fixed-plan re-solve ended with status '" + std::string(to_string(rerun.status)) + "'",
                      rerun.raw_output);
  }
  const auto losses = full_losses(fixed, rerun);

  const auto& topo = in.topology;
  const std::size_t T = topo.periods();
  const std::size_t S = in.scenarios.size();
  const double unit_cost = econ.power_factor * econ.voll_usd_per_kwh;
  auto& c = out.costs;
  c.lambda = lambda;
  c.line_investment_usd = line_investment_usd(topo, out.plan);
  c.storage_investment_usd = storage_investment_usd(topo, out.plan);
  Eigen::VectorXd rho(static_cast<Eigen::Index>(S)), slot(static_cast<Eigen::Index>(S));
  for (std::size_t s = 0; s < S; ++s) rho[static_cast<Eigen::Index>(s)] = in.scenarios[s].probability;
  for (std::size_t d = 0; d < topo.days().size(); ++d) {
    const double weight = topo.days()[d].weight_days * unit_cost;
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t k = d * T + t;
      double expected = 0.0;
      for (std::size_t s = 0; s < S; ++s) {
        slot[static_cast<Eigen::Index>(s)] = losses[s][k];
        if (s > 0) expected += in.scenarios[s].probability * losses[s][k];
      }
      c.base_imbalance_usd += weight * losses[0][k];
      c.expected_loss_usd += weight * expected;
      c.cvar_loss_usd += weight * cvar(slot, rho, econ.cvar_alpha);
    }
  }
  return out;
}

}  // namespace gridplan
