#include "gridplan/scalable_formulation.hpp"

#include "gridplan/error.hpp"

#include <algorithm>
#include <string>

namespace gridplan {

ScalableInstance make_scalable_instance(NetworkTopology topology, ScenarioSet scenarios, SocProfile profiles,
                                        const CatalogOptions& options) {
  for (std::size_t s = 1; s < scenarios.size(); ++s) {
    check_failure_lines(topology, scenarios[s].state, "scenario '" + scenarios[s].id + "'");
  }
  profiles.check_covers(topology);
  auto states = state_catalog(scenarios);
  auto catalog = build_catalog(topology, states, options);
  return ScalableInstance{std::move(topology), std::move(scenarios), std::move(states), std::move(catalog),
                          std::move(profiles)};
}

namespace {

void check_instance(const ScalableInstance& in) {
  if (in.states.state_of_scenario.size() != in.scenarios.size()) {
    throw ValidationError("state catalog does not cover the scenario set");
  }
  if (in.catalog.states.size() != in.states.states.size()) {
    throw ValidationError("island catalog does not cover every failure state");
  }
  in.profiles.check_covers(in.topology);
}

double soc_aux_bound(const StorageDevice& s) {
  const double cap = s.status == AssetStatus::candidate ? std::max(s.size_cap.value_or(0.0), 1.0) : 1.0;
  return s.hours_to_full * cap * s.p_in_max_kw;
}

}  // namespace

ScalableModel build_scalable_model(const ScalableInstance& in) {
  check_instance(in);
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

  ScalableModel out;
  auto& m = out.model;
  auto per = [](std::size_t t) { return std::to_string(t + 1); };

  // Investment columns.
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

  // Risk columns.
  std::vector<VarId> zeta(T * D);
  out.shed.assign(S, std::vector<VarId>(T * D));
  for (std::size_t d = 0; d < D; ++d) {
    const double weight = days[d].weight_days * unit_cost;
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t k = d * T + t;
      zeta[k] = m.add_variable(index_name("zeta", {per(t), days[d].id}), VarKind::continuous, -kInfinity, kInfinity);
      m.add_objective(zeta[k], lambda * weight);
      for (std::size_t s = 0; s < S; ++s) {
        const auto& sc = in.scenarios[s];
        const std::vector<std::string> idx{per(t), days[d].id, sc.id};
        const auto shed =
            m.add_variable(index_name("Ldag", idx), VarKind::continuous, 0.0, s == 0 ? 0.0 : kInfinity);
        const auto psi = m.add_variable(index_name("psi", idx), VarKind::continuous);
        m.add_objective(shed, (1.0 - lambda) * weight * sc.probability);
        m.add_objective(psi, lambda * weight * sc.probability / tail);
        m.add_constraint(index_name("cvar", idx),
                         {{psi, 1.0}, {zeta[k], 1.0}, {shed, -1.0}}, Sense::greater_equal, 0.0);
        out.shed[s][k] = shed;
      }
    }
  }

  // Island catalog: indicator, island load and storage association columns.
  std::vector<VarId> soc_ref(storage.size());
  for (std::size_t h = 0; h < storage.size(); ++h) {
    const auto& s = storage[h];
    const bool candidate = s.status == AssetStatus::candidate;
    soc_ref[h] = m.add_variable(index_name("SOCref", {s.id}), VarKind::continuous, 0.0,
                                candidate ? kInfinity : s.unit_energy_kwh());
    if (candidate) {
      m.add_constraint(index_name("socref_cap", {s.id}),
                       {{soc_ref[h], 1.0}, {*out.plan.storage_size[h], -s.unit_energy_kwh()}}, Sense::less_equal, 0.0);
    }
  }

  struct IslandColumns {
    VarId load;
    std::vector<std::pair<std::size_t, VarId>> storage;  // (device, SOCaux)
  };
  // columns[c][j][e]
  std::vector<std::vector<std::vector<IslandColumns>>> columns(in.catalog.states.size());
  for (std::size_t c = 0; c < in.catalog.states.size(); ++c) {
    const auto& entry = in.catalog.states[c];
    const auto cs = std::to_string(c);
    LinearExpr pick;
    columns[c].resize(entry.investments.size());
    for (std::size_t j = 0; j < entry.investments.size(); ++j) {
      const auto& inv = entry.investments[j];
      const auto js = std::to_string(j);
      const auto ind = m.add_variable(index_name("xind", {cs, js}), VarKind::binary);
      pick.add(ind, 1.0);

      // x_ind - 1 within +-(#on lines not built + #off lines built).
      LinearExpr lower, upper;
      lower.add(ind, 1.0);
      upper.add(ind, 1.0);
      for (const auto l : inv.lines_on) {
        lower.add(*out.plan.line_build[l], -1.0);
        upper.add(*out.plan.line_build[l], 1.0);
      }
      for (const auto l : inv.lines_off) {
        lower.add(*out.plan.line_build[l], 1.0);
        upper.add(*out.plan.line_build[l], -1.0);
      }
      const double on = static_cast<double>(inv.lines_on.size());
      m.add_constraint(index_name("link_lo", {cs, js}), lower, Sense::greater_equal, 1.0 - on);
      m.add_constraint(index_name("link_up", {cs, js}), upper, Sense::less_equal, 1.0 + on);

      for (std::size_t e = 0; e < inv.islands.size(); ++e) {
        const auto& island = inv.islands[e];
        const auto es = std::to_string(e);
        IslandColumns cols;
        cols.load = m.add_variable(index_name("L", {cs, js, es}), VarKind::continuous, 0.0, kInfinity);
        const double peak = island.peak_load_kw;
        m.add_constraint(index_name("island_up", {cs, js, es}), {{cols.load, -1.0}, {ind, peak}}, Sense::less_equal, 0.0);
        m.add_constraint(index_name("island_lo", {cs, js, es}), {{cols.load, -1.0}, {ind, -peak}},
                         Sense::greater_equal, -2.0 * peak);
        for (const auto h : island.storage) {
          const auto& dev = storage[h];
          const double big = soc_aux_bound(dev);
          const auto aux = m.add_variable(index_name("SOCaux", {dev.id, cs, js, es}), VarKind::continuous, -kInfinity,
                                          kInfinity);
          const auto name = std::vector<std::string>{dev.id, cs, js, es};
          m.add_constraint(index_name("aux_ref_up", name), {{soc_ref[h], 1.0}, {aux, -1.0}, {ind, big}},
                           Sense::less_equal, big);
          m.add_constraint(index_name("aux_ref_lo", name), {{soc_ref[h], 1.0}, {aux, -1.0}, {ind, -big}},
                           Sense::greater_equal, -big);
          m.add_constraint(index_name("aux_on_up", name), {{aux, 1.0}, {ind, -big}}, Sense::less_equal, 0.0);
          m.add_constraint(index_name("aux_on_lo", name), {{aux, 1.0}, {ind, big}}, Sense::greater_equal, 0.0);
          cols.storage.emplace_back(h, aux);
        }
        columns[c][j].push_back(std::move(cols));
      }
    }
    m.add_constraint(index_name("select", {cs}), pick, Sense::equal, 1.0);
  }

  // Loss-of-load lower bounds for failure scenarios.
  for (std::size_t s = 1; s < S; ++s) {
    const auto& sc = in.scenarios[s];
    const auto c = in.states.state_of_scenario[s];
    const bool routine = sc.outage_class == OutageClass::routine;
    for (std::size_t d = 0; d < D; ++d) {
      const auto& factor = days[d].load_factor;
      for (std::size_t t = 0; t < T; ++t) {
        const auto w = outage_window(t, sc.duration_periods, T);
        const double load_sum =
            factor.segment(static_cast<Eigen::Index>(w.first), static_cast<Eigen::Index>(w.last - w.first + 1)).sum();
        LinearExpr e;
        e.add(out.shed[s][d * T + t], 1.0);
        for (const auto& per_j : columns[c]) {
          for (const auto& island : per_j) {
            e.add(island.load, -delta * load_sum);
            for (const auto& [h, aux] : island.storage) e.add(aux, routine ? in.profiles(h, t, d) : 1.0);
          }
        }
        m.add_constraint(index_name("shed", {per(t), days[d].id, sc.id}), e, Sense::greater_equal, 0.0);
      }
    }
  }

  // No-failure operation: existing network, storage following its profile.
  std::vector<std::vector<Term>> inflow(nodes.size());
  std::vector<VarId> flow(lines.size());
  std::vector<VarId> volt(nodes.size());
  for (std::size_t d = 0; d < D; ++d) {
    const double weight = days[d].weight_days * unit_cost * delta;
    for (std::size_t t = 0; t < T; ++t) {
      const auto ts = per(t);
      const auto& dy = days[d].id;
      for (auto& terms : inflow) terms.clear();
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        volt[n] = m.add_variable(index_name("v", {nodes[n].id, ts, dy}), VarKind::continuous, econ.v_min_pu,
                                 econ.v_max_pu);
      }
      for (const auto l : topo.existing_lines()) {
        const auto& line = lines[l];
        flow[l] = m.add_variable(index_name("f", {line.id, ts, dy}), VarKind::continuous, -line.capacity_kw,
                                 line.capacity_kw);
        inflow[topo.line_to(l)].push_back({flow[l], 1.0});
        inflow[topo.line_from(l)].push_back({flow[l], -1.0});
        m.add_constraint(index_name("volt", {line.id, ts, dy}),
                         {{flow[l], line.impedance_pu_per_mile * line.length_mi},
                          {volt[topo.line_from(l)], -1.0},
                          {volt[topo.line_to(l)], 1.0}},
                         Sense::equal, 0.0);
      }
      for (std::size_t h = 0; h < storage.size(); ++h) {
        const auto& s = storage[h];
        const bool candidate = s.status == AssetStatus::candidate;
        const auto pin = m.add_variable(index_name("pin", {s.id, ts, dy}), VarKind::continuous, 0.0,
                                        candidate ? kInfinity : s.p_in_max_kw);
        const auto pout = m.add_variable(index_name("pout", {s.id, ts, dy}), VarKind::continuous, 0.0,
                                         candidate ? kInfinity : s.p_out_max_kw);
        inflow[topo.storage_node(h)].push_back({pin, -1.0});
        inflow[topo.storage_node(h)].push_back({pout, 1.0});
        if (candidate) {
          m.add_constraint(index_name("pin_cap", {s.id, ts, dy}), {{pin, 1.0}, {*out.plan.storage_size[h], -s.p_in_max_kw}},
                           Sense::less_equal, 0.0);
          m.add_constraint(index_name("pout_cap", {s.id, ts, dy}),
                           {{pout, 1.0}, {*out.plan.storage_size[h], -s.p_out_max_kw}}, Sense::less_equal, 0.0);
        }
        const auto soc = m.add_variable(index_name("soc", {s.id, ts, dy}), VarKind::continuous);
        m.add_constraint(index_name("profile", {s.id, ts, dy}), {{soc, 1.0}, {soc_ref[h], -in.profiles(h, t, d)}},
                         Sense::equal, 0.0);
        const auto prev = t == 0 ? m.add_variable(index_name("soc0", {s.id, dy}), VarKind::continuous)
                                 : *m.find_variable(index_name("soc", {s.id, per(t - 1), dy}));
        m.add_constraint(index_name("soc_dyn", {s.id, ts, dy}),
                         {{soc, 1.0}, {prev, -1.0}, {pin, -s.round_trip_eff * delta}, {pout, delta}}, Sense::equal,
                         0.0);
        if (t + 1 == T) {
          const auto first = *m.find_variable(index_name("soc0", {s.id, dy}));
          m.add_constraint(index_name("soc_per", {s.id, dy}), {{soc, 1.0}, {first, -1.0}}, Sense::equal, 0.0);
        }
      }
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        LinearExpr balance;
        for (const auto& term : inflow[n]) balance.add(term.var, term.coef);
        if (nodes[n].is_substation) {
          const auto g = m.add_variable(index_name("g", {nodes[n].id, ts, dy}), VarKind::continuous, 0.0,
                                        nodes[n].injection_limit_kw.value_or(kInfinity));
          balance.add(g, 1.0);
          m.add_constraint(index_name("bal", {nodes[n].id, ts, dy}), balance, Sense::equal, 0.0);
          continue;
        }
        const auto minus = m.add_variable(index_name("dminus", {nodes[n].id, ts, dy}), VarKind::continuous);
        const auto plus = m.add_variable(index_name("dplus", {nodes[n].id, ts, dy}), VarKind::continuous);
        m.add_objective(minus, weight);
        m.add_objective(plus, weight * econ.surplus_weight);
        out.base_imbalance.push_back({minus, weight});
        out.base_imbalance.push_back({plus, weight * econ.surplus_weight});
        balance.add(minus, 1.0).add(plus, -1.0);
        m.add_constraint(index_name("bal", {nodes[n].id, ts, dy}), balance, Sense::equal, demand(topo, n, t, d));
      }
    }
  }
  return out;
}

ModelSize scalable_model_size(const ScalableInstance& in) {
  const auto& topo = in.topology;
  const std::size_t T = topo.periods(), D = topo.days().size(), S = in.scenarios.size();
  const std::size_t TD = T * D;
  const std::size_t N = topo.nodes().size(), NS = topo.substations().size(), NL = N - NS;
  const std::size_t LE = topo.existing_lines().size(), LC = topo.candidate_lines().size();
  const std::size_t H = topo.storage().size(), HC = topo.candidate_storage().size();
  std::size_t rel = 0, islands = 0, members = 0;
  for (const auto& entry : in.catalog.states) {
    rel += entry.investments.size();
    for (const auto& inv : entry.investments) {
      islands += inv.islands.size();
      for (const auto& island : inv.islands) members += island.storage.size();
    }
  }
  ModelSize size;
  size.binaries = LC + HC + rel;
  size.variables = LC + 2 * HC + TD + 2 * TD * S + rel + islands + members + H +
                   TD * (2 * NL + LE + NS + N + 3 * H) + H * D;
  size.constraints = HC + TD * S + TD * (S - 1) + in.catalog.states.size() + 2 * rel + 4 * members + 2 * islands +
                     HC + TD * (N + LE + 2 * H + 2 * HC) + H * D;
  return size;
}

PlanEvaluation evaluate_plan(const ScalableInstance& in, const InvestmentPlan& plan) {
  return evaluate_plan(in.topology, plan, in.states, in.catalog, in.profiles, in.scenarios);
}

PlanDecision decode_scalable(const ScalableModel& model, const ScalableInstance& in, const SolveResult& result) {
  PlanDecision out;
  out.plan = decode_plan(model.plan, in.topology, result);
  out.status = result.status;
  out.raw_objective = result.objective;
  out.wall_time_s = result.wall_time_s;
  out.solver = result.solver;
  out.instance_hash = result.instance_hash;
  const auto eval = evaluate_plan(in, out.plan);
  auto& c = out.costs;
  c.lambda = in.topology.economics().lambda_risk;
  c.line_investment_usd = line_investment_usd(in.topology, out.plan);
  c.storage_investment_usd = storage_investment_usd(in.topology, out.plan);
  for (const auto& term : model.base_imbalance) c.base_imbalance_usd += term.coef * result.value(term.var);
  c.expected_loss_usd = eval.expected_usd;
  c.cvar_loss_usd = eval.cvar_usd;
  return out;
}

}  // namespace gridplan
