#include "gridplan/pipeline.hpp"

#include "csv.hpp"
#include "gridplan/error.hpp"
#include "gridplan/full_formulation.hpp"
#include "gridplan/scalable_formulation.hpp"

#include <set>

namespace gridplan {

namespace fs = std::filesystem;

std::string_view to_string(Formulation f) { return f == Formulation::scalable ? "scalable" : "full"; }

Formulation parse_formulation(std::string_view text) {
  if (text == "scalable") return Formulation::scalable;
  if (text == "full") return Formulation::full;
  throw SchemaError("unknown formulation '" + std::string(text) + "' (expected scalable or full)");
}

void RunConfig::validate() const {
  std::vector<std::string> errors;
  for (const double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) errors.push_back("lambda " + detail::format_double(l) + " outside [0,1]");
  }
  for (const double v : volls) {
    if (!(v > 0.0)) errors.push_back("VoLL " + detail::format_double(v) + " must be > 0");
  }
  if (lambdas.empty()) errors.push_back("at least one lambda is required");
  if (cvar_alpha && !(*cvar_alpha >= 0.0 && *cvar_alpha < 1.0)) errors.push_back("cvar_alpha must lie in [0,1)");
  if (!errors.empty()) throw ValidationError(std::move(errors));
  solver.validate();
  simulation.validate();
}

namespace {

const std::set<std::string> kKeys = {"network",        "network_format", "outage_rates",   "extreme_events",
                                     "profiles",       "formulation",    "lambda",         "voll",
                                     "cvar_alpha",     "surplus_weight", "solver",         "max_relevant_candidates",
                                     "max_scenario_slots", "simulation", "plans",          "replay",
                                     "dump_islands",   "output_dir"};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<double> number_list(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    std::vector<std::string> v;
    for (const auto& m : e.violations()) v.push_back(stage + ": " + m);
    throw ValidationError(std::move(v));
  } catch (const SchemaError& e) {
    throw SchemaError(stage + ": " + e.what());
  } catch (const SolverError& e) {
    throw SolverError(stage + ": " + e.what(), e.raw_output());
  } catch (const IoError& e) {
    throw IoError(stage + ": " + e.what());
  }
}

struct Inputs {
  NetworkTopology topology;
  ScenarioSet scenarios;
  std::vector<LineOutageRate> rates;
  std::vector<ExtremeEvent> events;
  SocProfile profiles;
  std::vector<ManifestInput> files;
};

NetworkTopology load_topology(const RunConfig& c) {
  auto topo = load_network(c.network, c.network_format);
  auto econ = topo.economics();
  if (c.cvar_alpha) econ.cvar_alpha = *c.cvar_alpha;
  if (c.surplus_weight) econ.surplus_weight = *c.surplus_weight;
  return topo.with_economics(econ);
}

Inputs load_inputs(const RunConfig& c, bool reuse_profiles) {
  Inputs in;
  in.topology = staged("network", [&] { return load_topology(c); });
  in.files.push_back({"network", c.network});
  staged("scenarios", [&] {
    if (c.outage_rates) {
      in.rates = load_outage_rates(*c.outage_rates);
      in.files.push_back({"outage_rates", *c.outage_rates});
    }
    if (c.extreme_events) {
      in.events = load_extreme_events(*c.extreme_events, in.topology);
      in.files.push_back({"extreme_events", *c.extreme_events});
    }
    in.scenarios = build_from_rates(in.topology, in.rates, in.events);
    return 0;
  });
  const auto cached = c.output_dir / "profiles.csv";
  in.profiles = staged("profiles", [&] {
    if (c.profiles) {
      in.files.push_back({"profiles", *c.profiles});
      return load_profiles(*c.profiles, in.topology);
    }
    if (reuse_profiles && fs::exists(cached)) return load_profiles(cached, in.topology);
    return compute_profiles(in.topology, c.solver);
  });
  return in;
}

std::string solver_version(const SolveConfig& s) {
  try {
    return make_adapter(s.solver)->version();
  } catch (const Error&) {
    return "unavailable";
  }
}

void write(const fs::path& path, const std::string& text, std::vector<fs::path>& outputs) {
  detail::write_text(path, text);
  outputs.push_back(path);
}

void write_manifest(const RunConfig& c, const std::string& command, const std::vector<ManifestInput>& inputs,
                    const std::vector<fs::path>& outputs) {
  const auto j = make_manifest(command, run_config_to_json(c), inputs, outputs, solver_version(c.solver), c.output_dir);
  detail::write_text(c.output_dir / ("manifest_" + command + ".json"), j.dump(2) + "\n");
}

std::vector<std::pair<std::string, InvestmentPlan>> plans_for(const RunConfig& c, const NetworkTopology& topology) {
  std::vector<std::pair<std::string, InvestmentPlan>> out{{kBaselineName, InvestmentPlan{}}};
  if (!c.plans.empty()) {
    for (const auto& [name, path] : c.plans) out.emplace_back(name, load_plan(path));
  } else {
    const auto table = c.output_dir / "table1.csv";
    if (!fs::exists(table)) throw IoError("no plans configured and " + table.string() + " does not exist");
    for (const auto& row : read_planning_table(table)) {
      out.emplace_back(plan_name(row.voll_usd_per_kwh, row.lambda), row.decision.plan);
    }
  }
  for (const auto& [name, plan] : out) validate_plan(topology, plan);
  return out;
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw SchemaError("run config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw SchemaError("run config: unknown key '" + key + "'");
  }
  RunConfig c;
  try {
    c.network = resolve(base_dir, j.at("network").get<std::string>());
    if (j.contains("network_format")) {
      const auto f = j.at("network_format").get<std::string>();
      if (f == "csv_dir") {
        c.network_format = NetworkFormat::csv_dir;
      } else if (f == "json") {
        c.network_format = NetworkFormat::json;
      } else {
        throw SchemaError("run config: network_format must be csv_dir or json");
      }
    }
    if (j.contains("outage_rates")) c.outage_rates = resolve(base_dir, j.at("outage_rates").get<std::string>());
    if (j.contains("extreme_events")) c.extreme_events = resolve(base_dir, j.at("extreme_events").get<std::string>());
    if (j.contains("profiles")) c.profiles = resolve(base_dir, j.at("profiles").get<std::string>());
    if (j.contains("formulation")) c.formulation = parse_formulation(j.at("formulation").get<std::string>());
    if (j.contains("lambda")) c.lambdas = number_list(j.at("lambda"));
    if (j.contains("voll")) c.volls = number_list(j.at("voll"));
    if (j.contains("cvar_alpha")) c.cvar_alpha = j.at("cvar_alpha").get<double>();
    if (j.contains("surplus_weight")) c.surplus_weight = j.at("surplus_weight").get<double>();
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      c.solver.solver = s.value("name", c.solver.solver);
      c.solver.relative_gap = s.value("relative_gap", c.solver.relative_gap);
      c.solver.time_limit_s = s.value("time_limit_s", c.solver.time_limit_s);
      c.solver.threads = s.value("threads", c.solver.threads);
      c.solver.seed = s.value("seed", c.solver.seed);
      const auto format = s.value("format", std::string("free"));
      if (format != "free" && format != "fixed") throw SchemaError("run config: solver.format must be free or fixed");
      c.solver.format = format == "free" ? MpsFormat::free : MpsFormat::fixed;
      if (s.contains("work_dir")) c.solver.work_dir = resolve(base_dir, s.at("work_dir").get<std::string>());
      c.solver.keep_files = s.value("keep_files", false);
    }
    c.max_relevant_candidates = j.value("max_relevant_candidates", c.max_relevant_candidates);
    c.max_scenario_slots = j.value("max_scenario_slots", c.max_scenario_slots);
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      auto& m = c.simulation;
      m.years = s.value("years", m.years);
      m.seed = s.value("seed", m.seed);
      m.threads = s.value("threads", m.threads);
      m.histogram_bins = s.value("histogram_bins", m.histogram_bins);
      m.ens_alpha = s.value("ens_alpha", m.ens_alpha);
      m.index_alpha = s.value("index_alpha", m.index_alpha);
      const auto repair = s.value("repair", std::string("hourly"));
      if (repair != "hourly" && repair != "mttr") throw SchemaError("run config: simulation.repair must be hourly or mttr");
      m.repair = repair == "hourly" ? RepairModel::hourly : RepairModel::mttr;
    }
    if (j.contains("plans")) {
      for (const auto& [name, path] : j.at("plans").items()) c.plans[name] = resolve(base_dir, path.get<std::string>());
    }
    if (j.contains("replay")) {
      const auto& r = j.at("replay");
      c.replay = ReplaySpec{r.at("event").get<std::string>(), r.at("day").get<std::string>(),
                            r.value("start_period", std::size_t{1})};
    }
    c.dump_islands = j.value("dump_islands", false);
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j{{"network", c.network.string()},
                   {"network_format", c.network_format == NetworkFormat::csv_dir ? "csv_dir" : "json"},
                   {"formulation", std::string(to_string(c.formulation))},
                   {"lambda", c.lambdas},
                   {"voll", c.volls},
                   {"solver",
                    {{"name", c.solver.solver},
                     {"relative_gap", c.solver.relative_gap},
                     {"time_limit_s", c.solver.time_limit_s},
                     {"threads", c.solver.threads},
                     {"seed", c.solver.seed},
                     {"format", c.solver.format == MpsFormat::free ? "free" : "fixed"}}},
                   {"max_relevant_candidates", c.max_relevant_candidates},
                   {"max_scenario_slots", c.max_scenario_slots},
                   {"simulation",
                    {{"years", c.simulation.years},
                     {"seed", c.simulation.seed},
                     {"threads", c.simulation.threads},
                     {"histogram_bins", c.simulation.histogram_bins},
                     {"ens_alpha", c.simulation.ens_alpha},
                     {"index_alpha", c.simulation.index_alpha},
                     {"repair", c.simulation.repair == RepairModel::hourly ? "hourly" : "mttr"}}},
                   {"dump_islands", c.dump_islands},
                   {"output_dir", c.output_dir.string()}};
  if (c.outage_rates) j["outage_rates"] = c.outage_rates->string();
  if (c.extreme_events) j["extreme_events"] = c.extreme_events->string();
  if (c.profiles) j["profiles"] = c.profiles->string();
  if (c.cvar_alpha) j["cvar_alpha"] = *c.cvar_alpha;
  if (c.surplus_weight) j["surplus_weight"] = *c.surplus_weight;
  if (!c.plans.empty()) {
    nlohmann::json plans = nlohmann::json::object();
    for (const auto& [name, path] : c.plans) plans[name] = path.string();
    j["plans"] = plans;
  }
  if (c.replay) {
    j["replay"] = {{"event", c.replay->event}, {"day", c.replay->day}, {"start_period", c.replay->start_period}};
  }
  return j;
}

std::string plan_name(double voll, double lambda) {
  return "voll" + detail::format_double(voll) + "_lambda" + detail::format_double(lambda);
}

std::vector<PlanningRow> cmd_plan(const RunConfig& c) {
  c.validate();
  fs::create_directories(c.output_dir / "plans");
  auto in = load_inputs(c, false);
  std::vector<fs::path> outputs;
  save_profiles(in.profiles, c.output_dir / "profiles.csv");
  outputs.push_back(c.output_dir / "profiles.csv");

  const auto volls = c.volls.empty() ? std::vector<double>{in.topology.economics().voll_usd_per_kwh} : c.volls;
  struct Cell {
    double voll, lambda;
    NetworkTopology topology;
  };
  std::vector<Cell> cells;
  for (const double v : volls) {
    for (const double l : c.lambdas) {
      auto econ = in.topology.economics();
      econ.voll_usd_per_kwh = v;
      econ.lambda_risk = l;
      cells.push_back({v, l, in.topology.with_economics(econ)});
    }
  }

  std::vector<PlanningRow> rows;
  if (c.formulation == Formulation::scalable) {
    auto base = staged("islanding", [&] {
      return make_scalable_instance(in.topology, in.scenarios, in.profiles, {c.max_relevant_candidates});
    });
    if (c.dump_islands) {
      write(c.output_dir / "islands.json", catalog_to_json(base.topology, base.states, base.catalog).dump(2) + "\n",
            outputs);
    }
    std::vector<ScalableInstance> instances;
    std::vector<ScalableModel> models;
    for (const auto& cell : cells) {
      auto inst = base;
      inst.topology = cell.topology;
      models.push_back(staged("formulation", [&] { return build_scalable_model(inst); }));
      instances.push_back(std::move(inst));
    }
    std::vector<const Model*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m.model);
    const auto results = staged("solve", [&] { return solve_batch(ptrs, c.solver); });
    for (std::size_t k = 0; k < cells.size(); ++k) {
      rows.push_back({cells[k].voll, cells[k].lambda,
                      staged("decode", [&] { return decode_scalable(models[k], instances[k], results[k]); })});
    }
  } else {
    const auto slots = staged("formulation", [&] { return expand_start_slots(in.scenarios, in.topology.periods()); });
    for (const auto& cell : cells) {
      const auto inst = staged("formulation", [&] {
        return make_full_instance(cell.topology, slots, FullOptions{c.max_scenario_slots});
      });
      const auto model = staged("formulation", [&] { return build_full_model(inst); });
      const auto result = staged("solve", [&] { return solve(model.model, c.solver); });
      rows.push_back({cell.voll, cell.lambda, staged("decode", [&] { return decode_full(model, inst, result, c.solver); })});
    }
  }

  for (const auto& row : rows) {
    auto j = decision_to_json(row.decision);
    j["voll_usd_per_kwh"] = row.voll_usd_per_kwh;
    j["lambda"] = row.lambda;
    j["formulation"] = std::string(to_string(c.formulation));
    write(c.output_dir / "plans" / (plan_name(row.voll_usd_per_kwh, row.lambda) + ".json"), j.dump(2) + "\n", outputs);
  }
  write(c.output_dir / "table1.csv", planning_table_csv(rows), outputs);
  write(c.output_dir / "frontier.svg", frontier_svg(rows), outputs);
  write_manifest(c, "plan", in.files, outputs);
  return rows;
}

std::vector<NamedReport> cmd_simulate(const RunConfig& c) {
  c.validate();
  fs::create_directories(c.output_dir / "reports");
  auto in = load_inputs(c, true);
  const auto plans = staged("plans", [&] { return plans_for(c, in.topology); });
  std::vector<NamedReport> reports;
  std::vector<fs::path> outputs;
  for (const auto& [name, plan] : plans) {
    reports.emplace_back(name, staged("simulation", [&] {
                           return run_monte_carlo(in.topology, plan, in.rates, in.profiles, c.simulation);
                         }));
    auto j = report_to_json(reports.back().second);
    j["plan"] = name;
    std::string file = name == kBaselineName ? "no_investment" : name;
    write(c.output_dir / "reports" / (file + ".json"), j.dump(2) + "\n", outputs);
  }
  write(c.output_dir / "table2.csv", ens_table_csv(reports), outputs);
  write(c.output_dir / "table3.csv", reliability_table_csv(reports), outputs);
  write(c.output_dir / "histogram.csv", histogram_csv(reports), outputs);
  write(c.output_dir / "histogram.svg", histogram_svg(reports), outputs);
  write_manifest(c, "simulate", in.files, outputs);
  return reports;
}

std::vector<std::pair<std::string, ReplayResult>> cmd_replay(const RunConfig& c) {
  c.validate();
  if (!c.replay) throw ValidationError("replay: the run config has no 'replay' section");
  fs::create_directories(c.output_dir);
  auto in = load_inputs(c, true);
  const auto plans = staged("plans", [&] { return plans_for(c, in.topology); });
  const auto event = staged("replay", [&] {
    for (const auto& e : in.events) {
      if (e.id == c.replay->event) {
        if (c.replay->start_period < 1) throw ValidationError("start_period is 1-based");
        return replay_event(in.topology, e, c.replay->start_period - 1);
      }
    }
    throw ValidationError("unknown extreme event '" + c.replay->event + "'");
  });
  const auto day = staged("replay", [&] { return in.topology.day_index(c.replay->day); });
  std::vector<std::pair<std::string, ReplayResult>> out;
  for (const auto& [name, plan] : plans) {
    out.emplace_back(name, staged("replay", [&] { return extreme_event_replay(in.topology, plan, event, day); }));
  }
  std::vector<fs::path> outputs;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [name, r] : out) {
    auto item = replay_to_json(r);
    item["plan"] = name;
    j.push_back(item);
  }
  write(c.output_dir / "replay.json", j.dump(2) + "\n", outputs);
  write(c.output_dir / "replay.csv", replay_csv(out), outputs);
  write(c.output_dir / "replay.svg", replay_svg(out), outputs);
  write_manifest(c, "replay", in.files, outputs);
  return out;
}

void cmd_report(const RunConfig& c) {
  std::vector<fs::path> outputs;
  std::string summary = "# Run summary\n\n";
  const auto table1 = c.output_dir / "table1.csv";
  if (fs::exists(table1)) {
    const auto rows = staged("report", [&] { return read_planning_table(table1); });
    write(c.output_dir / "frontier.svg", frontier_svg(rows), outputs);
    summary += "## Planning\n\n| VoLL | lambda | expected US$ | CVaR US$ | lines US$ | storage US$ | lines | storage |\n";
    summary += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
      const auto& k = r.decision.costs;
      std::string lines, storage;
      for (const auto& l : r.decision.plan.lines) lines += (lines.empty() ? "" : " ") + l;
      for (const auto& [id, kwh] : r.decision.plan.storage_kwh) {
        storage += (storage.empty() ? "" : " ") + id + "=" + detail::format_general(kwh, 6) + " kWh";
      }
      summary += "| " + detail::format_general(r.voll_usd_per_kwh, 6) + " | " + detail::format_general(r.lambda, 6) +
                 " | " + detail::format_general(k.expected_loss_usd, 8) + " | " +
                 detail::format_general(k.cvar_loss_usd, 8) + " | " + detail::format_general(k.line_investment_usd, 8) +
                 " | " + detail::format_general(k.storage_investment_usd, 8) + " | " + lines + " | " + storage + " |\n";
    }
    summary += "\n";
  }
  for (const auto& [file, title] : std::vector<std::pair<std::string, std::string>>{
           {"table2.csv", "Annual energy not served"}, {"table3.csv", "SAIFI and SAIDI"}, {"replay.csv", "Extreme event replay"}}) {
    const auto path = c.output_dir / file;
    if (!fs::exists(path)) continue;
    summary += "## " + title + "\n\n```\n" + detail::read_text(path) + "```\n\n";
  }
  if (outputs.empty() && summary == "# Run summary\n\n") {
    throw IoError("report: no outputs found in " + c.output_dir.string());
  }
  write(c.output_dir / "summary.md", summary, outputs);
}

}  // namespace gridplan
