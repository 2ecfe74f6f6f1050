#include "gridplan/error.hpp"
#include "gridplan/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit { ok = 0, internal = 1, validation = 2, solver = 3, io = 4 };

struct Overrides {
  std::string config;
  std::string network;
  std::string formulation;
  std::vector<double> lambdas;
  std::vector<double> volls;
  std::optional<double> alpha;
  std::string solver;
  std::string output;
  std::optional<std::size_t> years;
  std::optional<std::uint64_t> seed;
  bool dump_islands = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Run configuration (JSON)");
  cmd->add_option("-n,--network", o.network, "Network directory (or JSON file with --config)");
  cmd->add_option("-o,--output", o.output, "Output directory");
  cmd->add_option("--solver", o.solver, "MILP solver: highs or cbc");
}

gridplan::RunConfig make_config(const Overrides& o) {
  gridplan::RunConfig c;
  if (!o.config.empty()) {
    c = gridplan::load_run_config(o.config);
  } else if (o.network.empty()) {
    throw gridplan::ValidationError("either --config or --network is required");
  }
  if (!o.network.empty()) {
    c.network = o.network;
    c.network_format = std::filesystem::is_directory(o.network) ? gridplan::NetworkFormat::csv_dir
                                                                : gridplan::NetworkFormat::json;
  }
  if (!o.formulation.empty()) c.formulation = gridplan::parse_formulation(o.formulation);
  if (!o.lambdas.empty()) c.lambdas = o.lambdas;
  if (!o.volls.empty()) c.volls = o.volls;
  if (o.alpha) c.cvar_alpha = o.alpha;
  if (!o.solver.empty()) c.solver.solver = o.solver;
  if (!o.output.empty()) c.output_dir = o.output;
  if (o.years) c.simulation.years = *o.years;
  if (o.seed) c.simulation.seed = *o.seed;
  if (o.dump_islands) c.dump_islands = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-averse distribution expansion planning"};
  app.require_subcommand(1);
  Overrides o;

  auto* plan = app.add_subcommand("plan", "Solve the planning model over the VoLL x lambda sweep");
  add_common(plan, o);
  plan->add_option("-f,--formulation", o.formulation, "scalable or full");
  plan->add_option("--lambda", o.lambdas, "Risk-aversion weights in [0,1]");
  plan->add_option("--voll", o.volls, "Values of lost load (US$/kWh)");
  plan->add_option("--alpha", o.alpha, "CVaR level in [0,1)");
  plan->add_flag("--dump-islands", o.dump_islands, "Write the island catalog to islands.json");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation of the planned investments");
  add_common(simulate, o);
  simulate->add_option("--years", o.years, "Simulated years");
  simulate->add_option("--seed", o.seed, "Random seed");

  auto* replay = app.add_subcommand("replay", "Replay the configured extreme event for each plan");
  add_common(replay, o);

  auto* report = app.add_subcommand("report", "Render charts and a summary from existing outputs");
  add_common(report, o);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = make_config(o);
    if (plan->parsed()) {
      const auto rows = gridplan::cmd_plan(config);
      std::cout << "wrote " << rows.size() << " plans to " << config.output_dir.string() << "\n";
    } else if (simulate->parsed()) {
      const auto reports = gridplan::cmd_simulate(config);
      std::cout << "simulated " << reports.size() << " plans into " << config.output_dir.string() << "\n";
    } else if (replay->parsed()) {
      const auto replays = gridplan::cmd_replay(config);
      std::cout << "replayed " << replays.size() << " plans into " << config.output_dir.string() << "\n";
    } else {
      gridplan::cmd_report(config);
      std::cout << "wrote " << (config.output_dir / "summary.md").string() << "\n";
    }
    return ok;
  } catch (const gridplan::ValidationError& e) {
    std::cerr << "validation error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return validation;
  } catch (const gridplan::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return validation;
  } catch (const gridplan::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    if (!e.raw_output().empty()) std::cerr << e.raw_output() << "\n";
    return solver;
  } catch (const gridplan::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return io;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return internal;
  }
}
