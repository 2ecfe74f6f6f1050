#pragma once

// Reference implementations written independently of the library code they check.

#include "gridplan/grid_model.hpp"
#include "gridplan/plan.hpp"
#include "gridplan/scenario_model.hpp"
#include "gridplan/soc_profiles.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Islands as sorted bus sets, via breadth-first search from every substation.
std::set<std::vector<std::size_t>> islands_bfs(const gridplan::NetworkTopology& topology,
                                               const std::vector<std::size_t>& failed,
                                               const std::vector<std::size_t>& built);

// CVaR as min over zeta of zeta + E[(X - zeta)^+] / (1 - alpha), scanning the
// sample values and a uniform grid between them.
double cvar_grid(const std::vector<double>& values, const std::vector<double>& probabilities, double alpha,
                 std::size_t grid_points = 64);

// Largest arbitrage profit of a unit-capacity device with SOC restricted to a
// uniform grid of `points` levels, with periodic SOC.
double arbitrage_dp(const gridplan::StorageDevice& device, const std::vector<double>& prices, double hours_per_period,
                    std::size_t points = 101);

struct MpsData {
  std::string objective_row;
  std::map<std::string, char> row_type;  // N, L, G, E
  std::vector<std::string> row_order;
  std::vector<std::string> column_order;
  std::map<std::pair<std::string, std::string>, double> coefficients;  // (row, column)
  std::map<std::string, double> rhs;
  std::map<std::string, double> lower, upper;
  std::set<std::string> integers;
};

// Reads fixed or free MPS by whitespace tokenisation.
MpsData parse_mps(const std::string& text);

// Per-slot loss of one failure scenario under a plan: islanded load energy over
// the outage window minus the storage credit, clamped at zero.
double slot_loss(const gridplan::NetworkTopology& topology, const gridplan::OutageScenario& scenario,
                 const std::vector<std::size_t>& built, const std::vector<double>& capacity_kwh,
                 const gridplan::SocProfile& profiles, std::size_t t, std::size_t d);

struct Enumeration {
  double objective = 0.0;
  gridplan::InvestmentPlan plan;
  std::size_t evaluated = 0;
};

// Minimum of investment + (1 - lambda) E + lambda CVaR of loss-of-load cost over
// every line plan, storage build subset and storage size. Assumes a base case
// without imbalance. For fixed builds the cost is convex piecewise linear in
// the sizes, so its minimum sits on a vertex of the arrangement of kink lines
// and box faces; every vertex is evaluated (at most two candidate devices).
Enumeration enumerate_scalable(const gridplan::NetworkTopology& topology, const gridplan::ScenarioSet& scenarios,
                               const gridplan::SocProfile& profiles);

// Same cost for one fully specified plan.
double plan_cost(const gridplan::NetworkTopology& topology, const gridplan::ScenarioSet& scenarios,
                 const gridplan::SocProfile& profiles, const gridplan::InvestmentPlan& plan);

}  // namespace oracle
