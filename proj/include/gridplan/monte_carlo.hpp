#pragma once

// Out-of-sample simulation of a fixed plan over hourly line failures.

#include "gridplan/plan.hpp"
#include "gridplan/scenario_model.hpp"
#include "gridplan/soc_profiles.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace gridplan {

enum class RepairModel {
  hourly,  // each hour is an independent Bernoulli trial per line
  mttr,    // extension: a failure keeps the line out for its mean time to repair
};

struct MonteCarloOptions {
  std::size_t years = 1000;
  std::uint64_t seed = 1;
  RepairModel repair = RepairModel::hourly;
  std::size_t threads = 1;
  std::size_t histogram_bins = 20;
  double ens_alpha = 0.99;      // CVaR level of annual and hourly ENS
  double index_alpha = 0.95;    // CVaR level of SAIFI and SAIDI

  void validate() const;
};

// Hour-by-hour record of one simulated year. Hours without a failed line are
// implicit: no islands, no shed.
struct AnnualTrace {
  std::size_t hours = 0;
  std::vector<std::size_t> event_hours;      // ascending
  std::vector<std::vector<std::size_t>> failed_lines;  // per event hour
  std::vector<double> islanded_demand_kwh;   // per event hour
  std::vector<double> shed_kwh;              // per event hour
  std::vector<long> customers_interrupted;   // per event hour

  double ens_kwh = 0.0;
  double saifi = 0.0;
  double saidi = 0.0;
  std::size_t islanded_hours = 0;  // hours with at least one island
};

struct MetricSummary {
  double mean = 0.0;
  double cvar = 0.0;
  double worst = 0.0;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
};

struct MetricReport {
  std::size_t years = 0;
  std::uint64_t seed = 0;
  MetricSummary ens_kwh;
  MetricSummary saifi;
  MetricSummary saidi;
  double mean_islanded_hours = 0.0;
  double hourly_ens_cvar_kwh = 0.0;
  Histogram hourly_ens;
  std::vector<double> annual_ens_kwh;
  std::vector<double> annual_saifi;
  std::vector<double> annual_saidi;
  std::vector<std::size_t> annual_islanded_hours;
};

// Hourly failure probability of a line: rate / (24 * days_per_year).
double hourly_probability(double rate_per_year, double days_per_year);

// Typical day of each calendar day, by cumulative weight.
std::vector<std::size_t> calendar_days(const NetworkTopology& topology);

class MonteCarlo {
public:
  // Throws ValidationError for unknown or non-existing lines in `rates`.
  MonteCarlo(const NetworkTopology& topology, const InvestmentPlan& plan, std::vector<LineOutageRate> rates,
             const SocProfile& profiles, const MonteCarloOptions& options = {});

  AnnualTrace simulate_year(std::size_t year) const;
  MetricReport run() const;

private:
  const NetworkTopology& topology_;
  InvestmentPlan plan_;
  SocProfile profiles_;
  MonteCarloOptions options_;
  std::vector<std::size_t> built_;
  Eigen::VectorXd capacity_;
  std::vector<double> probability_;  // per line
  std::vector<std::size_t> repair_hours_;  // per line
  std::vector<std::size_t> calendar_;
};

MetricReport run_monte_carlo(const NetworkTopology& topology, const InvestmentPlan& plan,
                             std::vector<LineOutageRate> rates, const SocProfile& profiles,
                             const MonteCarloOptions& options = {});

nlohmann::json report_to_json(const MetricReport& report);

}  // namespace gridplan
