#include "gridplan/monte_carlo.hpp"

#include "gridplan/error.hpp"
#include "gridplan/islanding.hpp"
#include "gridplan/risk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

namespace gridplan {

void MonteCarloOptions::validate() const {
  std::vector<std::string> errors;
  if (years < 1) errors.push_back("years must be >= 1");
  if (threads < 1) errors.push_back("threads must be >= 1");
  if (histogram_bins < 1) errors.push_back("histogram_bins must be >= 1");
  if (!(ens_alpha >= 0.0 && ens_alpha < 1.0)) errors.push_back("ens_alpha must lie in [0,1)");
  if (!(index_alpha >= 0.0 && index_alpha < 1.0)) errors.push_back("index_alpha must lie in [0,1)");
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

std::uint64_t Histogram::total() const {
  std::uint64_t n = 0;
  for (const auto c : counts) n += c;
  return n;
}

double hourly_probability(double rate_per_year, double days_per_year) {
  return rate_per_year / (24.0 * days_per_year);
}

std::vector<std::size_t> calendar_days(const NetworkTopology& topology) {
  const auto& days = topology.days();
  const auto count = static_cast<std::size_t>(topology.economics().days_per_year);
  std::vector<std::size_t> out(count);
  std::size_t d = 0;
  double edge = days.empty() ? 0.0 : days[0].weight_days;
  for (std::size_t k = 0; k < count; ++k) {
    const double mid = static_cast<double>(k) + 0.5;
    while (mid > edge && d + 1 < days.size()) edge += days[++d].weight_days;
    out[k] = d;
  }
  return out;
}

MonteCarlo::MonteCarlo(const NetworkTopology& topology, const InvestmentPlan& plan, std::vector<LineOutageRate> rates,
                       const SocProfile& profiles, const MonteCarloOptions& options)
    : topology_(topology), plan_(plan), profiles_(profiles), options_(options) {
  options_.validate();
  validate_plan(topology, plan);
  profiles.check_covers(topology);
  built_ = built_line_indices(topology, plan);
  capacity_ = storage_capacity_kwh(topology, plan);
  probability_.assign(topology.lines().size(), 0.0);
  repair_hours_.assign(topology.lines().size(), 1);
  std::vector<std::string> errors;
  for (const auto& r : rates) {
    std::size_t l = 0;
    try {
      l = topology.line_index(r.line_id);
    } catch (const ValidationError&) {
      errors.push_back("outage rate for unknown line '" + r.line_id + "'");
      continue;
    }
    if (topology.lines()[l].status != AssetStatus::existing) {
      errors.push_back("outage rate for candidate line '" + r.line_id + "'");
    }
    if (!(r.rate_per_year >= 0.0)) errors.push_back("line '" + r.line_id + "': negative outage rate");
    if (!(r.mttr_hours > 0.0)) errors.push_back("line '" + r.line_id + "': mttr_hours must be > 0");
    probability_[l] = std::min(1.0, hourly_probability(r.rate_per_year, topology.economics().days_per_year));
    repair_hours_[l] = static_cast<std::size_t>(std::max(1.0, std::ceil(r.mttr_hours)));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  calendar_ = calendar_days(topology);
}

AnnualTrace MonteCarlo::simulate_year(std::size_t year) const {
  const auto& topo = topology_;
  const std::size_t hours = calendar_.size() * 24;
  std::seed_seq seq{static_cast<std::uint32_t>(options_.seed), static_cast<std::uint32_t>(options_.seed >> 32),
                    static_cast<std::uint32_t>(year), static_cast<std::uint32_t>(year >> 32)};
  std::mt19937_64 rng(seq);

  std::vector<std::pair<std::size_t, std::size_t>> failures;  // (hour, line)
  for (std::size_t l = 0; l < probability_.size(); ++l) {
    const double p = probability_[l];
    if (p <= 0.0) continue;
    const std::size_t down = options_.repair == RepairModel::mttr ? repair_hours_[l] : 1;
    if (p >= 1.0) {
      for (std::size_t h = 0; h < hours; ++h) failures.emplace_back(h, l);
      continue;
    }
    std::geometric_distribution<long long> gap(p);
    std::size_t h = static_cast<std::size_t>(gap(rng));
    while (h < hours) {
      for (std::size_t k = 0; k < down && h + k < hours; ++k) failures.emplace_back(h + k, l);
      h += down + static_cast<std::size_t>(gap(rng));
    }
  }
  std::sort(failures.begin(), failures.end());

  AnnualTrace trace;
  trace.hours = hours;
  const std::size_t T = topo.periods();
  const double delta = topo.hours_per_period();
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> storage_seen(topo.storage().size(), none), node_seen(topo.nodes().size(), none);
  std::vector<double> remaining(topo.storage().size(), 0.0);
  std::map<std::vector<std::size_t>, Partition> partitions;
  double interruptions = 0.0, customer_hours = 0.0;

  for (std::size_t i = 0; i < failures.size();) {
    const std::size_t hour = failures[i].first;
    std::vector<std::size_t> failed;
    for (; i < failures.size() && failures[i].first == hour; ++i) failed.push_back(failures[i].second);
    auto it = partitions.find(failed);
    if (it == partitions.end()) it = partitions.emplace(failed, energized_components(topo, failed, built_)).first;
    const auto& partition = it->second;

    const std::size_t d = calendar_[hour / 24];
    const std::size_t t = std::min(T - 1, static_cast<std::size_t>(static_cast<double>(hour % 24) / delta));
    const double factor = topo.days()[d].load_factor[static_cast<Eigen::Index>(t)];
    double demand = 0.0, shed = 0.0;
    long customers = 0;
    for (const auto& island : partition.islands) {
      const double need = island.peak_load_kw * factor;
      double avail = 0.0;
      for (const auto h : island.storage) {
        if (hour == 0 || storage_seen[h] != hour - 1) {
          remaining[h] = capacity_[static_cast<Eigen::Index>(h)] * profiles_(h, t, d);
        }
        storage_seen[h] = hour;
        avail += remaining[h];
      }
      const double used = std::min(avail, need);
      if (avail > 0.0) {
        for (const auto h : island.storage) remaining[h] -= used * remaining[h] / avail;
      }
      demand += need;
      shed += need - used;
      for (const auto n : island.buses) {
        const long c = topo.nodes()[n].customers;
        customers += c;
        if (hour == 0 || node_seen[n] != hour - 1) interruptions += static_cast<double>(c);
        node_seen[n] = hour;
      }
    }
    customer_hours += static_cast<double>(customers);
    if (!partition.islands.empty()) ++trace.islanded_hours;
    trace.event_hours.push_back(hour);
    trace.failed_lines.push_back(std::move(failed));
    trace.islanded_demand_kwh.push_back(demand);
    trace.shed_kwh.push_back(shed);
    trace.customers_interrupted.push_back(customers);
    trace.ens_kwh += shed;
  }
  const double total = static_cast<double>(topo.total_customers());
  if (total > 0.0) {
    trace.saifi = interruptions / total;
    trace.saidi = customer_hours / total;
  }
  return trace;
}

namespace {

MetricSummary summarize(const std::vector<double>& values, double alpha) {
  const auto n = static_cast<Eigen::Index>(values.size());
  const Eigen::Map<const Eigen::VectorXd> v(values.data(), n);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return {expectation(v, p), cvar(v, p, alpha), v.maxCoeff()};
}

// CVaR of equiprobable samples where only the non-zero ones are listed and
// the remaining `count - values.size()` samples are zero.
double sparse_cvar(std::vector<double> values, std::size_t count, double alpha) {
  std::sort(values.begin(), values.end(), std::greater<>());
  const double tail = (1.0 - alpha) * static_cast<double>(count);
  double taken = 0.0, total = 0.0;
  for (const double v : values) {
    if (taken >= tail) break;
    const double w = std::min(1.0, tail - taken);
    total += w * v;
    taken += w;
  }
  return total / tail;
}

}  // namespace

MetricReport MonteCarlo::run() const {
  std::vector<AnnualTrace> traces(options_.years);
  const std::size_t workers = std::min(options_.threads, options_.years);
  if (workers <= 1) {
    for (std::size_t y = 0; y < options_.years; ++y) traces[y] = simulate_year(y);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t y = w; y < options_.years; y += workers) traces[y] = simulate_year(y);
      });
    }
    for (auto& th : pool) th.join();
  }

  MetricReport r;
  r.years = options_.years;
  r.seed = options_.seed;
  std::vector<double> hourly;
  std::size_t hours = 0;
  double islanded = 0.0;
  for (const auto& tr : traces) {
    r.annual_ens_kwh.push_back(tr.ens_kwh);
    r.annual_saifi.push_back(tr.saifi);
    r.annual_saidi.push_back(tr.saidi);
    r.annual_islanded_hours.push_back(tr.islanded_hours);
    islanded += static_cast<double>(tr.islanded_hours);
    hours += tr.hours;
    for (const double s : tr.shed_kwh) {
      if (s > 0.0) hourly.push_back(s);
    }
  }
  r.ens_kwh = summarize(r.annual_ens_kwh, options_.ens_alpha);
  r.saifi = summarize(r.annual_saifi, options_.index_alpha);
  r.saidi = summarize(r.annual_saidi, options_.index_alpha);
  r.mean_islanded_hours = islanded / static_cast<double>(options_.years);
  r.hourly_ens_cvar_kwh = sparse_cvar(hourly, hours, options_.ens_alpha);

  const std::size_t bins = options_.histogram_bins;
  const double top = hourly.empty() ? 1.0 : *std::max_element(hourly.begin(), hourly.end());
  const double width = top / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) r.hourly_ens.edges.push_back(width * static_cast<double>(b));
  r.hourly_ens.counts.assign(bins, 0);
  for (const double s : hourly) {
    r.hourly_ens.counts[std::min(bins - 1, static_cast<std::size_t>(s / width))]++;
  }
  r.hourly_ens.counts[0] += hours - hourly.size();
  return r;
}

MetricReport run_monte_carlo(const NetworkTopology& topology, const InvestmentPlan& plan,
                             std::vector<LineOutageRate> rates, const SocProfile& profiles,
                             const MonteCarloOptions& options) {
  return MonteCarlo(topology, plan, std::move(rates), profiles, options).run();
}

nlohmann::json report_to_json(const MetricReport& r) {
  auto summary = [](const MetricSummary& s) {
    return nlohmann::json{{"mean", s.mean}, {"cvar", s.cvar}, {"worst", s.worst}};
  };
  return {{"years", r.years},
          {"seed", r.seed},
          {"ens_kwh", summary(r.ens_kwh)},
          {"saifi", summary(r.saifi)},
          {"saidi", summary(r.saidi)},
          {"mean_islanded_hours", r.mean_islanded_hours},
          {"hourly_ens_cvar_kwh", r.hourly_ens_cvar_kwh},
          {"hourly_ens_histogram", {{"edges", r.hourly_ens.edges}, {"counts", r.hourly_ens.counts}}},
          {"annual_ens_kwh", r.annual_ens_kwh},
          {"annual_saifi", r.annual_saifi},
          {"annual_saidi", r.annual_saidi},
          {"annual_islanded_hours", r.annual_islanded_hours}};
}

}  // namespace gridplan
