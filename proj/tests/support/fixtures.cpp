#include "fixtures.hpp"

#include <algorithm>
#include <set>

namespace fixtures {

using namespace gridplan;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<TypicalDay> make_days(std::size_t count, std::size_t periods, std::mt19937_64& rng) {
  std::vector<TypicalDay> days;
  double left = 365.0;
  for (std::size_t d = 0; d < count; ++d) {
    TypicalDay day;
    day.id = "D" + std::to_string(d + 1);
    day.weight_days = d + 1 == count ? left : std::floor(365.0 / static_cast<double>(count));
    left -= day.weight_days;
    day.hours_per_period = 24.0 / static_cast<double>(periods);
    day.load_factor.resize(static_cast<Eigen::Index>(periods));
    day.price_usd_per_kwh.resize(static_cast<Eigen::Index>(periods));
    for (std::size_t t = 0; t < periods; ++t) {
      day.load_factor[static_cast<Eigen::Index>(t)] = uniform(rng, 0.4, 1.0);
      day.price_usd_per_kwh[static_cast<Eigen::Index>(t)] = uniform(rng, 0.05, 0.3);
    }
    days.push_back(std::move(day));
  }
  return days;
}

}  // namespace

NetworkTopology random_feeder(const FeederSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Node> nodes;
  double total_peak = 0.0;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    Node n;
    if (i < spec.substations) {
      n.id = "S" + std::to_string(i + 1);
      n.is_substation = true;
    } else {
      n.id = "N" + std::to_string(i - spec.substations + 1);
      n.peak_demand_kw = std::round(uniform(rng, 5.0, 50.0) * 100.0) / 100.0;
      n.customers = static_cast<long>(pick(rng, 1, 20));
      total_peak += n.peak_demand_kw;
    }
    nodes.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < spec.substations; ++i) nodes[i].injection_limit_kw = 10.0 * total_peak + 1000.0;

  std::vector<Line> lines;
  std::set<std::pair<std::size_t, std::size_t>> linked;
  auto add_line = [&](std::size_t a, std::size_t b, bool candidate) {
    Line l;
    l.id = (candidate ? "C" : "L") + std::to_string(lines.size() + 1);
    l.from_node = nodes[a].id;
    l.to_node = nodes[b].id;
    l.impedance_pu_per_mile = 1e-6;
    l.length_mi = std::round(uniform(rng, 0.5, 2.0) * 100.0) / 100.0;
    l.capacity_kw = 10.0 * total_peak + 1000.0;
    l.status = candidate ? AssetStatus::candidate : AssetStatus::existing;
    if (candidate) l.fixed_cost_usd = std::round(uniform(rng, 1000.0, 5000.0));
    linked.insert({std::min(a, b), std::max(a, b)});
    lines.push_back(std::move(l));
  };
  for (std::size_t i = spec.substations; i < spec.nodes; ++i) {
    const std::size_t parent = i == spec.substations ? pick(rng, 0, spec.substations - 1) : pick(rng, 0, i - 1);
    add_line(parent, i, false);
  }
  std::size_t guard = 0;
  for (std::size_t c = 0; c < spec.candidate_lines && guard < 10000; ++guard) {
    const std::size_t a = pick(rng, 0, spec.nodes - 1), b = pick(rng, spec.substations, spec.nodes - 1);
    if (a == b || linked.count({std::min(a, b), std::max(a, b)})) continue;
    add_line(a, b, true);
    ++c;
  }

  std::vector<StorageDevice> storage;
  auto add_storage = [&](bool candidate) {
    StorageDevice s;
    s.id = (candidate ? "BC" : "BE") + std::to_string(storage.size() + 1);
    s.node = nodes[pick(rng, spec.substations, spec.nodes - 1)].id;
    s.status = candidate ? AssetStatus::candidate : AssetStatus::existing;
    s.p_in_max_kw = std::round(uniform(rng, 10.0, 30.0));
    s.p_out_max_kw = s.p_in_max_kw;
    s.round_trip_eff = 0.9;
    s.hours_to_full = static_cast<double>(pick(rng, 2, 4));
    if (candidate) {
      s.fixed_cost_usd = std::round(uniform(rng, 500.0, 2000.0));
      s.var_cost_usd_per_kwh = std::round(uniform(rng, 0.5, 2.0) * 100.0) / 100.0;
      s.size_cap = static_cast<double>(pick(rng, 1, 3));
    }
    storage.push_back(std::move(s));
  };
  for (std::size_t h = 0; h < spec.existing_storage; ++h) add_storage(false);
  for (std::size_t h = 0; h < spec.candidate_storage; ++h) add_storage(true);

  EconomicParams econ;
  econ.voll_usd_per_kwh = spec.voll;
  econ.power_factor = 0.9;
  econ.lambda_risk = spec.lambda;
  econ.cvar_alpha = spec.alpha;
  econ.v_min_pu = 0.9;
  econ.v_max_pu = 1.1;
  return NetworkTopology::create(std::move(nodes), std::move(lines), std::move(storage),
                                 make_days(spec.days, spec.periods, rng), econ);
}

ScenarioSet random_scenarios(const NetworkTopology& topology, const ScenarioSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& existing = topology.existing_lines();
  std::vector<OutageScenario> out;
  for (std::size_t s = 0; s < spec.count; ++s) {
    OutageScenario sc;
    sc.id = "F" + std::to_string(s + 1);
    const std::size_t k = pick(rng, 1, std::min(spec.max_failed, existing.size()));
    std::set<std::size_t> failed;
    while (failed.size() < k) failed.insert(existing[pick(rng, 0, existing.size() - 1)]);
    sc.state.failed_lines.assign(failed.begin(), failed.end());
    sc.duration_periods = static_cast<int>(pick(rng, 1, std::max<std::size_t>(1, topology.periods() - 1)));
    sc.outage_class = uniform(rng, 0.0, 1.0) < spec.resilience_share ? OutageClass::resilience : OutageClass::routine;
    sc.probability = uniform(rng, spec.min_probability, spec.max_probability);
    out.push_back(std::move(sc));
  }
  return ScenarioSet(std::move(out));
}

SocProfile random_profiles(const NetworkTopology& topology, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXd> fractions;
  for (std::size_t h = 0; h < topology.storage().size(); ++h) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(topology.periods()), static_cast<Eigen::Index>(topology.days().size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, 0.0, 1.0);
    fractions.push_back(std::move(m));
  }
  return set_profiles(topology, std::move(fractions));
}

NetworkTopology with_economics(const NetworkTopology& topology, double voll, double lambda, double alpha) {
  auto e = topology.economics();
  e.voll_usd_per_kwh = voll;
  e.lambda_risk = lambda;
  e.cvar_alpha = alpha;
  return topology.with_economics(e);
}

NetworkTopology radial_pair(std::size_t periods) {
  std::vector<Node> nodes{{"S", true, 0.0, 0, 1000.0}, {"B", false, 10.0, 10, std::nullopt}};
  std::vector<Line> lines{{"L1", "S", "B", 1e-6, 1.0, 100.0, AssetStatus::existing, std::nullopt}};
  TypicalDay day;
  day.id = "D1";
  day.weight_days = 365.0;
  day.hours_per_period = 24.0 / static_cast<double>(periods);
  day.load_factor = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(periods));
  EconomicParams econ;
  econ.voll_usd_per_kwh = 5.0;
  econ.power_factor = 0.9;
  econ.cvar_alpha = 0.9;
  econ.v_min_pu = 0.9;
  econ.v_max_pu = 1.1;
  return NetworkTopology::create(std::move(nodes), std::move(lines), {}, {day}, econ);
}

}  // namespace fixtures
