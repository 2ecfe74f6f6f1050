#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace oracle {

using namespace gridplan;

std::set<std::vector<std::size_t>> islands_bfs(const NetworkTopology& topology, const std::vector<std::size_t>& failed,
                                               const std::vector<std::size_t>& built) {
  const std::size_t n = topology.nodes().size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t l = 0; l < topology.lines().size(); ++l) {
    const auto& line = topology.lines()[l];
    const bool up = line.status == AssetStatus::existing
                        ? std::find(failed.begin(), failed.end(), l) == failed.end()
                        : std::find(built.begin(), built.end(), l) != built.end();
    if (!up) continue;
    const auto a = topology.node_index(line.from_node), b = topology.node_index(line.to_node);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> mark(n, -1);
  auto flood = [&](std::size_t start, int label) {
    std::deque<std::size_t> queue{start};
    mark[start] = label;
    std::vector<std::size_t> seen{start};
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (const auto v : adj[u]) {
        if (mark[v] < 0) {
          mark[v] = label;
          queue.push_back(v);
          seen.push_back(v);
        }
      }
    }
    std::sort(seen.begin(), seen.end());
    return seen;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (topology.nodes()[i].is_substation && mark[i] < 0) flood(i, 0);
  }
  std::set<std::vector<std::size_t>> out;
  int label = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (mark[i] < 0) out.insert(flood(i, label++));
  }
  return out;
}

double cvar_grid(const std::vector<double>& values, const std::vector<double>& probabilities, double alpha,
                 std::size_t grid_points) {
  auto objective = [&](double zeta) {
    double tail = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) tail += probabilities[i] * std::max(0.0, values[i] - zeta);
    return zeta + tail / (1.0 - alpha);
  };
  double best = std::numeric_limits<double>::infinity();
  for (const double v : values) best = std::min(best, objective(v));
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  for (std::size_t k = 0; grid_points > 0 && k <= grid_points; ++k) {
    best = std::min(best, objective(*lo + (*hi - *lo) * static_cast<double>(k) / static_cast<double>(grid_points)));
  }
  return best;
}

double arbitrage_dp(const StorageDevice& device, const std::vector<double>& prices, double delta, std::size_t points) {
  const double charge_max = 1.0 / device.hours_to_full;
  const double discharge_max = device.p_out_max_kw / (device.hours_to_full * device.p_in_max_kw);
  const double eta = device.round_trip_eff;
  const double step = 1.0 / static_cast<double>(points - 1);
  const double ninf = -std::numeric_limits<double>::infinity();
  auto gain = [&](std::size_t from, std::size_t to, double price) {
    const double change = (static_cast<double>(to) - static_cast<double>(from)) * step;
    if (change >= 0.0) {
      const double pin = change / (eta * delta);
      return pin <= charge_max + 1e-12 ? -price * delta * pin : ninf;
    }
    const double pout = -change / delta;
    return pout <= discharge_max + 1e-12 ? price * delta * pout : ninf;
  };
  double best = ninf;
  for (std::size_t start = 0; start < points; ++start) {
    std::vector<double> value(points, ninf);
    value[start] = 0.0;
    for (const double price : prices) {
      std::vector<double> next(points, ninf);
      for (std::size_t a = 0; a < points; ++a) {
        if (value[a] == ninf) continue;
        for (std::size_t b = 0; b < points; ++b) {
          const double g = gain(a, b, price);
          if (g != ninf) next[b] = std::max(next[b], value[a] + g);
        }
      }
      value = std::move(next);
    }
    best = std::max(best, value[start]);
  }
  return best;
}

MpsData parse_mps(const std::string& text) {
  MpsData out;
  std::istringstream in(text);
  std::string line, section;
  bool integer = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    std::istringstream tok(line);
    std::vector<std::string> f;
    for (std::string s; tok >> s;) f.push_back(s);
    if (f.empty()) continue;
    if (line[0] != ' ') {
      section = f[0];
      continue;
    }
    if (section == "ROWS") {
      out.row_type[f[1]] = f[0][0];
      if (f[0] == "N") {
        out.objective_row = f[1];
      } else {
        out.row_order.push_back(f[1]);
      }
    } else if (section == "COLUMNS") {
      if (f.size() >= 3 && f[1] == "'MARKER'") {
        integer = f[2] == "'INTORG'";
        continue;
      }
      if (out.column_order.empty() || out.column_order.back() != f[0]) out.column_order.push_back(f[0]);
      if (integer) out.integers.insert(f[0]);
      for (std::size_t k = 1; k + 1 < f.size(); k += 2) out.coefficients[{f[k], f[0]}] = std::stod(f[k + 1]);
    } else if (section == "RHS") {
      for (std::size_t k = 1; k + 1 < f.size(); k += 2) out.rhs[f[k]] = std::stod(f[k + 1]);
    } else if (section == "BOUNDS") {
      const auto& type = f[0];
      const auto& col = f[2];
      const double v = f.size() > 3 ? std::stod(f[3]) : 0.0;
      const double inf = std::numeric_limits<double>::infinity();
      if (type == "UP") out.upper[col] = v;
      if (type == "LO") out.lower[col] = v;
      if (type == "FX") out.lower[col] = out.upper[col] = v;
      if (type == "FR") {
        out.lower[col] = -inf;
        out.upper[col] = inf;
      }
      if (type == "MI") out.lower[col] = -inf;
      if (type == "PL") out.upper[col] = inf;
      if (type == "BV") {
        out.lower[col] = 0.0;
        out.upper[col] = 1.0;
        out.integers.insert(col);
      }
    }
  }
  return out;
}

double slot_loss(const NetworkTopology& topology, const OutageScenario& scenario, const std::vector<std::size_t>& built,
                 const std::vector<double>& capacity_kwh, const SocProfile& profiles, std::size_t t, std::size_t d) {
  const std::size_t T = topology.periods();
  const std::size_t last = std::min(T - 1, t + static_cast<std::size_t>(scenario.duration_periods));
  double window = 0.0;
  for (std::size_t tau = t; tau <= last; ++tau) window += topology.days()[d].load_factor[static_cast<Eigen::Index>(tau)];
  double loss = 0.0;
  for (const auto& island : islands_bfs(topology, scenario.state.failed_lines, built)) {
    for (const auto n : island) loss += topology.hours_per_period() * topology.nodes()[n].peak_demand_kw * window;
    for (std::size_t h = 0; h < topology.storage().size(); ++h) {
      if (!std::binary_search(island.begin(), island.end(), topology.node_index(topology.storage()[h].node))) continue;
      loss -= capacity_kwh[h] * (scenario.outage_class == OutageClass::routine ? profiles(h, t, d) : 1.0);
    }
  }
  return std::max(0.0, loss);
}

namespace {

// Loss in slot (s,t,d) = max(0, base - sum_k slope_k c_k) over the free sizes c.
struct SlotTerms {
  double base = 0.0;
  std::vector<double> slope;
};

struct PlanTerms {
  // terms[d * T + t][s - 1]
  std::vector<std::vector<SlotTerms>> slots;
};

double risk_cost(const NetworkTopology& topology, const ScenarioSet& scenarios, const PlanTerms& terms,
                 const std::vector<double>& sizes) {
  const auto& econ = topology.economics();
  const std::size_t T = topology.periods();
  const std::size_t S = scenarios.size();
  std::vector<double> losses(S, 0.0), probabilities(S);
  for (std::size_t s = 0; s < S; ++s) probabilities[s] = scenarios[s].probability;
  double total = 0.0;
  for (std::size_t d = 0; d < topology.days().size(); ++d) {
    for (std::size_t t = 0; t < T; ++t) {
      const auto& slot = terms.slots[d * T + t];
      double expected = 0.0;
      for (std::size_t s = 1; s < S; ++s) {
        double v = slot[s - 1].base;
        for (std::size_t k = 0; k < sizes.size(); ++k) v -= slot[s - 1].slope[k] * sizes[k];
        losses[s] = std::max(0.0, v);
        expected += probabilities[s] * losses[s];
      }
      const double tail = econ.lambda_risk > 0.0 ? cvar_grid(losses, probabilities, econ.cvar_alpha, 0) : 0.0;
      total += topology.days()[d].weight_days * ((1.0 - econ.lambda_risk) * expected + econ.lambda_risk * tail);
    }
  }
  return econ.power_factor * econ.voll_usd_per_kwh * total;
}

PlanTerms plan_terms(const NetworkTopology& topology, const ScenarioSet& scenarios, const SocProfile& profiles,
                     const std::vector<std::size_t>& built, const std::vector<std::size_t>& free_devices) {
  const std::size_t T = topology.periods();
  const std::size_t H = topology.storage().size();
  PlanTerms out;
  out.slots.assign(T * topology.days().size(), std::vector<SlotTerms>(scenarios.size() - 1));
  std::vector<double> existing(H, 0.0);
  for (std::size_t h = 0; h < H; ++h) {
    if (topology.storage()[h].status == AssetStatus::existing) existing[h] = topology.storage()[h].unit_energy_kwh();
  }
  for (std::size_t s = 1; s < scenarios.size(); ++s) {
    const auto& sc = scenarios[s];
    const auto islands = islands_bfs(topology, sc.state.failed_lines, built);
    std::vector<bool> islanded(H, false);
    for (std::size_t h = 0; h < H; ++h) {
      const auto node = topology.node_index(topology.storage()[h].node);
      for (const auto& island : islands) islanded[h] = islanded[h] || std::binary_search(island.begin(), island.end(), node);
    }
    for (std::size_t d = 0; d < topology.days().size(); ++d) {
      for (std::size_t t = 0; t < T; ++t) {
        auto& slot = out.slots[d * T + t][s - 1];
        const std::size_t last = std::min(T - 1, t + static_cast<std::size_t>(sc.duration_periods));
        double window = 0.0;
        for (std::size_t tau = t; tau <= last; ++tau) window += topology.days()[d].load_factor[static_cast<Eigen::Index>(tau)];
        for (const auto& island : islands) {
          for (const auto n : island) slot.base += topology.hours_per_period() * topology.nodes()[n].peak_demand_kw * window;
        }
        auto credit = [&](std::size_t h) {
          if (!islanded[h]) return 0.0;
          return sc.outage_class == OutageClass::routine ? profiles(h, t, d) : 1.0;
        };
        for (std::size_t h = 0; h < H; ++h) slot.base -= existing[h] * credit(h);
        for (const auto h : free_devices) slot.slope.push_back(credit(h));
      }
    }
  }
  return out;
}

struct Hyperplane {
  double a, b, r;  // a c1 + b c2 = r
};

std::vector<std::vector<double>> candidate_points(const PlanTerms& terms, const std::vector<double>& upper) {
  const std::size_t dim = upper.size();
  if (dim == 0) return {{}};
  std::vector<Hyperplane> planes;
  auto add = [&](double a, double b, double r) {
    if (std::abs(a) < 1e-15 && std::abs(b) < 1e-15) return;
    planes.push_back({a, b, r});
  };
  for (const auto& slot : terms.slots) {
    for (std::size_t i = 0; i < slot.size(); ++i) {
      const auto& p = slot[i];
      add(p.slope[0], dim > 1 ? p.slope[1] : 0.0, p.base);
      for (std::size_t j = i + 1; j < slot.size(); ++j) {
        const auto& q = slot[j];
        add(p.slope[0] - q.slope[0], dim > 1 ? p.slope[1] - q.slope[1] : 0.0, p.base - q.base);
      }
    }
  }
  std::vector<std::vector<double>> out;
  auto inside = [&](const std::vector<double>& c) {
    for (std::size_t k = 0; k < dim; ++k) {
      if (c[k] < -1e-9 || c[k] > upper[k] + 1e-9) return false;
    }
    return true;
  };
  auto clamp = [&](std::vector<double> c) {
    for (std::size_t k = 0; k < dim; ++k) c[k] = std::clamp(c[k], 0.0, upper[k]);
    return c;
  };
  if (dim == 1) {
    out.push_back({0.0});
    out.push_back({upper[0]});
    for (const auto& p : planes) {
      const std::vector<double> c{p.r / p.a};
      if (inside(c)) out.push_back(clamp(c));
    }
    return out;
  }
  planes.push_back({1, 0, 0});
  planes.push_back({1, 0, upper[0]});
  planes.push_back({0, 1, 0});
  planes.push_back({0, 1, upper[1]});
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      const auto& p = planes[i];
      const auto& q = planes[j];
      const double det = p.a * q.b - p.b * q.a;
      if (std::abs(det) < 1e-12) continue;
      const std::vector<double> c{(p.r * q.b - p.b * q.r) / det, (p.a * q.r - p.r * q.a) / det};
      if (inside(c)) out.push_back(clamp(c));
    }
  }
  return out;
}

}  // namespace

double plan_cost(const NetworkTopology& topology, const ScenarioSet& scenarios, const SocProfile& profiles,
                 const InvestmentPlan& plan) {
  std::vector<std::size_t> built;
  for (const auto l : topology.candidate_lines()) {
    if (plan.lines.count(topology.lines()[l].id)) built.push_back(l);
  }
  std::vector<std::size_t> free;
  std::vector<double> sizes;
  double invest = 0.0;
  for (const auto l : built) invest += *topology.lines()[l].fixed_cost_usd;
  for (const auto h : topology.candidate_storage()) {
    const auto& s = topology.storage()[h];
    const auto it = plan.storage_kwh.find(s.id);
    if (it == plan.storage_kwh.end()) continue;
    free.push_back(h);
    sizes.push_back(it->second);
    invest += *s.fixed_cost_usd + *s.var_cost_usd_per_kwh * it->second;
  }
  return invest + risk_cost(topology, scenarios, plan_terms(topology, scenarios, profiles, built, free), sizes);
}

Enumeration enumerate_scalable(const NetworkTopology& topology, const ScenarioSet& scenarios, const SocProfile& profiles) {
  const auto& lines = topology.candidate_lines();
  const auto& devices = topology.candidate_storage();
  Enumeration best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << lines.size()); ++mask) {
    std::vector<std::size_t> built;
    double line_cost = 0.0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (mask >> i & 1U) {
        built.push_back(lines[i]);
        line_cost += *topology.lines()[lines[i]].fixed_cost_usd;
      }
    }
    for (std::size_t smask = 0; smask < (std::size_t{1} << devices.size()); ++smask) {
      std::vector<std::size_t> free;
      std::vector<double> upper;
      double fixed = 0.0;
      for (std::size_t k = 0; k < devices.size(); ++k) {
        if (!(smask >> k & 1U)) continue;
        const auto& s = topology.storage()[devices[k]];
        free.push_back(devices[k]);
        upper.push_back(s.unit_energy_kwh() * *s.size_cap);
        fixed += *s.fixed_cost_usd;
      }
      const auto terms = plan_terms(topology, scenarios, profiles, built, free);
      for (const auto& sizes : candidate_points(terms, upper)) {
        double cost = line_cost + fixed + risk_cost(topology, scenarios, terms, sizes);
        for (std::size_t k = 0; k < free.size(); ++k) cost += *topology.storage()[free[k]].var_cost_usd_per_kwh * sizes[k];
        ++best.evaluated;
        if (cost < best.objective) {
          best.objective = cost;
          best.plan = InvestmentPlan{};
          for (const auto l : built) best.plan.lines.insert(topology.lines()[l].id);
          for (std::size_t k = 0; k < free.size(); ++k) best.plan.storage_kwh[topology.storage()[free[k]].id] = sizes[k];
        }
      }
    }
  }
  return best;
}

}  // namespace oracle
