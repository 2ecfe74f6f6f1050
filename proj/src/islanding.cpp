#include "gridplan/islanding.hpp"

#include "gridplan/error.hpp"

#include <algorithm>
#include <numeric>

namespace gridplan {

namespace {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

// Union-find over existing lines minus `failed`, plus `built`.
DisjointSets connect(const NetworkTopology& topology, std::span<const std::size_t> failed,
                     std::span<const std::size_t> built) {
  std::vector<bool> down(topology.lines().size(), false);
  for (const auto l : failed) down.at(l) = true;
  DisjointSets sets(topology.nodes().size());
  for (const auto l : topology.existing_lines()) {
    if (!down[l]) sets.unite(topology.line_from(l), topology.line_to(l));
  }
  for (const auto l : built) {
    if (topology.lines().at(l).status != AssetStatus::candidate) {
      throw ValidationError("line '" + topology.lines()[l].id + "' is not a candidate");
    }
    sets.unite(topology.line_from(l), topology.line_to(l));
  }
  return sets;
}

std::vector<bool> energized_roots(const NetworkTopology& topology, DisjointSets& sets) {
  std::vector<bool> live(topology.nodes().size(), false);
  for (const auto s : topology.substations()) live[sets.find(s)] = true;
  return live;
}

void sort_by_id(const NetworkTopology& topology, std::vector<std::size_t>& lines) {
  std::sort(lines.begin(), lines.end(),
            [&](std::size_t a, std::size_t b) { return topology.lines()[a].id < topology.lines()[b].id; });
}

}  // namespace

double peak_load(const NetworkTopology& topology, const Island& island) {
  double total = 0.0;
  for (const auto b : island.buses) total += topology.nodes()[b].peak_demand_kw;
  return total;
}

double Partition::islanded_peak_kw() const {
  double total = 0.0;
  for (const auto& island : islands) total += island.peak_load_kw;
  return total;
}

Partition energized_components(const NetworkTopology& topology, std::span<const std::size_t> failed_lines,
                               std::span<const std::size_t> built_candidates) {
  auto sets = connect(topology, failed_lines, built_candidates);
  const auto live = energized_roots(topology, sets);
  const std::size_t n = topology.nodes().size();

  Partition p;
  p.energized.assign(n, false);
  std::vector<std::size_t> island_of_root(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(i);
    if (live[root]) {
      p.energized[i] = true;
      continue;
    }
    if (island_of_root[root] == n) {
      island_of_root[root] = p.islands.size();
      p.islands.emplace_back();
    }
    auto& island = p.islands[island_of_root[root]];
    island.buses.push_back(i);
    island.peak_load_kw += topology.nodes()[i].peak_demand_kw;
  }
  for (std::size_t h = 0; h < topology.storage().size(); ++h) {
    const auto root = sets.find(topology.storage_node(h));
    if (!live[root]) p.islands[island_of_root[root]].storage.push_back(h);
  }
  return p;
}

std::vector<std::size_t> relevant_candidates(const NetworkTopology& topology, std::span<const std::size_t> failed_lines) {
  // Building lines only merges components, so the de-energized node set can
  // only shrink: a candidate that cannot touch a de-energized component of
  // the no-build graph never can under any build set. One pass over the
  // no-build graph is therefore already the closure. Candidates whose ends
  // share a component never change the partition and are dropped too.
  auto sets = connect(topology, failed_lines, {});
  const auto live = energized_roots(topology, sets);
  std::vector<std::size_t> relevant;
  for (const auto l : topology.candidate_lines()) {
    const auto a = sets.find(topology.line_from(l));
    const auto b = sets.find(topology.line_to(l));
    if (a != b && (!live[a] || !live[b])) relevant.push_back(l);
  }
  sort_by_id(topology, relevant);
  return relevant;
}

std::size_t StateIslands::combination_for(std::span<const std::size_t> built_lines) const {
  std::size_t j = 0;
  const std::size_t r = relevant_lines.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (std::find(built_lines.begin(), built_lines.end(), relevant_lines[i]) != built_lines.end()) {
      j |= std::size_t{1} << (r - 1 - i);
    }
  }
  return j;
}

IslandCatalog build_catalog(const NetworkTopology& topology, const StateCatalog& states, const CatalogOptions& options) {
  IslandCatalog catalog;
  catalog.states.reserve(states.states.size());
  for (std::size_t c = 0; c < states.states.size(); ++c) {
    const auto& failed = states.states[c].failed_lines;
    check_failure_lines(topology, states.states[c], "failure state " + std::to_string(c));
    StateIslands entry;
    entry.relevant_lines = relevant_candidates(topology, failed);
    const std::size_t r = entry.relevant_lines.size();
    if (r > options.max_relevant_candidates) {
      std::string lines;
      for (const auto l : failed) lines += (lines.empty() ? "" : ",") + topology.lines()[l].id;
      throw ValidationError("failure state " + std::to_string(c) + " {" + lines + "} has " + std::to_string(r) +
                            " relevant candidate lines, above the enumeration cap of " +
                            std::to_string(options.max_relevant_candidates));
    }
    const std::size_t combinations = std::size_t{1} << r;
    entry.investments.reserve(combinations);
    for (std::size_t j = 0; j < combinations; ++j) {
      RelevantInvestment inv;
      for (std::size_t i = 0; i < r; ++i) {
        const bool on = (j >> (r - 1 - i)) & 1U;
        (on ? inv.lines_on : inv.lines_off).push_back(entry.relevant_lines[i]);
      }
      inv.islands = energized_components(topology, failed, inv.lines_on).islands;
      entry.investments.push_back(std::move(inv));
    }
    catalog.states.push_back(std::move(entry));
  }
  return catalog;
}

nlohmann::json catalog_to_json(const NetworkTopology& topology, const StateCatalog& states,
                               const IslandCatalog& catalog) {
  using nlohmann::json;
  auto ids = [](const auto& items, const std::vector<std::size_t>& indices) {
    json out = json::array();
    for (const auto i : indices) out.push_back(items[i].id);
    return out;
  };
  json out = json::array();
  for (std::size_t c = 0; c < catalog.states.size(); ++c) {
    json state{{"state", c},
               {"failed_lines", ids(topology.lines(), states.states[c].failed_lines)},
               {"relevant_lines", ids(topology.lines(), catalog.states[c].relevant_lines)}};
    json investments = json::array();
    for (const auto& inv : catalog.states[c].investments) {
      json islands = json::array();
      for (const auto& island : inv.islands) {
        islands.push_back({{"buses", ids(topology.nodes(), island.buses)},
                           {"storage", ids(topology.storage(), island.storage)},
                           {"peak_load_kw", island.peak_load_kw}});
      }
      investments.push_back({{"lines_on", ids(topology.lines(), inv.lines_on)},
                             {"lines_off", ids(topology.lines(), inv.lines_off)},
                             {"islands", std::move(islands)}});
    }
    state["investments"] = std::move(investments);
    out.push_back(std::move(state));
  }
  return out;
}

}  // namespace gridplan
