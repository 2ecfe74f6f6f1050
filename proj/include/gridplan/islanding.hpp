#pragma once

// Post-failure connectivity. An island is a connected component that holds
// no substation; every other component is energized.

#include "gridplan/grid_model.hpp"
#include "gridplan/scenario_model.hpp"

#include <json.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace gridplan {

struct Island {
  std::vector<std::size_t> buses;    // node indices, ascending
  std::vector<std::size_t> storage;  // storage indices located on `buses`, ascending
  double peak_load_kw = 0.0;

  bool operator==(const Island&) const = default;
};

double peak_load(const NetworkTopology& topology, const Island& island);

struct Partition {
  std::vector<bool> energized;  // per node
  std::vector<Island> islands;  // ordered by smallest bus index

  double islanded_peak_kw() const;
  bool operator==(const Partition&) const = default;
};

// Connectivity over (existing \ failed) U built. Inputs are line indices.
Partition energized_components(const NetworkTopology& topology, std::span<const std::size_t> failed_lines,
                               std::span<const std::size_t> built_candidates);

// Smallest set R of candidate lines such that for every build set B the
// partition under B equals the partition under B ∩ R. Sorted by line id.
std::vector<std::size_t> relevant_candidates(const NetworkTopology& topology, std::span<const std::size_t> failed_lines);

struct RelevantInvestment {
  std::vector<std::size_t> lines_on;
  std::vector<std::size_t> lines_off;
  std::vector<Island> islands;
};

struct StateIslands {
  std::vector<std::size_t> relevant_lines;  // sorted by line id
  // 2^|relevant_lines| entries. Entry j builds relevant_lines[i] iff bit
  // (|R| - 1 - i) of j is set, so entries run lexicographically over the
  // on/off pattern.
  std::vector<RelevantInvestment> investments;

  // Index of the entry matching a build set (non-relevant lines are ignored).
  std::size_t combination_for(std::span<const std::size_t> built_lines) const;
};

struct IslandCatalog {
  std::vector<StateIslands> states;  // aligned with StateCatalog::states
};

struct CatalogOptions {
  std::size_t max_relevant_candidates = 16;
};

// Throws ValidationError naming the state when |R_c| exceeds the cap.
IslandCatalog build_catalog(const NetworkTopology& topology, const StateCatalog& states,
                            const CatalogOptions& options = {});

nlohmann::json catalog_to_json(const NetworkTopology& topology, const StateCatalog& states,
                               const IslandCatalog& catalog);

}  // namespace gridplan
