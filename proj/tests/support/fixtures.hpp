#pragma once

// Synthetic feeders and scenario sets for tests.

#include "gridplan/grid_model.hpp"
#include "gridplan/scenario_model.hpp"
#include "gridplan/soc_profiles.hpp"

#include <cstdint>
#include <random>

namespace fixtures {

struct FeederSpec {
  std::size_t nodes = 8;  // substations included
  std::size_t substations = 1;
  std::size_t candidate_lines = 2;
  std::size_t existing_storage = 0;
  std::size_t candidate_storage = 1;
  std::size_t periods = 4;
  std::size_t days = 2;
  double voll = 5.0;
  double lambda = 0.0;
  double alpha = 0.9;
};

// Radial existing network rooted at the substations, ample line and
// substation capacity, candidate ties between random node pairs.
gridplan::NetworkTopology random_feeder(const FeederSpec& spec, std::uint64_t seed);

struct ScenarioSpec {
  std::size_t count = 6;
  double resilience_share = 0.3;
  double min_probability = 1e-3;
  double max_probability = 1e-2;
  std::size_t max_failed = 2;
};

gridplan::ScenarioSet random_scenarios(const gridplan::NetworkTopology& topology, const ScenarioSpec& spec,
                                       std::uint64_t seed);

// Random profiles in [0,1] for every device.
gridplan::SocProfile random_profiles(const gridplan::NetworkTopology& topology, std::uint64_t seed);

gridplan::NetworkTopology with_economics(const gridplan::NetworkTopology& topology, double voll, double lambda,
                                         double alpha);

// Two-node feeder: substation S, load bus B (peak 10 kW, 10 customers) on line L1.
gridplan::NetworkTopology radial_pair(std::size_t periods = 24);

}  // namespace fixtures
