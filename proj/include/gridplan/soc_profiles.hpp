#pragma once

// Normalised state-of-charge profiles f^bat: for every storage device a
// periods x days matrix of end-of-period SOC as a fraction of capacity.

#include "gridplan/grid_model.hpp"
#include "gridplan/solver.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace gridplan {

class SocProfile {
public:
  SocProfile() = default;
  // One periods x days matrix per storage device, in topology order.
  SocProfile(std::vector<std::string> storage_ids, std::vector<std::string> day_ids,
             std::vector<Eigen::MatrixXd> fractions);

  double operator()(std::size_t h, std::size_t t, std::size_t d) const { return fractions_[h](t, d); }
  const Eigen::MatrixXd& device(std::size_t h) const { return fractions_.at(h); }

  std::size_t devices() const noexcept { return fractions_.size(); }
  const std::vector<std::string>& storage_ids() const noexcept { return storage_ids_; }
  const std::vector<std::string>& day_ids() const noexcept { return day_ids_; }

  // Throws ValidationError unless the profile lists exactly the topology's
  // storage devices and days with |T| periods each.
  void check_covers(const NetworkTopology& topology) const;

  bool operator==(const SocProfile& other) const;

private:
  std::vector<std::string> storage_ids_;
  std::vector<std::string> day_ids_;
  std::vector<Eigen::MatrixXd> fractions_;
};

struct ArbitrageOptions {
  // Initial SOC preferred when prices leave it undetermined.
  double idle_soc = 0.5;
};

struct ArbitrageSchedule {
  Eigen::VectorXd soc;       // end of each period, fraction of capacity
  Eigen::VectorXd charge;    // fraction of capacity per hour
  Eigen::VectorXd discharge;
  double initial_soc = 0.0;
  double profit = 0.0;       // per kWh of capacity
};

// Unit-capacity arbitrage for one device over one day, solved
// lexicographically: maximise profit, then minimise total charge plus
// discharge, then keep the initial SOC closest to `idle_soc`.
ArbitrageSchedule solve_arbitrage(const StorageDevice& device, const Eigen::VectorXd& prices, double hours_per_period,
                                  const SolveConfig& solver = {}, const ArbitrageOptions& options = {});

// All devices and days in one solver batch per lexicographic stage. Throws
// ValidationError when a day has no price curve.
SocProfile compute_profiles(const NetworkTopology& topology, const SolveConfig& solver = {},
                            const ArbitrageOptions& options = {});

// Explicit table, values in [0,1].
SocProfile set_profiles(const NetworkTopology& topology, std::vector<Eigen::MatrixXd> fractions);
SocProfile constant_profiles(const NetworkTopology& topology, double fraction);

// CSV columns: storage_id, day_id, period (1-based), fraction.
void save_profiles(const SocProfile& profile, const std::filesystem::path& csv);
SocProfile load_profiles(const std::filesystem::path& csv, const NetworkTopology& topology);

}  // namespace gridplan
