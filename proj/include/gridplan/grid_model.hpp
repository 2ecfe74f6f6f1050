#pragma once

// Feeder data model. Units are fixed across the library: kW, kWh, hours,
// miles and US$. Periods and days are 0-based internally; files use 1-based
// period numbers.

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gridplan {

enum class AssetStatus { existing, candidate };

std::string_view to_string(AssetStatus status);
AssetStatus parse_asset_status(std::string_view text);

struct Node {
  std::string id;
  bool is_substation = false;
  double peak_demand_kw = 0.0;
  long customers = 0;
  std::optional<double> injection_limit_kw;  // substations only

  bool operator==(const Node&) const = default;
};

struct Line {
  std::string id;
  std::string from_node;
  std::string to_node;
  double impedance_pu_per_mile = 0.0;  // voltage drop (p.u.) per kW per mile
  double length_mi = 0.0;
  double capacity_kw = 0.0;
  AssetStatus status = AssetStatus::existing;
  std::optional<double> fixed_cost_usd;  // candidates only

  bool operator==(const Line&) const = default;
};

struct StorageDevice {
  std::string id;
  std::string node;
  AssetStatus status = AssetStatus::existing;
  double p_in_max_kw = 0.0;
  double p_out_max_kw = 0.0;
  double round_trip_eff = 1.0;
  double hours_to_full = 1.0;
  std::optional<double> fixed_cost_usd;         // candidates only
  std::optional<double> var_cost_usd_per_kwh;   // candidates only
  std::optional<double> size_cap;               // candidates only; bound on the sizing multiplier

  // Energy of one fully built unit: hours_to_full * p_in_max_kw.
  double unit_energy_kwh() const { return hours_to_full * p_in_max_kw; }
  // Largest buildable energy (existing devices: the installed energy).
  double max_energy_kwh() const {
    return status == AssetStatus::existing ? unit_energy_kwh() : unit_energy_kwh() * size_cap.value_or(0.0);
  }

  bool operator==(const StorageDevice&) const = default;
};

struct TypicalDay {
  std::string id;
  double weight_days = 0.0;
  double hours_per_period = 1.0;
  Eigen::VectorXd load_factor;  // one entry per period, fraction of peak
  Eigen::VectorXd price_usd_per_kwh;  // optional; empty when no prices were supplied

  bool operator==(const TypicalDay& other) const;
};

struct EconomicParams {
  double voll_usd_per_kwh = 0.0;
  double power_factor = 1.0;
  double lambda_risk = 0.0;
  double cvar_alpha = 0.0;
  double v_min_pu = 0.0;
  double v_max_pu = 0.0;
  // Weight on over-supply imbalance. 1 penalises it at VoLL as written in the
  // planning model; 0 drops it (extension).
  double surplus_weight = 1.0;
  double days_per_year = 365.0;

  bool operator==(const EconomicParams&) const = default;
};

// Every invariant of the data model; returns all violations, empty if valid.
std::vector<std::string> validate(const std::vector<Node>& nodes, const std::vector<Line>& lines,
                                  const std::vector<StorageDevice>& storage,
                                  const std::vector<TypicalDay>& days, const EconomicParams& econ);

// Validated, indexed and immutable feeder description.
class NetworkTopology {
public:
  NetworkTopology() = default;

  // Throws ValidationError listing every violated invariant.
  static NetworkTopology create(std::vector<Node> nodes, std::vector<Line> lines,
                                std::vector<StorageDevice> storage, std::vector<TypicalDay> days,
                                EconomicParams economics);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Line>& lines() const noexcept { return lines_; }
  const std::vector<StorageDevice>& storage() const noexcept { return storage_; }
  const std::vector<TypicalDay>& days() const noexcept { return days_; }
  const EconomicParams& economics() const noexcept { return economics_; }

  NetworkTopology with_economics(const EconomicParams& economics) const;

  std::size_t node_index(std::string_view id) const;
  std::size_t line_index(std::string_view id) const;
  std::size_t storage_index(std::string_view id) const;
  std::size_t day_index(std::string_view id) const;

  std::size_t line_from(std::size_t line) const { return line_ends_[line].first; }
  std::size_t line_to(std::size_t line) const { return line_ends_[line].second; }
  std::size_t storage_node(std::size_t h) const { return storage_nodes_[h]; }

  const std::vector<std::size_t>& existing_lines() const noexcept { return existing_lines_; }
  const std::vector<std::size_t>& candidate_lines() const noexcept { return candidate_lines_; }
  const std::vector<std::size_t>& candidate_storage() const noexcept { return candidate_storage_; }
  const std::vector<std::size_t>& substations() const noexcept { return substations_; }
  const std::vector<std::size_t>& load_nodes() const noexcept { return load_nodes_; }

  std::size_t periods() const noexcept { return days_.empty() ? 0 : static_cast<std::size_t>(days_.front().load_factor.size()); }
  double hours_per_period() const noexcept { return days_.empty() ? 1.0 : days_.front().hours_per_period; }
  long total_customers() const noexcept;

private:
  void build_index();

  std::vector<Node> nodes_;
  std::vector<Line> lines_;
  std::vector<StorageDevice> storage_;
  std::vector<TypicalDay> days_;
  EconomicParams economics_;

  std::unordered_map<std::string, std::size_t> node_ids_, line_ids_, storage_ids_, day_ids_;
  std::vector<std::pair<std::size_t, std::size_t>> line_ends_;
  std::vector<std::size_t> storage_nodes_;
  std::vector<std::size_t> existing_lines_, candidate_lines_, candidate_storage_, substations_, load_nodes_;
};

// D_ntd = peak demand of node n scaled by the load factor of period t on day d (kW).
double demand(const NetworkTopology& topology, std::size_t node, std::size_t period, std::size_t day);
double demand(const NetworkTopology& topology, std::string_view node, std::size_t period, std::size_t day);

// Annual energy demand: sum over days of W_d * sum_t delta * D_ntd (kWh).
double annual_energy_kwh(const NetworkTopology& topology);

enum class NetworkFormat { csv_dir, json };

NetworkTopology load_network(const std::filesystem::path& path, NetworkFormat format = NetworkFormat::csv_dir);
void save_network(const NetworkTopology& topology, const std::filesystem::path& path,
                  NetworkFormat format = NetworkFormat::csv_dir);

}  // namespace gridplan
