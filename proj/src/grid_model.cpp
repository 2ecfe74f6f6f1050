#include "gridplan/grid_model.hpp"

#include "csv.hpp"
#include "gridplan/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>

namespace gridplan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(AssetStatus status) {
  return status == AssetStatus::existing ? "existing" : "candidate";
}

AssetStatus parse_asset_status(std::string_view text) {
  if (text == "existing") return AssetStatus::existing;
  if (text == "candidate") return AssetStatus::candidate;
  throw SchemaError("status must be 'existing' or 'candidate', got '" + std::string(text) + "'");
}

bool TypicalDay::operator==(const TypicalDay& other) const {
  return id == other.id && weight_days == other.weight_days && hours_per_period == other.hours_per_period &&
         load_factor.size() == other.load_factor.size() && load_factor == other.load_factor &&
         price_usd_per_kwh.size() == other.price_usd_per_kwh.size() &&
         price_usd_per_kwh == other.price_usd_per_kwh;
}

namespace {

template <typename T>
std::vector<std::string> duplicate_ids(const std::vector<T>& items, std::string_view what) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) out.push_back(std::string(what) + " id '" + item.id + "' is not unique");
  }
  return out;
}

}  // namespace

std::vector<std::string> validate(const std::vector<Node>& nodes, const std::vector<Line>& lines,
                                  const std::vector<StorageDevice>& storage,
                                  const std::vector<TypicalDay>& days, const EconomicParams& econ) {
  std::vector<std::string> v;
  auto add = [&v](std::string message) { v.push_back(std::move(message)); };

  for (auto& m : duplicate_ids(nodes, "node")) add(std::move(m));
  for (auto& m : duplicate_ids(lines, "line")) add(std::move(m));
  for (auto& m : duplicate_ids(storage, "storage")) add(std::move(m));
  for (auto& m : duplicate_ids(days, "typical day")) add(std::move(m));

  std::unordered_map<std::string, std::size_t> node_ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) node_ids.emplace(nodes[i].id, i);

  bool any_substation = false;
  for (const auto& n : nodes) {
    if (n.is_substation) {
      any_substation = true;
      if (n.peak_demand_kw != 0.0) add("node '" + n.id + "': substations must have zero peak demand");
      if (!n.injection_limit_kw) add("node '" + n.id + "': substation requires injection_limit_kw");
      else if (*n.injection_limit_kw < 0.0) add("node '" + n.id + "': injection_limit_kw must be >= 0");
    } else {
      if (n.injection_limit_kw) add("node '" + n.id + "': injection_limit_kw is only allowed on substations");
      if (!(n.peak_demand_kw >= 0.0)) add("node '" + n.id + "': peak_demand_kw must be >= 0");
    }
    if (n.customers < 0) add("node '" + n.id + "': customers must be >= 0");
  }
  if (!nodes.empty() && !any_substation) add("network has no substation");

  for (const auto& l : lines) {
    const bool from_ok = node_ids.count(l.from_node) > 0;
    const bool to_ok = node_ids.count(l.to_node) > 0;
    if (!from_ok) add("line '" + l.id + "': unknown from_node '" + l.from_node + "'");
    if (!to_ok) add("line '" + l.id + "': unknown to_node '" + l.to_node + "'");
    if (l.from_node == l.to_node) add("line '" + l.id + "': from_node equals to_node");
    if (!(l.capacity_kw > 0.0)) add("line '" + l.id + "': capacity_kw must be > 0");
    if (!(l.impedance_pu_per_mile >= 0.0)) add("line '" + l.id + "': impedance must be >= 0");
    if (!(l.length_mi >= 0.0)) add("line '" + l.id + "': length_mi must be >= 0");
    if (l.status == AssetStatus::candidate) {
      if (!l.fixed_cost_usd) add("line '" + l.id + "': candidate requires fixed_cost_usd");
      else if (!(*l.fixed_cost_usd >= 0.0)) add("line '" + l.id + "': fixed_cost_usd must be >= 0");
    } else if (l.fixed_cost_usd) {
      add("line '" + l.id + "': fixed_cost_usd is only allowed on candidates");
    }
  }

  for (const auto& h : storage) {
    if (!node_ids.count(h.node)) {
      add("storage '" + h.id + "': unknown node '" + h.node + "'");
    } else if (nodes[node_ids.at(h.node)].is_substation) {
      add("storage '" + h.id + "': storage cannot sit on a substation bus");
    }
    if (!(h.p_in_max_kw > 0.0)) add("storage '" + h.id + "': p_in_max_kw must be > 0");
    if (!(h.p_out_max_kw > 0.0)) add("storage '" + h.id + "': p_out_max_kw must be > 0");
    if (!(h.round_trip_eff > 0.0 && h.round_trip_eff <= 1.0)) add("storage '" + h.id + "': round_trip_eff must lie in (0,1]");
    if (!(h.hours_to_full > 0.0)) add("storage '" + h.id + "': hours_to_full must be > 0");
    const bool candidate = h.status == AssetStatus::candidate;
    auto check_cost = [&](const std::optional<double>& value, std::string_view name) {
      if (candidate && !value) add("storage '" + h.id + "': candidate requires " + std::string(name));
      if (candidate && value && !(*value >= 0.0)) add("storage '" + h.id + "': " + std::string(name) + " must be >= 0");
      if (!candidate && value) add("storage '" + h.id + "': " + std::string(name) + " is only allowed on candidates");
    };
    check_cost(h.fixed_cost_usd, "fixed_cost_usd");
    check_cost(h.var_cost_usd_per_kwh, "var_cost_usd_per_kwh");
    check_cost(h.size_cap, "size_cap");
  }

  if (days.empty()) add("at least one typical day is required");
  double weight_total = 0.0;
  for (const auto& d : days) {
    weight_total += d.weight_days;
    if (!(d.weight_days >= 0.0)) add("day '" + d.id + "': weight_days must be >= 0");
    if (d.load_factor.size() == 0) add("day '" + d.id + "': no periods");
    if (!(d.hours_per_period > 0.0)) add("day '" + d.id + "': hours_per_period must be > 0");
    if (std::abs(d.hours_per_period * static_cast<double>(d.load_factor.size()) - 24.0) > 1e-9) {
      add("day '" + d.id + "': hours_per_period * periods must equal 24");
    }
    if (d.load_factor.size() > 0 && (d.load_factor.maxCoeff() > 1.0 || d.load_factor.minCoeff() < 0.0)) {
      add("day '" + d.id + "': load factors must lie in [0,1]");
    }
    if (d.price_usd_per_kwh.size() != 0 && d.price_usd_per_kwh.size() != d.load_factor.size()) {
      add("day '" + d.id + "': price curve length differs from period count");
    }
    if (!days.empty() && (d.load_factor.size() != days.front().load_factor.size() ||
                          d.hours_per_period != days.front().hours_per_period)) {
      add("day '" + d.id + "': all typical days must share the same period structure");
    }
  }
  if (!days.empty() && std::abs(weight_total - econ.days_per_year) > 1e-9) {
    std::ostringstream msg;
    msg << "typical day weights sum to " << weight_total << ", expected " << econ.days_per_year;
    add(msg.str());
  }

  if (!(econ.voll_usd_per_kwh >= 0.0)) add("economics: voll_usd_per_kwh must be >= 0");
  if (!(econ.power_factor > 0.0 && econ.power_factor <= 1.0)) add("economics: power_factor must lie in (0,1]");
  if (!(econ.lambda_risk >= 0.0 && econ.lambda_risk <= 1.0)) add("economics: lambda_risk must lie in [0,1]");
  if (!(econ.cvar_alpha >= 0.0 && econ.cvar_alpha < 1.0)) add("economics: cvar_alpha must lie in [0,1)");
  if (!(econ.v_min_pu < econ.v_max_pu)) add("economics: v_min_pu must be below v_max_pu");
  if (!(econ.surplus_weight >= 0.0)) add("economics: surplus_weight must be >= 0");
  if (!(econ.days_per_year == 365.0 || econ.days_per_year == 366.0)) add("economics: days_per_year must be 365 or 366");

  // Pre-failure energization over existing lines.
  {
    std::vector<std::vector<std::size_t>> adjacency(nodes.size());
    for (const auto& l : lines) {
      if (l.status != AssetStatus::existing || !node_ids.count(l.from_node) || !node_ids.count(l.to_node)) continue;
      const auto a = node_ids.at(l.from_node);
      const auto b = node_ids.at(l.to_node);
      adjacency[a].push_back(b);
      adjacency[b].push_back(a);
    }
    std::vector<bool> reached(nodes.size(), false);
    std::queue<std::size_t> frontier;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].is_substation) {
        reached[i] = true;
        frontier.push(i);
      }
    }
    while (!frontier.empty()) {
      const auto n = frontier.front();
      frontier.pop();
      for (const auto m : adjacency[n]) {
        if (!reached[m]) {
          reached[m] = true;
          frontier.push(m);
        }
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!reached[i]) add("node '" + nodes[i].id + "' is not connected to a substation over existing lines");
    }
  }
  return v;
}

NetworkTopology NetworkTopology::create(std::vector<Node> nodes, std::vector<Line> lines,
                                        std::vector<StorageDevice> storage, std::vector<TypicalDay> days,
                                        EconomicParams economics) {
  auto violations = validate(nodes, lines, storage, days, economics);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  NetworkTopology t;
  t.nodes_ = std::move(nodes);
  t.lines_ = std::move(lines);
  t.storage_ = std::move(storage);
  t.days_ = std::move(days);
  t.economics_ = economics;
  t.build_index();
  return t;
}

NetworkTopology NetworkTopology::with_economics(const EconomicParams& economics) const {
  return create(nodes_, lines_, storage_, days_, economics);
}

void NetworkTopology::build_index() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    node_ids_.emplace(nodes_[i].id, i);
    (nodes_[i].is_substation ? substations_ : load_nodes_).push_back(i);
  }
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    line_ids_.emplace(lines_[i].id, i);
    line_ends_.emplace_back(node_ids_.at(lines_[i].from_node), node_ids_.at(lines_[i].to_node));
    (lines_[i].status == AssetStatus::existing ? existing_lines_ : candidate_lines_).push_back(i);
  }
  for (std::size_t i = 0; i < storage_.size(); ++i) {
    storage_ids_.emplace(storage_[i].id, i);
    storage_nodes_.push_back(node_ids_.at(storage_[i].node));
    if (storage_[i].status == AssetStatus::candidate) candidate_storage_.push_back(i);
  }
  for (std::size_t i = 0; i < days_.size(); ++i) day_ids_.emplace(days_[i].id, i);
}

namespace {
std::size_t lookup(const std::unordered_map<std::string, std::size_t>& ids, std::string_view id, std::string_view what) {
  const auto it = ids.find(std::string(id));
  if (it == ids.end()) throw ValidationError("unknown " + std::string(what) + " '" + std::string(id) + "'");
  return it->second;
}
}  // namespace

std::size_t NetworkTopology::node_index(std::string_view id) const { return lookup(node_ids_, id, "node"); }
std::size_t NetworkTopology::line_index(std::string_view id) const { return lookup(line_ids_, id, "line"); }
std::size_t NetworkTopology::storage_index(std::string_view id) const { return lookup(storage_ids_, id, "storage"); }
std::size_t NetworkTopology::day_index(std::string_view id) const { return lookup(day_ids_, id, "typical day"); }

long NetworkTopology::total_customers() const noexcept {
  return std::accumulate(nodes_.begin(), nodes_.end(), 0L, [](long acc, const Node& n) { return acc + n.customers; });
}

double demand(const NetworkTopology& topology, std::size_t node, std::size_t period, std::size_t day) {
  if (node >= topology.nodes().size()) throw ValidationError("unknown node index " + std::to_string(node));
  if (day >= topology.days().size()) throw ValidationError("unknown day index " + std::to_string(day));
  if (period >= topology.periods()) throw ValidationError("unknown period " + std::to_string(period));
  const auto& n = topology.nodes()[node];
  if (n.is_substation) throw ValidationError("node '" + n.id + "' is a substation and has no demand");
  return n.peak_demand_kw * topology.days()[day].load_factor[static_cast<Eigen::Index>(period)];
}

double demand(const NetworkTopology& topology, std::string_view node, std::size_t period, std::size_t day) {
  return demand(topology, topology.node_index(node), period, day);
}

double annual_energy_kwh(const NetworkTopology& topology) {
  double peak = 0.0;
  for (const auto n : topology.load_nodes()) peak += topology.nodes()[n].peak_demand_kw;
  double total = 0.0;
  for (const auto& d : topology.days()) total += d.weight_days * d.hours_per_period * peak * d.load_factor.sum();
  return total;
}

// ---------------------------------------------------------------------------
// File formats

namespace {

json economics_to_json(const EconomicParams& e) {
  return json{{"voll_usd_per_kwh", e.voll_usd_per_kwh}, {"power_factor", e.power_factor},
              {"lambda_risk", e.lambda_risk},           {"cvar_alpha", e.cvar_alpha},
              {"v_min_pu", e.v_min_pu},                 {"v_max_pu", e.v_max_pu},
              {"surplus_weight", e.surplus_weight},     {"days_per_year", e.days_per_year}};
}

EconomicParams economics_from_json(const json& j, const std::string& source) {
  EconomicParams e;
  auto required = [&](const char* key) -> double {
    if (!j.contains(key) || !j.at(key).is_number()) {
      throw SchemaError(source + ": economics requires numeric '" + std::string(key) + "'");
    }
    return j.at(key).get<double>();
  };
  e.voll_usd_per_kwh = required("voll_usd_per_kwh");
  e.power_factor = required("power_factor");
  e.lambda_risk = required("lambda_risk");
  e.cvar_alpha = required("cvar_alpha");
  e.v_min_pu = required("v_min_pu");
  e.v_max_pu = required("v_max_pu");
  e.surplus_weight = j.value("surplus_weight", 1.0);
  e.days_per_year = j.value("days_per_year", 365.0);
  return e;
}

std::optional<double> opt_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string opt_csv(const std::optional<double>& value) {
  return value ? detail::format_double(*value) : std::string{};
}

// Builds per-day vectors from (day_id, period, value) rows.
void assign_period_values(std::vector<TypicalDay>& days, const detail::CsvTable& table, std::string_view value_column,
                          bool prices) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < days.size(); ++i) index.emplace(days[i].id, i);
  std::vector<std::vector<std::pair<long, double>>> values(days.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto it = index.find(table.text(r, "day_id"));
    if (it == index.end()) throw SchemaError(table.where(r) + ": unknown day_id '" + table.text(r, "day_id") + "'");
    values[it->second].emplace_back(table.integer(r, "period"), table.number(r, value_column));
  }
  for (std::size_t i = 0; i < days.size(); ++i) {
    auto& entries = values[i];
    std::sort(entries.begin(), entries.end());
    Eigen::VectorXd vec(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (entries[k].first != static_cast<long>(k) + 1) {
        throw SchemaError("day '" + days[i].id + "': periods must be numbered 1..|T| without gaps");
      }
      vec[static_cast<Eigen::Index>(k)] = entries[k].second;
    }
    (prices ? days[i].price_usd_per_kwh : days[i].load_factor) = std::move(vec);
  }
}

NetworkTopology load_csv_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("network directory not found: " + dir.string());

  std::vector<Node> nodes;
  {
    auto t = detail::read_csv(dir / "nodes.csv", {"id", "is_substation", "peak_demand_kw", "customers", "injection_limit_kw"});
    for (std::size_t r = 0; r < t.size(); ++r) {
      nodes.push_back(Node{t.text(r, "id"), t.boolean(r, "is_substation"), t.number(r, "peak_demand_kw"),
                           t.integer(r, "customers"), t.optional_number(r, "injection_limit_kw")});
    }
  }
  std::vector<Line> lines;
  {
    auto t = detail::read_csv(dir / "lines.csv", {"id", "from_node", "to_node", "impedance_pu_per_mile", "length_mi",
                                                  "capacity_kw", "status", "fixed_cost_usd"});
    for (std::size_t r = 0; r < t.size(); ++r) {
      lines.push_back(Line{t.text(r, "id"), t.text(r, "from_node"), t.text(r, "to_node"),
                           t.number(r, "impedance_pu_per_mile"), t.number(r, "length_mi"), t.number(r, "capacity_kw"),
                           parse_asset_status(t.text(r, "status")), t.optional_number(r, "fixed_cost_usd")});
    }
  }
  std::vector<StorageDevice> storage;
  if (fs::exists(dir / "storage.csv")) {
    auto t = detail::read_csv(dir / "storage.csv", {"id", "node", "status", "p_in_max_kw", "p_out_max_kw", "round_trip_eff",
                                                    "hours_to_full", "fixed_cost_usd", "var_cost_usd_per_kwh", "size_cap"});
    for (std::size_t r = 0; r < t.size(); ++r) {
      storage.push_back(StorageDevice{t.text(r, "id"), t.text(r, "node"), parse_asset_status(t.text(r, "status")),
                                      t.number(r, "p_in_max_kw"), t.number(r, "p_out_max_kw"),
                                      t.number(r, "round_trip_eff"), t.number(r, "hours_to_full"),
                                      t.optional_number(r, "fixed_cost_usd"),
                                      t.optional_number(r, "var_cost_usd_per_kwh"), t.optional_number(r, "size_cap")});
    }
  }
  std::vector<TypicalDay> days;
  {
    auto t = detail::read_csv(dir / "typical_days.csv", {"day_id", "weight_days", "period", "hours_per_period", "load_factor"});
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t r = 0; r < t.size(); ++r) {
      const auto& id = t.text(r, "day_id");
      if (seen.emplace(id, days.size()).second) {
        days.push_back(TypicalDay{id, t.number(r, "weight_days"), t.number(r, "hours_per_period"), {}, {}});
      } else {
        const auto& d = days[seen.at(id)];
        if (d.weight_days != t.number(r, "weight_days") || d.hours_per_period != t.number(r, "hours_per_period")) {
          throw SchemaError(t.where(r) + ": weight_days/hours_per_period must be constant within day '" + id + "'");
        }
      }
    }
    assign_period_values(days, t, "load_factor", false);
  }
  if (fs::exists(dir / "prices.csv")) {
    auto t = detail::read_csv(dir / "prices.csv", {"day_id", "period", "usd_per_kwh"});
    assign_period_values(days, t, "usd_per_kwh", true);
  }
  const auto econ_path = dir / "economics.json";
  json econ_json;
  try {
    econ_json = json::parse(detail::read_text(econ_path));
  } catch (const json::parse_error& e) {
    throw SchemaError(econ_path.string() + ": " + e.what());
  }
  return NetworkTopology::create(std::move(nodes), std::move(lines), std::move(storage), std::move(days),
                                 economics_from_json(econ_json, econ_path.string()));
}

void save_csv_dir(const NetworkTopology& t, const fs::path& dir) {
  fs::create_directories(dir);
  using detail::format_double;
  std::string out = "id,is_substation,peak_demand_kw,customers,injection_limit_kw\n";
  for (const auto& n : t.nodes()) {
    out += n.id + "," + (n.is_substation ? "1" : "0") + "," + format_double(n.peak_demand_kw) + "," +
           std::to_string(n.customers) + "," + opt_csv(n.injection_limit_kw) + "\n";
  }
  detail::write_text(dir / "nodes.csv", out);

  out = "id,from_node,to_node,impedance_pu_per_mile,length_mi,capacity_kw,status,fixed_cost_usd\n";
  for (const auto& l : t.lines()) {
    out += l.id + "," + l.from_node + "," + l.to_node + "," + format_double(l.impedance_pu_per_mile) + "," +
           format_double(l.length_mi) + "," + format_double(l.capacity_kw) + "," + std::string(to_string(l.status)) +
           "," + opt_csv(l.fixed_cost_usd) + "\n";
  }
  detail::write_text(dir / "lines.csv", out);

  out = "id,node,status,p_in_max_kw,p_out_max_kw,round_trip_eff,hours_to_full,fixed_cost_usd,var_cost_usd_per_kwh,size_cap\n";
  for (const auto& h : t.storage()) {
    out += h.id + "," + h.node + "," + std::string(to_string(h.status)) + "," + format_double(h.p_in_max_kw) + "," +
           format_double(h.p_out_max_kw) + "," + format_double(h.round_trip_eff) + "," +
           format_double(h.hours_to_full) + "," + opt_csv(h.fixed_cost_usd) + "," + opt_csv(h.var_cost_usd_per_kwh) +
           "," + opt_csv(h.size_cap) + "\n";
  }
  detail::write_text(dir / "storage.csv", out);

  out = "day_id,weight_days,period,hours_per_period,load_factor\n";
  std::string prices = "day_id,period,usd_per_kwh\n";
  bool any_price = false;
  for (const auto& d : t.days()) {
    for (Eigen::Index p = 0; p < d.load_factor.size(); ++p) {
      out += d.id + "," + format_double(d.weight_days) + "," + std::to_string(p + 1) + "," +
             format_double(d.hours_per_period) + "," + format_double(d.load_factor[p]) + "\n";
    }
    for (Eigen::Index p = 0; p < d.price_usd_per_kwh.size(); ++p) {
      any_price = true;
      prices += d.id + "," + std::to_string(p + 1) + "," + format_double(d.price_usd_per_kwh[p]) + "\n";
    }
  }
  detail::write_text(dir / "typical_days.csv", out);
  if (any_price) detail::write_text(dir / "prices.csv", prices);
  detail::write_text(dir / "economics.json", economics_to_json(t.economics()).dump(2) + "\n");
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

NetworkTopology load_json(const fs::path& path) {
  json j;
  try {
    j = json::parse(detail::read_text(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  try {
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) {
      nodes.push_back(Node{n.at("id"), n.at("is_substation"), n.at("peak_demand_kw"), n.at("customers"),
                           opt_json(n, "injection_limit_kw")});
    }
    std::vector<Line> lines;
    for (const auto& l : j.at("lines")) {
      lines.push_back(Line{l.at("id"), l.at("from_node"), l.at("to_node"), l.at("impedance_pu_per_mile"),
                           l.at("length_mi"), l.at("capacity_kw"),
                           parse_asset_status(l.at("status").get<std::string>()), opt_json(l, "fixed_cost_usd")});
    }
    std::vector<StorageDevice> storage;
    for (const auto& h : j.value("storage", json::array())) {
      storage.push_back(StorageDevice{h.at("id"), h.at("node"), parse_asset_status(h.at("status").get<std::string>()),
                                      h.at("p_in_max_kw"), h.at("p_out_max_kw"), h.at("round_trip_eff"),
                                      h.at("hours_to_full"), opt_json(h, "fixed_cost_usd"),
                                      opt_json(h, "var_cost_usd_per_kwh"), opt_json(h, "size_cap")});
    }
    std::vector<TypicalDay> days;
    for (const auto& d : j.at("typical_days")) {
      TypicalDay day{d.at("id"), d.at("weight_days"), d.at("hours_per_period"), to_eigen(d.at("load_factor")), {}};
      if (d.contains("price_usd_per_kwh")) day.price_usd_per_kwh = to_eigen(d.at("price_usd_per_kwh"));
      days.push_back(std::move(day));
    }
    return NetworkTopology::create(std::move(nodes), std::move(lines), std::move(storage), std::move(days),
                                   economics_from_json(j.at("economics"), path.string()));
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_json(const NetworkTopology& t, const fs::path& path) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["nodes"] = json::array();
  for (const auto& n : t.nodes()) {
    j["nodes"].push_back({{"id", n.id}, {"is_substation", n.is_substation}, {"peak_demand_kw", n.peak_demand_kw},
                          {"customers", n.customers}, {"injection_limit_kw", opt(n.injection_limit_kw)}});
  }
  j["lines"] = json::array();
  for (const auto& l : t.lines()) {
    j["lines"].push_back({{"id", l.id}, {"from_node", l.from_node}, {"to_node", l.to_node},
                          {"impedance_pu_per_mile", l.impedance_pu_per_mile}, {"length_mi", l.length_mi},
                          {"capacity_kw", l.capacity_kw}, {"status", to_string(l.status)},
                          {"fixed_cost_usd", opt(l.fixed_cost_usd)}});
  }
  j["storage"] = json::array();
  for (const auto& h : t.storage()) {
    j["storage"].push_back({{"id", h.id}, {"node", h.node}, {"status", to_string(h.status)},
                            {"p_in_max_kw", h.p_in_max_kw}, {"p_out_max_kw", h.p_out_max_kw},
                            {"round_trip_eff", h.round_trip_eff}, {"hours_to_full", h.hours_to_full},
                            {"fixed_cost_usd", opt(h.fixed_cost_usd)},
                            {"var_cost_usd_per_kwh", opt(h.var_cost_usd_per_kwh)}, {"size_cap", opt(h.size_cap)}});
  }
  j["typical_days"] = json::array();
  for (const auto& d : t.days()) {
    json day{{"id", d.id}, {"weight_days", d.weight_days}, {"hours_per_period", d.hours_per_period},
             {"load_factor", to_std(d.load_factor)}};
    if (d.price_usd_per_kwh.size() > 0) day["price_usd_per_kwh"] = to_std(d.price_usd_per_kwh);
    j["typical_days"].push_back(std::move(day));
  }
  j["economics"] = economics_to_json(t.economics());
  detail::write_text(path, j.dump(2) + "\n");
}

}  // namespace

NetworkTopology load_network(const fs::path& path, NetworkFormat format) {
  return format == NetworkFormat::csv_dir ? load_csv_dir(path) : load_json(path);
}

void save_network(const NetworkTopology& topology, const fs::path& path, NetworkFormat format) {
  if (format == NetworkFormat::csv_dir) save_csv_dir(topology, path);
  else save_json(topology, path);
}

}  // namespace gridplan
