#include "gridplan/soc_profiles.hpp"

#include "csv.hpp"
#include "gridplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace gridplan {

SocProfile::SocProfile(std::vector<std::string> storage_ids, std::vector<std::string> day_ids,
                       std::vector<Eigen::MatrixXd> fractions)
    : storage_ids_(std::move(storage_ids)), day_ids_(std::move(day_ids)), fractions_(std::move(fractions)) {
  std::vector<std::string> violations;
  if (storage_ids_.size() != fractions_.size()) violations.push_back("one profile matrix per storage device required");
  for (std::size_t h = 0; h < fractions_.size(); ++h) {
    const auto& f = fractions_[h];
    if (static_cast<std::size_t>(f.cols()) != day_ids_.size()) {
      violations.push_back("profile of '" + storage_ids_[h] + "' has the wrong number of days");
    }
    if (f.size() > 0 && f.rows() != fractions_.front().rows()) {
      violations.push_back("profile of '" + storage_ids_[h] + "' has the wrong number of periods");
    }
    if (!(f.array() >= 0.0).all() || !(f.array() <= 1.0).all()) {
      violations.push_back("profile of '" + storage_ids_[h] + "' leaves [0,1]");
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

void SocProfile::check_covers(const NetworkTopology& topology) const {
  std::vector<std::string> violations;
  if (storage_ids_.size() != topology.storage().size()) {
    violations.push_back("SOC profiles cover " + std::to_string(storage_ids_.size()) + " devices, network has " +
                         std::to_string(topology.storage().size()));
  } else {
    for (std::size_t h = 0; h < storage_ids_.size(); ++h) {
      if (storage_ids_[h] != topology.storage()[h].id) {
        violations.push_back("SOC profile " + std::to_string(h) + " is for '" + storage_ids_[h] + "', expected '" +
                             topology.storage()[h].id + "'");
      } else if (static_cast<std::size_t>(fractions_[h].rows()) != topology.periods()) {
        violations.push_back("SOC profile of '" + storage_ids_[h] + "' has the wrong number of periods");
      }
    }
  }
  if (day_ids_.size() != topology.days().size()) {
    violations.push_back("SOC profiles cover the wrong number of typical days");
  } else {
    for (std::size_t d = 0; d < day_ids_.size(); ++d) {
      if (day_ids_[d] != topology.days()[d].id) violations.push_back("SOC profile day '" + day_ids_[d] + "' out of order");
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

bool SocProfile::operator==(const SocProfile& other) const {
  if (storage_ids_ != other.storage_ids_ || day_ids_ != other.day_ids_ || fractions_.size() != other.fractions_.size()) {
    return false;
  }
  for (std::size_t h = 0; h < fractions_.size(); ++h) {
    if (fractions_[h].rows() != other.fractions_[h].rows() || fractions_[h].cols() != other.fractions_[h].cols() ||
        fractions_[h] != other.fractions_[h]) {
      return false;
    }
  }
  return true;
}

namespace {

struct ArbitrageModel {
  Model model{"arbitrage"};
  VarId initial;
  std::vector<VarId> soc, charge, discharge;
  LinearExpr profit, throughput;
};

std::unique_ptr<ArbitrageModel> arbitrage_model(const StorageDevice& device, const Eigen::VectorXd& prices,
                                                double delta) {
  auto a = std::make_unique<ArbitrageModel>();
  auto& m = a->model;
  const double charge_max = 1.0 / device.hours_to_full;
  const double discharge_max = device.p_out_max_kw / (device.hours_to_full * device.p_in_max_kw);
  const double eta = device.round_trip_eff;
  const auto periods = static_cast<std::size_t>(prices.size());

  a->initial = m.add_variable("soc0", VarKind::continuous, 0.0, 1.0);
  for (std::size_t t = 0; t < periods; ++t) {
    const auto k = std::to_string(t + 1);
    a->soc.push_back(m.add_variable(index_name("soc", {k}), VarKind::continuous, 0.0, 1.0));
    a->charge.push_back(m.add_variable(index_name("pin", {k}), VarKind::continuous, 0.0, charge_max));
    a->discharge.push_back(m.add_variable(index_name("pout", {k}), VarKind::continuous, 0.0, discharge_max));
  }
  for (std::size_t t = 0; t < periods; ++t) {
    LinearExpr e;
    e.add(a->soc[t], 1.0).add(t == 0 ? a->initial : a->soc[t - 1], -1.0);
    e.add(a->charge[t], -eta * delta).add(a->discharge[t], delta);
    m.add_constraint(index_name("dyn", {std::to_string(t + 1)}), e, Sense::equal, 0.0);
    a->profit.add(a->discharge[t], delta * prices[static_cast<Eigen::Index>(t)]);
    a->profit.add(a->charge[t], -delta * prices[static_cast<Eigen::Index>(t)]);
    a->throughput.add(a->charge[t], 1.0).add(a->discharge[t], 1.0);
  }
  if (periods > 0) m.add_constraint("periodic", {{a->soc.back(), 1.0}, {a->initial, -1.0}}, Sense::equal, 0.0);
  return a;
}

double slack(double value) { return 1e-9 * std::max(1.0, std::abs(value)); }

std::vector<SolveResult> solve_all(const std::vector<std::unique_ptr<ArbitrageModel>>& models, const SolveConfig& solver) {
  std::vector<const Model*> pointers;
  for (const auto& a : models) pointers.push_back(&a->model);
  auto results = solve_batch(pointers, solver);
  for (const auto& r : results) {
    if (r.status != SolveStatus::optimal) {
      throw Error("arbitrage LP ended with status '" + std::string(to_string(r.status)) +
                  "'; the idle schedule is always feasible, so this is an internal error");
    }
  }
  return results;
}

std::vector<ArbitrageSchedule> solve_lexicographic(std::vector<std::unique_ptr<ArbitrageModel>> models,
                                                   const SolveConfig& solver, const ArbitrageOptions& options) {
  for (auto& a : models) {
    LinearExpr neg;
    for (const auto& t : a->profit.terms()) neg.add(t.var, -t.coef);
    a->model.set_objective(neg);
  }
  const auto first = solve_all(models, solver);
  for (std::size_t i = 0; i < models.size(); ++i) {
    auto& a = *models[i];
    const double best = -first[i].objective;
    a.model.add_constraint("best_profit", a.profit, Sense::greater_equal, best - slack(best));
    a.model.set_objective(a.throughput);
  }
  const auto second = solve_all(models, solver);
  for (std::size_t i = 0; i < models.size(); ++i) {
    auto& a = *models[i];
    const double least = second[i].objective;
    a.model.add_constraint("least_throughput", a.throughput, Sense::less_equal, least + slack(least));
    const auto gap = a.model.add_variable("idle_gap", VarKind::continuous, 0.0, kInfinity);
    a.model.add_constraint("idle_above", {{gap, 1.0}, {a.initial, -1.0}}, Sense::greater_equal, -options.idle_soc);
    a.model.add_constraint("idle_below", {{gap, 1.0}, {a.initial, 1.0}}, Sense::greater_equal, options.idle_soc);
    a.model.set_objective({{gap, 1.0}});
  }
  const auto third = solve_all(models, solver);

  std::vector<ArbitrageSchedule> out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& a = *models[i];
    const auto& v = third[i];
    const auto periods = static_cast<Eigen::Index>(a.soc.size());
    ArbitrageSchedule s;
    s.soc.resize(periods);
    s.charge.resize(periods);
    s.discharge.resize(periods);
    auto unit = [](double x) { return std::clamp(x, 0.0, 1.0); };
    for (Eigen::Index t = 0; t < periods; ++t) {
      const auto k = static_cast<std::size_t>(t);
      s.soc[t] = unit(v.value(a.soc[k]));
      s.charge[t] = std::max(0.0, v.value(a.charge[k]));
      s.discharge[t] = std::max(0.0, v.value(a.discharge[k]));
    }
    s.initial_soc = unit(v.value(a.initial));
    double profit = 0.0;
    for (const auto& t : a.profit.terms()) profit += t.coef * v.value(t.var);
    s.profit = profit;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

ArbitrageSchedule solve_arbitrage(const StorageDevice& device, const Eigen::VectorXd& prices, double hours_per_period,
                                  const SolveConfig& solver, const ArbitrageOptions& options) {
  std::vector<std::unique_ptr<ArbitrageModel>> models;
  models.push_back(arbitrage_model(device, prices, hours_per_period));
  return std::move(solve_lexicographic(std::move(models), solver, options).front());
}

SocProfile compute_profiles(const NetworkTopology& topology, const SolveConfig& solver,
                            const ArbitrageOptions& options) {
  std::vector<std::string> missing;
  for (const auto& d : topology.days()) {
    if (static_cast<std::size_t>(d.price_usd_per_kwh.size()) != topology.periods()) {
      missing.push_back("typical day '" + d.id + "' has no price curve");
    }
  }
  if (!missing.empty()) throw ValidationError(std::move(missing));

  const auto& storage = topology.storage();
  const auto& days = topology.days();
  std::vector<std::unique_ptr<ArbitrageModel>> models;
  for (const auto& device : storage) {
    for (const auto& day : days) models.push_back(arbitrage_model(device, day.price_usd_per_kwh, day.hours_per_period));
  }
  std::vector<ArbitrageSchedule> schedules;
  if (!models.empty()) schedules = solve_lexicographic(std::move(models), solver, options);

  std::vector<Eigen::MatrixXd> fractions;
  const auto periods = static_cast<Eigen::Index>(topology.periods());
  for (std::size_t h = 0; h < storage.size(); ++h) {
    Eigen::MatrixXd f(periods, static_cast<Eigen::Index>(days.size()));
    for (std::size_t d = 0; d < days.size(); ++d) f.col(static_cast<Eigen::Index>(d)) = schedules[h * days.size() + d].soc;
    fractions.push_back(std::move(f));
  }
  return set_profiles(topology, std::move(fractions));
}

SocProfile set_profiles(const NetworkTopology& topology, std::vector<Eigen::MatrixXd> fractions) {
  std::vector<std::string> storage_ids, day_ids;
  for (const auto& s : topology.storage()) storage_ids.push_back(s.id);
  for (const auto& d : topology.days()) day_ids.push_back(d.id);
  SocProfile profile(std::move(storage_ids), std::move(day_ids), std::move(fractions));
  profile.check_covers(topology);
  return profile;
}

SocProfile constant_profiles(const NetworkTopology& topology, double fraction) {
  std::vector<Eigen::MatrixXd> fractions(
      topology.storage().size(),
      Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(topology.periods()),
                                static_cast<Eigen::Index>(topology.days().size()), fraction));
  return set_profiles(topology, std::move(fractions));
}

void save_profiles(const SocProfile& profile, const std::filesystem::path& csv) {
  std::string out = "storage_id,day_id,period,fraction\n";
  for (std::size_t h = 0; h < profile.devices(); ++h) {
    const auto& f = profile.device(h);
    for (Eigen::Index d = 0; d < f.cols(); ++d) {
      for (Eigen::Index t = 0; t < f.rows(); ++t) {
        out += profile.storage_ids()[h] + ',' + profile.day_ids()[static_cast<std::size_t>(d)] + ',' +
               std::to_string(t + 1) + ',' + detail::format_double(f(t, d)) + '\n';
      }
    }
  }
  detail::write_text(csv, out);
}

SocProfile load_profiles(const std::filesystem::path& csv, const NetworkTopology& topology) {
  const auto table = detail::read_csv(csv, {"storage_id", "day_id", "period", "fraction"});
  const auto periods = static_cast<Eigen::Index>(topology.periods());
  const auto days = static_cast<Eigen::Index>(topology.days().size());
  std::vector<Eigen::MatrixXd> fractions(topology.storage().size(), Eigen::MatrixXd::Constant(periods, days, -1.0));
  std::vector<std::string> violations;
  for (std::size_t r = 0; r < table.size(); ++r) {
    try {
      const auto h = topology.storage_index(table.text(r, "storage_id"));
      const auto d = static_cast<Eigen::Index>(topology.day_index(table.text(r, "day_id")));
      const long t = table.integer(r, "period");
      if (t < 1 || t > periods) {
        violations.push_back(table.where(r) + ": period out of range");
        continue;
      }
      const double v = table.number(r, "fraction");
      if (!(v >= 0.0 && v <= 1.0)) violations.push_back(table.where(r) + ": fraction must lie in [0,1]");
      fractions[h](t - 1, d) = v;
    } catch (const ValidationError& e) {
      violations.push_back(table.where(r) + ": " + e.violations().front());
    }
  }
  for (std::size_t h = 0; h < fractions.size(); ++h) {
    if ((fractions[h].array() < 0.0).any()) {
      violations.push_back(csv.string() + ": missing entries for storage '" + topology.storage()[h].id + "'");
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return set_profiles(topology, std::move(fractions));
}

}  // namespace gridplan
