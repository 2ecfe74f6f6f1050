#include "gridplan/milp.hpp"

#include "gridplan/error.hpp"

#include <algorithm>
#include <cmath>

namespace gridplan {

std::string index_name(std::string_view family, std::initializer_list<std::string_view> indices) {
  std::string out(family);
  out += '(';
  bool first = true;
  for (const auto& i : indices) {
    if (!first) out += ',';
    out += i;
    first = false;
  }
  out += ')';
  return out;
}

std::string index_name(std::string_view family, const std::vector<std::string>& indices) {
  std::string out(family);
  out += '(';
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ',';
    out += indices[i];
  }
  out += ')';
  return out;
}

VarId Model::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (kind == VarKind::binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (lower > upper) throw ValidationError("variable '" + name + "': lower bound above upper bound");
  const auto [it, inserted] = variable_names_.emplace(name, variables_.size());
  if (!inserted) throw ValidationError("duplicate variable name '" + name + "'");
  variables_.push_back(Variable{std::move(name), kind, lower, upper});
  objective_.push_back(0.0);
  return VarId{variables_.size() - 1};
}

std::vector<Term> Model::canonical(const LinearExpr& expr) const {
  std::vector<Term> terms = expr.terms();
  for (const auto& t : terms) {
    if (t.var.index >= variables_.size()) {
      throw ValidationError("constraint references unknown variable index " + std::to_string(t.var.index));
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var.index < b.var.index; });
  std::vector<Term> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().var == t.var) out.back().coef += t.coef;
    else out.push_back(t);
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

RowId Model::add_constraint(std::string name, const LinearExpr& expr, Sense sense, double rhs) {
  auto terms = canonical(expr);
  const auto [it, inserted] = constraint_names_.emplace(name, constraints_.size());
  if (!inserted) throw ValidationError("duplicate constraint name '" + name + "'");
  constraints_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
  return RowId{constraints_.size() - 1};
}

void Model::set_objective(const LinearExpr& expr) {
  std::fill(objective_.begin(), objective_.end(), 0.0);
  for (const auto& t : canonical(expr)) objective_[t.var.index] = t.coef;
}

void Model::add_objective(VarId var, double coef) { objective_.at(var.index) += coef; }

void Model::set_bounds(VarId var, double lower, double upper) {
  auto& v = variables_.at(var.index);
  if (lower > upper) throw ValidationError("variable '" + v.name + "': lower bound above upper bound");
  if (v.kind == VarKind::binary && (lower < 0.0 || upper > 1.0)) {
    throw ValidationError("variable '" + v.name + "': binary bounds must stay within [0,1]");
  }
  v.lower = lower;
  v.upper = upper;
}

std::optional<VarId> Model::find_variable(std::string_view name) const {
  const auto it = variable_names_.find(std::string(name));
  if (it == variable_names_.end()) return std::nullopt;
  return VarId{it->second};
}

std::optional<RowId> Model::find_constraint(std::string_view name) const {
  const auto it = constraint_names_.find(std::string(name));
  if (it == constraint_names_.end()) return std::nullopt;
  return RowId{it->second};
}

std::size_t Model::num_nonzeros() const noexcept {
  std::size_t n = 0;
  for (const auto& c : constraints_) n += c.terms.size();
  return n;
}

std::size_t Model::num_binaries() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) { return v.kind == VarKind::binary; }));
}

Eigen::SparseMatrix<double, Eigen::RowMajor> Model::coefficient_matrix() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(num_nonzeros());
  for (std::size_t r = 0; r < constraints_.size(); ++r) {
    for (const auto& t : constraints_[r].terms) {
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(t.var.index), t.coef);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(static_cast<Eigen::Index>(constraints_.size()),
                                                 static_cast<Eigen::Index>(variables_.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

double Model::objective_value(std::span<const double> values) const {
  double total = 0.0;
  for (std::size_t i = 0; i < objective_.size(); ++i) total += objective_[i] * values[i];
  return total;
}

double Model::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    worst = std::max({worst, variables_[i].lower - values[i], values[i] - variables_[i].upper});
  }
  for (const auto& c : constraints_) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * values[t.var.index];
    switch (c.sense) {
      case Sense::less_equal: worst = std::max(worst, lhs - c.rhs); break;
      case Sense::greater_equal: worst = std::max(worst, c.rhs - lhs); break;
      case Sense::equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

}  // namespace gridplan
