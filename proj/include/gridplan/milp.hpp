#pragma once

// Solver-agnostic mixed-integer linear model: named columns with bounds,
// named rows, a linear objective (always minimised).

#include <Eigen/SparseCore>

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gridplan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VarId {
  std::size_t index = 0;
  bool operator==(const VarId&) const = default;
};

struct RowId {
  std::size_t index = 0;
  bool operator==(const RowId&) const = default;
};

enum class VarKind { continuous, binary };
enum class Sense { less_equal, equal, greater_equal };

struct Term {
  VarId var;
  double coef = 0.0;
};

// Accumulates terms; duplicates are merged when the expression is added to a model.
class LinearExpr {
public:
  LinearExpr() = default;
  LinearExpr(std::initializer_list<Term> terms) : terms_(terms) {}

  LinearExpr& add(VarId var, double coef) {
    terms_.push_back(Term{var, coef});
    return *this;
  }
  LinearExpr& operator+=(const LinearExpr& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
  }

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

private:
  std::vector<Term> terms_;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // canonical: one term per variable, ascending index, no zeros
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
};

struct ModelSize {
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::size_t binaries = 0;

  bool operator==(const ModelSize&) const = default;
};

// "family(i1,i2,...)" structured names.
std::string index_name(std::string_view family, std::initializer_list<std::string_view> indices);
std::string index_name(std::string_view family, const std::vector<std::string>& indices);

class Model {
public:
  explicit Model(std::string formulation = "model") : formulation_(std::move(formulation)) {}

  // Throws ValidationError on a duplicate name or inverted bounds.
  VarId add_variable(std::string name, VarKind kind, double lower = 0.0, double upper = kInfinity);
  RowId add_constraint(std::string name, const LinearExpr& expr, Sense sense, double rhs);

  void set_objective(const LinearExpr& expr);
  void add_objective(VarId var, double coef);

  void set_bounds(VarId var, double lower, double upper);
  void fix(VarId var, double value) { set_bounds(var, value, value); }

  std::optional<VarId> find_variable(std::string_view name) const;
  std::optional<RowId> find_constraint(std::string_view name) const;

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  const std::vector<double>& objective() const noexcept { return objective_; }
  const Variable& variable(VarId id) const { return variables_.at(id.index); }

  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_constraints() const noexcept { return constraints_.size(); }
  std::size_t num_nonzeros() const noexcept;
  std::size_t num_binaries() const noexcept;
  ModelSize size() const noexcept { return {num_variables(), num_constraints(), num_binaries()}; }

  const std::string& formulation() const noexcept { return formulation_; }

  Eigen::SparseMatrix<double, Eigen::RowMajor> coefficient_matrix() const;
  double objective_value(std::span<const double> values) const;
  // Largest violation of any row or bound under `values`.
  double max_violation(std::span<const double> values) const;

private:
  std::vector<Term> canonical(const LinearExpr& expr) const;

  std::string formulation_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
  std::unordered_map<std::string, std::size_t> variable_names_;
  std::unordered_map<std::string, std::size_t> constraint_names_;
};

}  // namespace gridplan
