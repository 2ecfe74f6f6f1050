#pragma once

// Runs an external MILP solver on an exported model. Two adapters ship:
// "cbc" (CBC command line) and "highs" (HiGHS through tools/highs_solve.py).
// GRIDPLAN_CBC and GRIDPLAN_HIGHS override the executable paths.

#include "gridplan/milp.hpp"
#include "gridplan/mps.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gridplan {

enum class SolveStatus { optimal, feasible, infeasible, unbounded, timeout, error };

std::string_view to_string(SolveStatus status);

struct SolveConfig {
  std::string solver = "highs";
  double relative_gap = 1e-9;
  double time_limit_s = 3600.0;
  int threads = 1;
  int seed = 0;
  // Free format keeps full names and 17 significant digits.
  MpsFormat format = MpsFormat::free;
  // Scratch directory; a fresh temporary directory when empty.
  std::filesystem::path work_dir;
  bool keep_files = false;

  // Throws ValidationError on a negative gap, non-positive time limit or unknown solver.
  void validate() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::error;
  double objective = 0.0;
  double gap = 0.0;
  std::vector<double> values;  // aligned with the model's variables; empty unless optimal/feasible
  double wall_time_s = 0.0;
  std::string solver;
  std::string instance_hash;  // git-style blob hash of the exported model text
  std::string raw_output;

  bool has_solution() const noexcept {
    return status == SolveStatus::optimal || status == SolveStatus::feasible;
  }
  double value(const Model& model, std::string_view name) const;
  double value(VarId var) const { return values.at(var.index); }
  std::map<std::string, double> by_name(const Model& model) const;
};

// Solver output for one exported file, keyed by exported column name.
struct RawSolution {
  SolveStatus status = SolveStatus::error;
  double objective = 0.0;
  double gap = 0.0;
  double wall_time_s = -1.0;  // negative when the adapter does not time jobs itself
  std::map<std::string, double> values;
  std::string raw_output;
};

class SolverAdapter {
public:
  virtual ~SolverAdapter() = default;
  virtual std::string name() const = 0;
  virtual std::string version() const = 0;
  // Solves each (model file, row count) job; result order follows `models`.
  virtual std::vector<RawSolution> run(std::span<const std::filesystem::path> models,
                                       std::span<const std::size_t> row_counts, const SolveConfig& config,
                                       const std::filesystem::path& work_dir) const = 0;
};

std::unique_ptr<SolverAdapter> make_adapter(const std::string& solver);
std::vector<std::string> available_solvers();

// Parsers for the adapters' solution files, exposed for testing.
RawSolution parse_cbc_solution(const std::string& text, std::size_t rows);
RawSolution parse_highs_solution(const std::string& text);

// Integral rounding of binaries within 1e-6; farther values raise ValidationError.
void round_binaries(const Model& model, std::vector<double>& values);

SolveResult solve(const Model& model, const SolveConfig& config = {});
// One subprocess for the whole batch where the adapter supports it.
std::vector<SolveResult> solve_batch(std::span<const Model* const> models, const SolveConfig& config = {});

}  // namespace gridplan
