#include "gridplan/error.hpp"
#include "gridplan/solver.hpp"

#include <doctest.h>

#include <filesystem>

using namespace gridplan;
namespace fs = std::filesystem;

namespace {

// max 5a + 4b + 3c  s.t.  2a + 3b + c <= 5, binaries: optimum a = b = 1, value 9.
Model knapsack() {
  Model m("knapsack");
  const auto a = m.add_variable("a", VarKind::binary);
  const auto b = m.add_variable("b", VarKind::binary);
  const auto c = m.add_variable("c", VarKind::binary);
  m.set_objective({{a, -5.0}, {b, -4.0}, {c, -3.0}});
  m.add_constraint("weight", {{a, 2.0}, {b, 3.0}, {c, 1.0}}, Sense::less_equal, 5.0);
  return m;
}

// min x + y  s.t.  x + 2y >= 3, x - y = 0.25 (LP optimum x = 7/6, y = 11/12).
Model small_lp() {
  Model m("lp");
  const auto x = m.add_variable("x", VarKind::continuous);
  const auto y = m.add_variable("y", VarKind::continuous);
  m.set_objective({{x, 1.0}, {y, 1.0}});
  m.add_constraint("cover", {{x, 1.0}, {y, 2.0}}, Sense::greater_equal, 3.0);
  m.add_constraint("diff", {{x, 1.0}, {y, -1.0}}, Sense::equal, 0.25);
  return m;
}

std::vector<std::string> solvers() { return {"highs", "cbc"}; }

}  // namespace

TEST_CASE("both solvers find the knapsack optimum") {
  for (const auto& name : solvers()) {
    for (const auto format : {MpsFormat::fixed, MpsFormat::free}) {
      SolveConfig c;
      c.solver = name;
      c.format = format;
      const auto m = knapsack();
      const auto r = solve(m, c);
      CAPTURE(name);
      REQUIRE(r.status == SolveStatus::optimal);
      CHECK(r.objective == doctest::Approx(-9.0));
      CHECK(r.value(m, "a") == 1.0);
      CHECK(r.value(m, "b") == 1.0);
      CHECK(r.value(m, "c") == 0.0);
      CHECK(r.solver == name);
      CHECK(r.instance_hash.size() == 40);
      CHECK(r.by_name(m).size() == 3);
    }
  }
}

TEST_CASE("linear programs solve to the vertex") {
  for (const auto& name : solvers()) {
    SolveConfig c;
    c.solver = name;
    const auto m = small_lp();
    // CBC prints solution values with eight significant digits.
    const double tol = name == "cbc" ? 1e-7 : 1e-12;
    const auto r = solve(m, c);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.value(m, "x") == doctest::Approx(7.0 / 6.0).epsilon(tol));
    CHECK(r.value(m, "y") == doctest::Approx(11.0 / 12.0).epsilon(tol));
    CHECK(m.max_violation(r.values) <= std::max(tol, 1e-9));
  }
}

TEST_CASE("infeasible and unbounded models report no solution") {
  Model inf("infeasible");
  const auto x = inf.add_variable("x", VarKind::continuous, 0.0, 1.0);
  inf.add_constraint("lo", {{x, 1.0}}, Sense::greater_equal, 2.0);
  Model unb("unbounded");
  const auto y = unb.add_variable("y", VarKind::continuous, -kInfinity, kInfinity);
  const auto z = unb.add_variable("z", VarKind::binary);
  unb.set_objective({{y, -1.0}});
  unb.add_constraint("r", {{y, 1.0}, {z, -1.0}}, Sense::greater_equal, 0.0);
  for (const auto& name : solvers()) {
    SolveConfig c;
    c.solver = name;
    const auto a = solve(inf, c);
    CHECK(a.status == SolveStatus::infeasible);
    CHECK(!a.has_solution());
    CHECK(a.values.empty());
    const auto b = solve(unb, c);
    CHECK(!b.has_solution());
    CHECK((b.status == SolveStatus::unbounded || b.status == SolveStatus::infeasible));
  }
}

TEST_CASE("batches keep their order") {
  const auto k = knapsack();
  const auto l = small_lp();
  std::vector<const Model*> models{&k, &l, &k};
  for (const auto& name : solvers()) {
    SolveConfig c;
    c.solver = name;
    const auto r = solve_batch(models, c);
    REQUIRE(r.size() == 3);
    CHECK(r[0].objective == doctest::Approx(-9.0));
    CHECK(r[1].objective == doctest::Approx(7.0 / 6.0 + 11.0 / 12.0));
    CHECK(r[2].objective == doctest::Approx(-9.0));
    CHECK(r[0].instance_hash == r[2].instance_hash);
  }
}

TEST_CASE("kept work files") {
  const auto dir = fs::temp_directory_path() / "gridplan_unit_solver";
  fs::remove_all(dir);
  SolveConfig c;
  c.work_dir = dir;
  c.keep_files = true;
  (void)solve(knapsack(), c);
  CHECK(fs::exists(dir));
  CHECK(!fs::is_empty(dir));
  fs::remove_all(dir);
}

TEST_CASE("configuration is validated") {
  SolveConfig c;
  CHECK_NOTHROW(c.validate());
  c.solver = "gurobi";
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.relative_gap = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.time_limit_s = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_THROWS(make_adapter("gurobi"));
  const auto names = available_solvers();
  CHECK(std::find(names.begin(), names.end(), "highs") != names.end());
  CHECK(std::find(names.begin(), names.end(), "cbc") != names.end());
}

TEST_CASE("solution file parsers") {
  const auto cbc = parse_cbc_solution(
      "Optimal - objective value -9.00000000\n"
      "      0 weight                 5                       0\n"
      "      0 a                      1                      -5\n"
      "      1 b                      1                      -4\n"
      "      2 c                      0                      -3\n",
      1);
  CHECK(cbc.status == SolveStatus::optimal);
  CHECK(cbc.objective == -9.0);
  CHECK(cbc.values.at("b") == 1.0);
  CHECK(cbc.values.size() == 3);
  CHECK(parse_cbc_solution("Infeasible - objective value 0.0\n", 0).status == SolveStatus::infeasible);
  CHECK_THROWS_AS(parse_cbc_solution("garbage\n", 0), SolverError);

  const auto highs = parse_highs_solution(
      "status optimal\nwall_time 0.01\nobjective -9.0\nmip_gap 0.0\ncolumns 2\na 1.0\nb 0.5\n");
  CHECK(highs.status == SolveStatus::optimal);
  CHECK(highs.values.at("b") == 0.5);
  CHECK(parse_highs_solution("status infeasible\ncolumns 0\n").status == SolveStatus::infeasible);
  CHECK_THROWS_AS(parse_highs_solution("state ok\n"), SolverError);
}

TEST_CASE("binary rounding") {
  const auto m = knapsack();
  std::vector<double> v{1.0 - 1e-8, 3e-7, 0.0};
  round_binaries(m, v);
  CHECK(v == std::vector<double>{1.0, 0.0, 0.0});
  std::vector<double> bad{0.5, 0.0, 0.0};
  CHECK_THROWS_AS(round_binaries(m, bad), ValidationError);
}

TEST_CASE("a missing solver binary is a solver error") {
  ::setenv("GRIDPLAN_CBC", "/nonexistent/cbc", 1);
  SolveConfig c;
  c.solver = "cbc";
  CHECK_THROWS_AS(solve(knapsack(), c), SolverError);
  ::unsetenv("GRIDPLAN_CBC");
}
