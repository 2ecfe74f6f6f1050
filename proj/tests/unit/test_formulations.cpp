#include "fixtures.hpp"
#include "oracles.hpp"

#include "gridplan/error.hpp"
#include "gridplan/full_formulation.hpp"
#include "gridplan/scalable_formulation.hpp"

#include <doctest.h>

using namespace gridplan;

namespace {

// One failure of L1 on the two-node feeder, four 6-hour periods.
ScenarioSet pair_scenarios(int duration) {
  return ScenarioSet({{"cut", FailureState{{0}}, duration, OutageClass::routine, 0.01}});
}

ScalableInstance pair_instance(int duration, double lambda) {
  const auto t = fixtures::with_economics(fixtures::radial_pair(4), 5.0, lambda, 0.9);
  return make_scalable_instance(t, pair_scenarios(duration), constant_profiles(t, 0.0));
}

PlanDecision solve_scalable(const ScalableInstance& in) {
  const auto m = build_scalable_model(in);
  const auto r = solve(m.model, {});
  REQUIRE(r.status == SolveStatus::optimal);
  return decode_scalable(m, in, r);
}

}  // namespace

TEST_CASE("hand-computed loss on the two-node feeder") {
  // A window of k periods after the start covers k + 1 periods, cut at the end
  // of the day. 10 kW over 6-hour periods: 60 kWh per covered period.
  const auto one = evaluate_plan(pair_instance(1, 0.0), {});
  CHECK(one.loss_kwh[1](0, 0) == doctest::Approx(120.0));
  CHECK(one.loss_kwh[1](3, 0) == doctest::Approx(60.0));
  CHECK(one.expected_usd == doctest::Approx(365.0 * 0.01 * 0.9 * 5.0 * (3.0 * 120.0 + 60.0)));
  // Tail mass 0.1 holds the 0.01 atom: CVaR is a tenth of the slot loss.
  CHECK(one.cvar_usd == doctest::Approx(365.0 * 0.9 * 5.0 * 0.1 * (3.0 * 120.0 + 60.0)));
  const auto two = evaluate_plan(pair_instance(2, 0.0), {});
  CHECK(two.loss_kwh[1](0, 0) == doctest::Approx(180.0));
  CHECK(two.loss_kwh[1](2, 0) == doctest::Approx(120.0));
  CHECK(two.expected_usd == doctest::Approx(365.0 * 0.01 * 0.9 * 5.0 * (2.0 * 180.0 + 120.0 + 60.0)));
}

TEST_CASE("the scalable model prices the hand example") {
  for (const double lambda : {0.0, 0.4, 1.0}) {
    const auto in = pair_instance(2, lambda);
    const auto d = solve_scalable(in);
    const auto e = evaluate_plan(in, {});
    CHECK(d.plan == InvestmentPlan{});
    CHECK(d.raw_objective == doctest::Approx(e.weighted_usd()).epsilon(1e-9));
    CHECK(d.costs.objective_usd() == doctest::Approx(d.raw_objective).epsilon(1e-9));
  }
}

TEST_CASE("the full model prices the hand example") {
  for (const double lambda : {0.0, 1.0}) {
    const auto in = pair_instance(2, lambda);
    const auto full = make_full_instance(in.topology, expand_start_slots(in.scenarios, 4));
    const auto m = build_full_model(full);
    const auto r = solve(m.model, {});
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.objective == doctest::Approx(evaluate_plan(in, {}).weighted_usd()).epsilon(1e-7));
    const auto d = decode_full(m, full, r, {});
    CHECK(d.costs.expected_loss_usd == doctest::Approx(evaluate_plan(in, {}).expected_usd).epsilon(1e-7));
  }
}

TEST_CASE("scalable optimum matches enumeration") {
  for (const std::uint64_t seed : {3U, 4U}) {
    fixtures::FeederSpec spec;
    spec.nodes = 7;
    const auto t = fixtures::with_economics(fixtures::random_feeder(spec, seed), 5.0, 0.5, 0.9);
    const auto scen = fixtures::random_scenarios(t, {}, seed + 10);
    const auto prof = fixtures::random_profiles(t, seed + 20);
    const auto d = solve_scalable(make_scalable_instance(t, scen, prof));
    const auto best = oracle::enumerate_scalable(t, scen, prof);
    CHECK(d.raw_objective == doctest::Approx(best.objective).epsilon(1e-7));
    CHECK(oracle::plan_cost(t, scen, prof, d.plan) == doctest::Approx(best.objective).epsilon(1e-7));
  }
}

TEST_CASE("closed-form sizes match the built models") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    fixtures::FeederSpec spec;
    spec.nodes = 5 + seed;
    spec.substations = 1 + seed % 2;
    spec.candidate_lines = seed % 4;
    spec.existing_storage = seed % 2;
    spec.candidate_storage = seed % 3;
    const auto t = fixtures::random_feeder(spec, seed);
    const auto scen = fixtures::random_scenarios(t, {}, seed);
    const auto in = make_scalable_instance(t, scen, fixtures::random_profiles(t, seed));
    const auto sm = build_scalable_model(in).model;
    CHECK(scalable_model_size(in) == sm.size());
    const auto full = make_full_instance(t, expand_start_slots(scen, t.periods()));
    const auto fm = build_full_model(full).model;
    CHECK(full_model_size(full) == fm.size());
  }
}

TEST_CASE("start-slot expansion") {
  const ScenarioSet set({{"a", FailureState{{0}}, 2, OutageClass::routine, 0.01},
                         {"b", FailureState{{0, 1}}, 1, OutageClass::resilience, 0.02}});
  const auto slots = expand_start_slots(set, 4);
  REQUIRE(slots.size() == 9);
  CHECK(slots[0].failed_lines.empty());
  double total = 0.0;
  for (const auto& s : slots) total += s.probability;
  CHECK(total == doctest::Approx(1.0));
  CHECK(slots[1].first_period == 0);
  CHECK(slots[1].last_period == 2);
  CHECK(slots[4].first_period == 3);
  CHECK(slots[4].last_period == 3);
  CHECK(slots[5].failed_lines == std::vector<std::size_t>{0, 1});
  CHECK(slots[1].available(0, 3));
  CHECK(!slots[1].available(0, 2));
  CHECK(slots[1].available(1, 1));
  const ScenarioSet heavy({{"a", FailureState{{0}}, 1, OutageClass::routine, 0.3}});
  CHECK_THROWS_AS(expand_start_slots(heavy, 4), ValidationError);
}

TEST_CASE("full instances are validated") {
  const auto t = fixtures::random_feeder({}, 7);
  const auto good = expand_start_slots(fixtures::random_scenarios(t, {}, 8), t.periods());
  CHECK_NOTHROW(make_full_instance(t, good));
  auto failed_base = good;
  failed_base[0].failed_lines = {t.existing_lines()[0]};
  CHECK_THROWS_AS(make_full_instance(t, failed_base), ValidationError);
  auto mass = good;
  mass[0].probability += 0.1;
  CHECK_THROWS_AS(make_full_instance(t, mass), ValidationError);
  auto candidate = good;
  candidate[1].failed_lines = {t.candidate_lines()[0]};
  CHECK_THROWS_AS(make_full_instance(t, candidate), ValidationError);
  auto late = good;
  late[1].last_period = t.periods();
  CHECK_THROWS_AS(make_full_instance(t, late), ValidationError);
  FullOptions tight;
  tight.max_scenario_slots = 10;
  CHECK_THROWS_AS(make_full_instance(t, good, tight), ValidationError);
}

TEST_CASE("without risk weight the CVaR level does not matter") {
  fixtures::FeederSpec spec;
  spec.nodes = 7;
  const auto base = fixtures::random_feeder(spec, 9);
  const auto scen = fixtures::random_scenarios(base, {}, 19);
  const auto prof = fixtures::random_profiles(base, 29);
  const auto a = solve_scalable(make_scalable_instance(fixtures::with_economics(base, 5.0, 0.0, 0.5), scen, prof));
  const auto b = solve_scalable(make_scalable_instance(fixtures::with_economics(base, 5.0, 0.0, 0.99), scen, prof));
  CHECK(a.raw_objective == doctest::Approx(b.raw_objective).epsilon(1e-9));
  CHECK(a.costs.expected_loss_usd == doctest::Approx(b.costs.expected_loss_usd).epsilon(1e-9));
}

TEST_CASE("mismatched profiles are rejected") {
  fixtures::FeederSpec spec;
  spec.candidate_storage = 2;
  const auto t = fixtures::random_feeder(spec, 11);
  const auto other = fixtures::random_feeder({}, 12);
  CHECK_THROWS_AS(make_scalable_instance(t, fixtures::random_scenarios(t, {}, 1), fixtures::random_profiles(other, 2)),
                  ValidationError);
}
