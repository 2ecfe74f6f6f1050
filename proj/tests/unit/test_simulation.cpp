#include "fixtures.hpp"

#include "gridplan/error.hpp"
#include "gridplan/monte_carlo.hpp"
#include "gridplan/replay.hpp"

#include <doctest.h>

#include <filesystem>
#include <numeric>

using namespace gridplan;
namespace fs = std::filesystem;

namespace {

NetworkTopology storm() { return load_network(fs::path(GRIDPLAN_TEST_DATA) / "storm_feeder"); }

std::vector<LineOutageRate> storm_rates() { return load_outage_rates(fs::path(GRIDPLAN_TEST_DATA) / "storm_rates.csv"); }

const InvestmentPlan kStorage{{}, {{"BC1", 40.0}}};

}  // namespace

TEST_CASE("hourly failure probability") {
  CHECK(hourly_probability(8.76, 365.0) == doctest::Approx(0.001));
  CHECK(hourly_probability(0.0, 365.0) == 0.0);
}

TEST_CASE("calendar days follow cumulative weights") {
  const auto one = calendar_days(storm());
  CHECK(one.size() == 365);
  CHECK(std::all_of(one.begin(), one.end(), [](std::size_t d) { return d == 0; }));
  const auto t = fixtures::random_feeder({}, 1);
  auto days = t.days();
  days[0].weight_days = 100.0;
  days[1].weight_days = 265.0;
  const auto split = calendar_days(NetworkTopology::create(t.nodes(), t.lines(), t.storage(), days, t.economics()));
  CHECK(std::count(split.begin(), split.end(), 0U) == 100);
  CHECK(split[99] == 0);
  CHECK(split[100] == 1);
}

TEST_CASE("a single line feeds one load: every failed hour sheds its demand") {
  const auto t = fixtures::radial_pair(24);
  MonteCarloOptions o;
  o.years = 50;
  o.seed = 3;
  const MonteCarlo mc(t, {}, {{"L1", 40.0, 1.0}}, constant_profiles(t, 0.0), o);
  for (std::size_t y = 0; y < 5; ++y) {
    const auto tr = mc.simulate_year(y);
    CHECK(tr.hours == 8760);
    const double n = static_cast<double>(tr.event_hours.size());
    CHECK(tr.ens_kwh == doctest::Approx(10.0 * n));
    CHECK(tr.saidi == doctest::Approx(n));
    CHECK(tr.islanded_hours == tr.event_hours.size());
    CHECK(std::is_sorted(tr.event_hours.begin(), tr.event_hours.end()));
  }
  const auto r = mc.run();
  CHECK(r.hourly_ens.total() == 50U * 8760U);
  CHECK(r.annual_ens_kwh.size() == 50);
  const double mean = std::accumulate(r.annual_ens_kwh.begin(), r.annual_ens_kwh.end(), 0.0) / 50.0;
  CHECK(r.ens_kwh.mean == doctest::Approx(mean));
  CHECK(r.ens_kwh.cvar >= r.ens_kwh.mean);
  CHECK(r.ens_kwh.worst >= r.ens_kwh.cvar - 1e-9);
  CHECK(r.hourly_ens.edges.size() == o.histogram_bins + 1);
}

TEST_CASE("runs are reproducible and independent of the thread count") {
  const auto t = storm();
  MonteCarloOptions o;
  o.years = 40;
  o.seed = 9;
  const auto prof = constant_profiles(t, 0.5);
  const auto a = run_monte_carlo(t, kStorage, storm_rates(), prof, o);
  const auto b = run_monte_carlo(t, kStorage, storm_rates(), prof, o);
  o.threads = 4;
  const auto c = run_monte_carlo(t, kStorage, storm_rates(), prof, o);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_to_json(a) == report_to_json(c));
  o.seed = 10;
  CHECK(report_to_json(run_monte_carlo(t, kStorage, storm_rates(), prof, o)) != report_to_json(a));
}

TEST_CASE("storage never increases the shed of a paired year") {
  const auto t = storm();
  MonteCarloOptions o;
  o.years = 60;
  o.seed = 4;
  const auto prof = constant_profiles(t, 1.0);
  const auto none = run_monte_carlo(t, {}, storm_rates(), prof, o);
  const auto with = run_monte_carlo(t, kStorage, storm_rates(), prof, o);
  for (std::size_t y = 0; y < o.years; ++y) {
    CHECK(with.annual_ens_kwh[y] <= none.annual_ens_kwh[y] + 1e-9);
    CHECK(with.annual_saifi[y] == doctest::Approx(none.annual_saifi[y]));
  }
}

TEST_CASE("repair times hold lines out for whole blocks") {
  const auto t = fixtures::radial_pair(24);
  MonteCarloOptions o;
  o.repair = RepairModel::mttr;
  o.seed = 2;
  const MonteCarlo mc(t, {}, {{"L1", 20.0, 3.0}}, constant_profiles(t, 0.0), o);
  const auto tr = mc.simulate_year(0);
  REQUIRE(!tr.event_hours.empty());
  std::size_t run = 1;
  for (std::size_t i = 1; i <= tr.event_hours.size(); ++i) {
    if (i < tr.event_hours.size() && tr.event_hours[i] == tr.event_hours[i - 1] + 1) {
      ++run;
      continue;
    }
    if (tr.event_hours[i - 1] + 1 < tr.hours) CHECK(run >= 3);
    run = 1;
  }
}

TEST_CASE("simulation inputs are validated") {
  const auto t = storm();
  const auto prof = constant_profiles(t, 0.5);
  CHECK_THROWS_AS(MonteCarlo(t, {}, {{"nope", 1.0, 1.0}}, prof), ValidationError);
  CHECK_THROWS_AS(MonteCarlo(t, {}, {{"C1", 1.0, 1.0}}, prof), ValidationError);
  MonteCarloOptions o;
  o.years = 0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
  o = {};
  o.ens_alpha = 1.0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
}

TEST_CASE("storm replay") {
  const auto t = storm();
  const auto events = load_extreme_events(fs::path(GRIDPLAN_TEST_DATA) / "storm_events.json", t);
  const auto ev = replay_event(t, events[0], 8);
  CHECK(ev.duration_periods == 10);
  CHECK(ev.failed_lines == std::vector<std::size_t>{0, 1});
  const auto none = extreme_event_replay(t, {}, ev, 0);
  const auto window = outage_window(8, 10, t.periods());
  double shed = 0.0;
  for (std::size_t p = 0; p < t.periods(); ++p) {
    const double lf = t.days()[0].load_factor[static_cast<Eigen::Index>(p)];
    CHECK(none.demand_kw[p] == doctest::Approx(38.0 * lf));
    if (p < window.first || p > window.last) {
      CHECK(none.served_fraction(p) == 1.0);
    } else {
      CHECK(none.served_kw[p] == doctest::Approx(0.0));
      shed += 38.0 * lf;
    }
  }
  CHECK(none.shed_kwh == doctest::Approx(shed));
  CHECK(none.storage_kwh == 0.0);
  const auto with = extreme_event_replay(t, kStorage, ev, 0);
  CHECK(with.storage_kwh == 40.0);
  CHECK(with.shed_kwh == doctest::Approx(shed - 40.0));
  for (std::size_t p = 0; p < t.periods(); ++p) CHECK(with.served_kw[p] >= none.served_kw[p] - 1e-12);
  CHECK(replay_to_json(with).at("shed_kwh") == with.shed_kwh);
}

TEST_CASE("replay rejects events outside the day") {
  const auto t = storm();
  ReplayEvent late{"late", {0}, 24, 1};
  CHECK_THROWS_AS(extreme_event_replay(t, {}, late, 0), ValidationError);
  ReplayEvent candidate{"tie", {3}, 1, 1};
  CHECK_THROWS_AS(extreme_event_replay(t, {}, candidate, 0), ValidationError);
  ReplayEvent day{"day", {0}, 1, 1};
  CHECK_THROWS_AS(extreme_event_replay(t, {}, day, 3), ValidationError);
}
