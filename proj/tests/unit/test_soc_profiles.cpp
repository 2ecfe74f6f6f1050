#include "fixtures.hpp"
#include "oracles.hpp"

#include "gridplan/error.hpp"
#include "gridplan/soc_profiles.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace gridplan;
namespace fs = std::filesystem;

namespace {

StorageDevice device(double eta, double hours_to_full, double p_out = 10.0) {
  StorageDevice s;
  s.id = "H";
  s.node = "B";
  s.p_in_max_kw = 10.0;
  s.p_out_max_kw = p_out;
  s.round_trip_eff = eta;
  s.hours_to_full = hours_to_full;
  return s;
}

Eigen::VectorXd random_prices(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> cents(5, 40);
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  for (auto& v : p) v = cents(rng) / 100.0;
  return p;
}

}  // namespace

TEST_CASE("lossless arbitrage matches the grid dynamic program") {
  std::mt19937_64 rng(5);
  const auto s = device(1.0, 4.0);
  for (int k = 0; k < 12; ++k) {
    const auto prices = random_prices(rng, 12);
    const auto r = solve_arbitrage(s, prices, 1.0);
    const double dp = oracle::arbitrage_dp(s, {prices.data(), prices.data() + prices.size()}, 1.0);
    CHECK(r.profit == doctest::Approx(dp).epsilon(1e-9));
  }
}

TEST_CASE("lossy arbitrage is at least the grid optimum") {
  std::mt19937_64 rng(6);
  const auto s = device(0.85, 3.0, 5.0);
  for (int k = 0; k < 6; ++k) {
    const auto prices = random_prices(rng, 8);
    const auto r = solve_arbitrage(s, prices, 1.0);
    const double dp = oracle::arbitrage_dp(s, {prices.data(), prices.data() + prices.size()}, 1.0, 61);
    CHECK(r.profit >= dp - 1e-7);
  }
}

TEST_CASE("schedules respect the device limits and close the day") {
  std::mt19937_64 rng(7);
  const auto s = device(0.9, 4.0, 5.0);
  const auto prices = random_prices(rng, 24);
  const auto r = solve_arbitrage(s, prices, 1.0);
  REQUIRE(r.soc.size() == 24);
  double level = r.initial_soc;
  for (Eigen::Index t = 0; t < 24; ++t) {
    CHECK(r.soc[t] >= -1e-9);
    CHECK(r.soc[t] <= 1.0 + 1e-9);
    CHECK(r.charge[t] <= 0.25 + 1e-9);
    CHECK(r.discharge[t] <= 0.125 + 1e-9);
    level += 0.9 * r.charge[t] - r.discharge[t];
    CHECK(r.soc[t] == doctest::Approx(level).epsilon(1e-7));
  }
  CHECK(r.soc[23] == doctest::Approx(r.initial_soc).epsilon(1e-7));
  CHECK(r.profit >= -1e-9);
}

TEST_CASE("flat prices leave the device idle at the preferred level") {
  const auto r = solve_arbitrage(device(0.9, 4.0), Eigen::VectorXd::Constant(6, 0.1), 1.0, {}, {0.3});
  CHECK(r.profit == doctest::Approx(0.0));
  CHECK(r.charge.sum() == doctest::Approx(0.0));
  CHECK(r.discharge.sum() == doctest::Approx(0.0));
  CHECK(r.initial_soc == doctest::Approx(0.3));
}

TEST_CASE("profiles of the storm feeder") {
  const auto t = load_network(fs::path(GRIDPLAN_TEST_DATA) / "storm_feeder");
  const auto p = compute_profiles(t);
  CHECK_NOTHROW(p.check_covers(t));
  REQUIRE(p.devices() == 1);
  const auto& m = p.device(0);
  CHECK(m.rows() == 24);
  CHECK(m.cols() == 1);
  CHECK(m.minCoeff() >= -1e-9);
  CHECK(m.maxCoeff() <= 1.0 + 1e-9);
  // Cheapest hours fill the device, the evening peak empties it.
  CHECK(m(5, 0) > m(20, 0));
}

TEST_CASE("profile tables round trip through csv") {
  fixtures::FeederSpec spec;
  spec.candidate_storage = 2;
  const auto t = fixtures::random_feeder(spec, 12);
  const auto p = fixtures::random_profiles(t, 13);
  const auto path = fs::temp_directory_path() / "gridplan_unit_profiles.csv";
  save_profiles(p, path);
  CHECK(load_profiles(path, t) == p);
  fs::remove(path);
  CHECK(constant_profiles(t, 0.4)(1, 2, 1) == 0.4);
}

TEST_CASE("profiles must cover the topology") {
  fixtures::FeederSpec spec;
  spec.candidate_storage = 2;
  const auto t = fixtures::random_feeder(spec, 14);
  const auto other = fixtures::random_feeder({}, 15);
  CHECK_THROWS_AS(fixtures::random_profiles(other, 1).check_covers(t), ValidationError);
  std::vector<Eigen::MatrixXd> bad(2, Eigen::MatrixXd::Constant(4, 2, 1.5));
  CHECK_THROWS_AS(set_profiles(t, bad), ValidationError);
  std::vector<Eigen::MatrixXd> short_days(2, Eigen::MatrixXd::Constant(4, 1, 0.5));
  CHECK_THROWS_AS(set_profiles(t, short_days), ValidationError);
  CHECK_THROWS_AS(constant_profiles(t, -0.1), ValidationError);
}

TEST_CASE("days without prices are rejected") {
  const auto t = fixtures::random_feeder({}, 16);
  auto days = t.days();
  days[1].price_usd_per_kwh.resize(0);
  const auto unpriced = NetworkTopology::create(t.nodes(), t.lines(), t.storage(), days, t.economics());
  CHECK_THROWS_AS(compute_profiles(unpriced), ValidationError);
}
