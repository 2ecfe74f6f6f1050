#include "oracles.hpp"

#include "gridplan/error.hpp"
#include "gridplan/risk.hpp"

#include <doctest.h>

#include <random>

using namespace gridplan;

TEST_CASE("hand-computed values") {
  Eigen::VectorXd x(3), p(3);
  x << 1.0, 5.0, 3.0;
  p << 0.2, 0.3, 0.5;
  CHECK(cvar(x, p, 0.0) == doctest::Approx(3.2));
  CHECK(cvar(x, p, 0.5) == doctest::Approx(4.2));
  CHECK(cvar(x, p, 0.9) == doctest::Approx(5.0));
  CHECK(value_at_risk(x, p, 0.5) == doctest::Approx(3.0));
  CHECK(value_at_risk(x, p, 0.75) == doctest::Approx(5.0));
}

TEST_CASE("zero-probability atoms are ignored") {
  Eigen::VectorXd x(3), p(3);
  x << 100.0, 2.0, 1.0;
  p << 0.0, 0.5, 0.5;
  CHECK(cvar(x, p, 0.5) == doctest::Approx(2.0));
  CHECK(value_at_risk(x, p, 0.2) == doctest::Approx(1.0));
  CHECK(value_at_risk(x, p, 0.6) == doctest::Approx(2.0));
}

TEST_CASE("random distributions agree with the zeta oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + rng() % 25);
    Eigen::VectorXd x(n), p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = std::round(u(rng) * 20.0);
      p[i] = u(rng);
    }
    p /= p.sum();
    const double a1 = u(rng) * 0.99, a2 = std::min(0.999, a1 + u(rng) * 0.1);
    const std::vector<double> xs(x.data(), x.data() + n), ps(p.data(), p.data() + n);
    CHECK(std::abs(cvar(x, p, a1) - oracle::cvar_grid(xs, ps, a1)) <= 1e-9);
    CHECK(cvar(x, p, a2) >= cvar(x, p, a1) - 1e-12);
    CHECK(cvar(x, p, a1) >= expectation(x, p) - 1e-12);
    CHECK(cvar(x, p, a1) <= x.maxCoeff() + 1e-12);
    CHECK(cvar(x, p, a1) >= value_at_risk(x, p, a1) - 1e-12);
  }
}

TEST_CASE("invalid inputs are rejected") {
  Eigen::VectorXd x(2), p(2), bad(2);
  x << 1.0, 2.0;
  p << 0.5, 0.5;
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(cvar(x, p, 1.0), ValidationError);
  CHECK_THROWS_AS(cvar(x, p, -0.1), ValidationError);
  CHECK_THROWS_AS(cvar(x, bad, 0.5), ValidationError);
  CHECK_THROWS_AS(cvar(Eigen::VectorXd(), Eigen::VectorXd(), 0.5), ValidationError);
  CHECK_THROWS_AS(cvar(x, Eigen::VectorXd::Ones(3) / 3.0, 0.5), ValidationError);
}

TEST_CASE("a point mass is its own CVaR") {
  Eigen::VectorXd x(1), p(1);
  x << 7.5;
  p << 1.0;
  for (const double a : {0.0, 0.3, 0.99}) CHECK(cvar(x, p, a) == doctest::Approx(7.5).epsilon(1e-15));
}
