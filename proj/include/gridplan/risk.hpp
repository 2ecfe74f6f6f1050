#pragma once

// Conditional value at risk of a discrete loss distribution,
//   CVaR_a(L) = min_z  z + E[(L - z)^+] / (1 - a),
// evaluated exactly by sorting the atoms and splitting the one that
// straddles the tail boundary.

#include "gridplan/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace gridplan {

namespace detail {

template <class Values, class Probabilities>
void check_distribution(const Eigen::DenseBase<Values>& values, const Eigen::DenseBase<Probabilities>& probabilities,
                        double alpha) {
  if (values.size() == 0) throw ValidationError("CVaR of an empty sample");
  if (values.size() != probabilities.size()) throw ValidationError("CVaR: values and probabilities differ in length");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("CVaR: alpha must lie in [0,1)");
  if ((probabilities.derived().array() < 0.0).any()) throw ValidationError("CVaR: negative probability");
  const double mass = probabilities.derived().sum();
  if (std::abs(mass - 1.0) > 1e-9) {
    throw ValidationError("CVaR: probabilities sum to " + std::to_string(mass) + ", expected 1");
  }
}

// Atom indices by decreasing loss; ties keep input order.
template <class Values>
std::vector<Eigen::Index> descending(const Eigen::DenseBase<Values>& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values.derived()(a) > values.derived()(b); });
  return order;
}

}  // namespace detail

template <class Values, class Probabilities>
double expectation(const Eigen::DenseBase<Values>& values, const Eigen::DenseBase<Probabilities>& probabilities) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) total += probabilities.derived()(i) * values.derived()(i);
  return total;
}

// Smallest z with P(L > z) <= 1 - alpha.
template <class Values, class Probabilities>
double value_at_risk(const Eigen::DenseBase<Values>& values, const Eigen::DenseBase<Probabilities>& probabilities,
                     double alpha) {
  detail::check_distribution(values, probabilities, alpha);
  const double tail = 1.0 - alpha;
  double above = 0.0;
  const auto order = detail::descending(values);
  for (std::size_t k = 0; k < order.size(); ++k) {
    above += probabilities.derived()(order[k]);
    if (above > tail && (k + 1 == order.size() || values.derived()(order[k + 1]) < values.derived()(order[k]))) {
      return values.derived()(order[k]);
    }
  }
  return values.derived()(order.back());
}

// alpha = 0 returns the probability-weighted mean summed in input order.
template <class Values, class Probabilities>
double cvar(const Eigen::DenseBase<Values>& values, const Eigen::DenseBase<Probabilities>& probabilities, double alpha) {
  detail::check_distribution(values, probabilities, alpha);
  if (alpha == 0.0) return expectation(values, probabilities);
  const double tail = 1.0 - alpha;
  double taken = 0.0;
  double total = 0.0;
  for (const auto i : detail::descending(values)) {
    const double p = probabilities.derived()(i);
    if (taken >= tail) break;
    const double use = std::min(p, tail - taken);
    total += use * values.derived()(i);
    taken += use;
  }
  return total / tail;
}

}  // namespace gridplan
