#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "slln_lab/errors.hpp"
#include "slln_lab/estimators.hpp"
#include "slln_lab/evt_process.hpp"
#include "slln_lab/sampling.hpp"

using namespace slln;

namespace {

// Direct summation: (1/f(k)) sum_{j=1}^{k} f(j) (x[n-j] - x[n-j-1]), 0-based ascending x.
double direct_hill(const std::vector<double>& x, std::size_t k, double (*f)(std::size_t)) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t j = 1; j <= k; ++j) s += f(j) * (x[n - j] - x[n - j - 1]);
  return s / f(k);
}

double square(std::size_t j) { return double(j * j); }
double ident(std::size_t j) { return double(j); }

}  // namespace

TEST_CASE("hill_functional small cases") {
  OrderStatSample c{{2.0, 2.0, 2.0, 2.0}};
  CHECK(hill_functional(c, 2, WeightFunction::identity()).statistic == 0.0);

  OrderStatSample two{{0.25, 1.75}};
  CHECK(hill_functional(two, 1, WeightFunction::identity()).statistic == 1.5);

  OrderStatSample three{{0.0, 1.0, 3.0}};
  const auto h = hill_functional(three, 2, WeightFunction::power(2.0));
  CHECK(h.statistic == doctest::Approx((1.0 * 2.0 + 4.0 * 1.0) / 4.0).epsilon(1e-12));
  CHECK(h.statistic == doctest::Approx(direct_hill(three.values, 2, square)).epsilon(1e-12));
  CHECK(h.k == 2);
  CHECK(h.n == 3);
  CHECK(h.weight == WeightFunction::power(2.0).label());
}

TEST_CASE("hill_functional against direct summation on random samples") {
  SeededStream s(4);
  const auto u = uniform_order_stats(s, 500);
  for (std::size_t k : {1, 10, 250, 499})
    CHECK(hill_functional(u, k, WeightFunction::identity()).statistic ==
          doctest::Approx(direct_hill(u.values, k, ident)).epsilon(1e-12));
}

TEST_CASE("hill_functional errors") {
  OrderStatSample x{{0.0, 1.0, 3.0}};
  CHECK_THROWS_AS(hill_functional(x, 3, WeightFunction::identity()), IndexError);
  CHECK_THROWS_AS(hill_functional(x, 0, WeightFunction::identity()), IndexError);
  OrderStatSample bad{{0.0, 3.0, 1.0}};
  CHECK_THROWS_AS(hill_functional(bad, 1, WeightFunction::identity()), ContractViolation);
}

TEST_CASE("hill_ratio") {
  OrderStatSample c{{-1.0, -1.0, -1.0}};
  CHECK(hill_ratio(c, 1, WeightFunction::identity(), 0.0) == 0.0);
  OrderStatSample x{{-3.0, -2.0, -0.5}};
  CHECK(hill_ratio(x, 1, WeightFunction::identity(), 0.0) == doctest::Approx(1.5 / 2.0));
  CHECK_THROWS_AS(hill_ratio(x, 1, WeightFunction::identity(), -0.5), EndpointViolation);
}

TEST_CASE("hill_ratio mean approaches 1/(gamma+1) under the inverse exponent") {
  for (double g : {1.0, 2.0}) {
    QuantileRep rep;
    rep.gamma = g;
    rep.mode = ExponentMode::inverse_gamma;
    double sum = 0.0;
    for (std::uint64_t r = 0; r < 1000; ++r) {
      SeededStream s(9000 + r);
      sum += hill_ratio(sample_weibull_domain(s, 10000, rep), 100, WeightFunction::identity(), 0.0);
    }
    CHECK(std::abs(sum / 1000 - 1.0 / (g + 1.0)) < 0.02);
  }
}

TEST_CASE("hill_ratio replications share the law of the matched W path") {
  QuantileRep rep;
  rep.gamma = 2.0;
  const EvtProcessParams p = EvtProcessParams::power_case(1.0, 2.0);
  std::vector<double> a, b;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    SeededStream s(r);
    a.push_back(hill_ratio(sample_weibull_domain(s, 10000, rep), 100, WeightFunction::identity(), 0.0));
    SeededStream t(100000 + r);
    b.push_back(simulate_wk(t, p, 100, WkScale::hill_matched).at(100));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) - double(j)) / 1000.0);
  }
  CHECK(d < 1.628 * std::sqrt(2.0 / 1000));
}

TEST_CASE("hill_sweep") {
  SeededStream s(8);
  QuantileRep rep;
  const auto y = sample_weibull_domain(s, 200, rep);
  const auto sweep = hill_sweep(y, {1, 5, 50}, WeightFunction::identity(), 0.0);
  REQUIRE(sweep.size() == 3);
  for (const auto& h : sweep) {
    CHECK(h.statistic == hill_functional(y, h.k, WeightFunction::identity()).statistic);
    REQUIRE(h.ratio);
    CHECK(*h.ratio == hill_ratio(y, h.k, WeightFunction::identity(), 0.0));
  }
  const auto no_ratio = hill_sweep(y, {3}, WeightFunction::identity());
  CHECK_FALSE(no_ratio[0].ratio);
  CHECK_THROWS_AS(hill_sweep(y, {200}, WeightFunction::identity()), IndexError);
}
