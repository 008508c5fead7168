#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "slln_lab/association.hpp"
#include "slln_lab/conditions.hpp"
#include "slln_lab/covariance.hpp"
#include "slln_lab/errors.hpp"
#include "slln_lab/moments.hpp"

using namespace slln;

namespace {

CovarianceModel unit_variances() {
  return CovarianceModel::independent([](std::size_t) { return 1.0; }, "v=1");
}

CovarianceModel cube_root_variances() {
  return CovarianceModel::independent([](std::size_t i) { return std::cbrt(double(i)); }, "v=i^(1/3)");
}

CovarianceModel stationary_power(double exponent) {
  return CovarianceModel::stationary(
      [exponent](std::size_t l) { return l == 0 ? 1.0 : std::pow(double(l), -exponent); });
}

double value_at(const ConditionReport& r, std::size_t index) {
  for (const auto& g : r.grid)
    if (g.index == index) return g.value;
  FAIL("index not on grid");
  return 0.0;
}

}  // namespace

TEST_CASE("geometric grid") {
  const auto g = geometric_grid(1, 100);
  CHECK(g.front() == 1);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
  const auto h = geometric_grid(1, 1000);
  CHECK(std::equal(g.begin(), g.end(), h.begin()));
}

TEST_CASE("finalize_report verdict surrogate") {
  ConditionReport r;
  for (std::size_t i : geometric_grid(1, 100000)) r.grid.push_back({i, 2.0 - 1.0 / double(i)});
  finalize_report(r);
  CHECK(r.verdict == Verdict::bounded);
  CHECK(r.running_sup == doctest::Approx(2.0).epsilon(1e-4));

  ConditionReport d;
  for (std::size_t i : geometric_grid(1, 100000)) d.grid.push_back({i, std::sqrt(double(i))});
  finalize_report(d);
  CHECK(d.verdict == Verdict::diverging);
  CHECK(d.loglog_slope == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.fit_residual < 1e-9);

  ConditionReport v;
  v.criterion = Criterion::vanishing;
  for (std::size_t i : geometric_grid(1, 100000)) v.grid.push_back({i, 3.0});
  finalize_report(v);
  CHECK(v.verdict == Verdict::diverging);
  for (auto& g : v.grid) g.value = 0.0;
  finalize_report(v);
  CHECK(v.verdict == Verdict::bounded);
}

TEST_CASE("gcip") {
  SUBCASE("unit variances, delta = 1: prefix values identically 1") {
    const auto r = eval_gcip(unit_variances(), 1.0, 10000);
    for (const auto& g : r.prefix.grid) CHECK(g.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.combined() == Verdict::bounded);
  }
  SUBCASE("cube-root variances: diverging at nu = 0, bounded at nu = 1/3") {
    const auto a = eval_gcip(cube_root_variances(), 1.0, 100000);
    CHECK(a.prefix.verdict == Verdict::diverging);
    CHECK(a.prefix.loglog_slope == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    CHECK(a.combined() == Verdict::diverging);
    const auto b = eval_gcip(cube_root_variances(), 1.0 / 3.0, 100000);
    CHECK(b.combined() == Verdict::bounded);
  }
  SUBCASE("prefix value against a direct sum") {
    const auto r = eval_gcip(cube_root_variances(), 1.0, 1000);
    const std::size_t q = r.prefix.grid[r.prefix.grid.size() / 2].index;
    double s = 0.0;
    for (std::size_t i = 1; i <= q; ++i) s += std::cbrt(double(i));
    // (3 - delta)/2 = 1
    CHECK(value_at(r.prefix, q) == doctest::Approx(s / double(q)).epsilon(1e-12));
  }
  SUBCASE("exact evt covariances are bounded for nu = 1/4") {
    const auto p = EvtProcessParams::power_case(1.0, 2.0, 0.5);
    const auto r = eval_gcip(CovarianceModel::evt_oracle(p, 4001), 0.5, 4000);
    CHECK(r.prefix.verdict == Verdict::bounded);
    CHECK(r.blocks.verdict == Verdict::bounded);
  }
  SUBCASE("parameter errors") {
    CHECK_THROWS_AS(eval_gcip(unit_variances(), 3.0, 100), ParameterError);
    CHECK_THROWS_AS(eval_gcip(unit_variances(), 0.0, 100), ParameterError);
    CHECK_THROWS_AS(eval_gcip(unit_variances(), 1.0, 5), ParameterError);
  }
}

TEST_CASE("gchr") {
  const auto b = [](std::size_t i) { return double(i); };
  const auto unit = eval_gchr(unit_variances(), b, 2.0, 100000);
  CHECK(unit.verdict == Verdict::bounded);
  CHECK(unit.running_sup < std::numbers::pi * std::numbers::pi / 6.0);
  CHECK(eval_gchr(cube_root_variances(), b, 2.0, 100000).verdict == Verdict::bounded);
  CHECK(eval_gchr(stationary_power(3.0), b, 2.0, 100000).verdict == Verdict::bounded);
  CHECK_THROWS_AS(eval_gchr(unit_variances(), [](std::size_t i) { return 1.0 / double(i); }, 2.0, 100),
                  ContractViolation);
}

TEST_CASE("covariance series, newman sigma^2, cesaro, q2") {
  CHECK(eval_covariance_series(stationary_power(3.0), 100000).verdict == Verdict::bounded);
  CHECK(eval_covariance_series(stationary_power(0.5), 100000).verdict == Verdict::diverging);

  const auto zero = CovarianceModel::stationary([](std::size_t l) { return l == 0 ? 2.5 : 0.0; });
  const auto s0 = eval_newman_sigma2(zero);
  REQUIRE(s0.value);
  CHECK(*s0.value == doctest::Approx(2.5));

  const auto s2 = eval_newman_sigma2(stationary_power(2.0));
  REQUIRE(s2.value);
  CHECK(*s2.value == doctest::Approx(1.0 + std::numbers::pi * std::numbers::pi / 3.0).epsilon(1e-6));
  CHECK(s2.converged);

  const auto s1 = eval_newman_sigma2(stationary_power(1.0));
  CHECK(s1.diverging);
  CHECK_FALSE(s1.value);
  CHECK_THROWS_AS(eval_newman_sigma2(unit_variances()), ParameterError);

  CHECK(eval_cesaro(zero, 100000).verdict == Verdict::bounded);
  CHECK(eval_cesaro(stationary_power(0.5), 100000).verdict == Verdict::bounded);
  const auto constant = CovarianceModel::stationary([](std::size_t) { return 0.3; });
  const auto c = eval_cesaro(constant, 100000);
  CHECK(c.verdict == Verdict::diverging);
  CHECK(c.grid.back().value == doctest::Approx(0.3));

  CHECK(eval_q2(zero, 0.5, 100000).verdict == Verdict::bounded);
  CHECK(eval_q2(stationary_power(2.0), 0.0, 100000).verdict == Verdict::bounded);
  CHECK(eval_q2(stationary_power(0.5), 0.0, 100000).verdict == Verdict::diverging);
  CHECK(eval_q2(stationary_power(0.5), 0.6, 100000).verdict == Verdict::bounded);
}

TEST_CASE("kolmogorov, variance growth, birkel") {
  CHECK(eval_kolmogorov(unit_variances(), 100000).verdict == Verdict::bounded);
  CHECK(eval_variance_growth(cube_root_variances(), 0.0, 100000).verdict == Verdict::diverging);
  CHECK(eval_variance_growth(cube_root_variances(), 1.0 / 3.0, 100000).verdict == Verdict::bounded);

  CHECK(eval_birkel(unit_variances(), 100000).verdict == Verdict::bounded);
  const auto zero = CovarianceModel::independent([](std::size_t) { return 0.0; });
  for (const auto& g : eval_birkel(zero, 1000).grid) CHECK(g.value == 0.0);

  // Small evt case against brute-force matrix summation.
  const auto p = EvtProcessParams::power_case(1.0, 2.0);
  const auto model = CovarianceModel::evt_oracle(p, 60);
  const auto r = eval_birkel(model, 50);
  for (const auto& g : r.grid) {
    const std::size_t n_max = g.index;
    double s = 0.0;
    const std::size_t row = n_max + 1;  // the whole sum is taken in row n + 1
    for (std::size_t i = 1; i <= n_max; ++i) {
      double c = 0.0;
      for (std::size_t j = 1; j <= i; ++j) {
        const double dfi = p.f(i) - p.f(i - 1), dfj = p.f(j) - p.f(j - 1);
        const double a = p.alpha(row);
        c += a * a * dfi * dfj * cov_S(std::min(i, j), std::max(i, j), row, p.gamma);
      }
      s += c / (double(i) * i);
    }
    REQUIRE(g.value == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("evt sufficient conditions") {
  SUBCASE("power case tau = 1, gamma = 2, delta = 1/2: all bounded") {
    const auto reps = eval_evt_conditions(EvtProcessParams::power_case(1.0, 2.0, 0.5), 100000);
    for (const auto& r : reps) CHECK_MESSAGE(r.verdict == Verdict::bounded, r.condition_id);
    CHECK(reps[0].condition_id == "evt_diag_variance");
    CHECK(reps[4].condition_id == "evt_block_cross_cov");
  }
  SUBCASE("boundary case 2 gamma + 2 tau - 1 = 0 is bounded") {
    const auto reps = eval_evt_conditions(EvtProcessParams::power_case(0.25, 0.25, 0.5), 100000);
    CHECK(reps[0].verdict == Verdict::bounded);
  }
  SUBCASE("first condition diverges as delta approaches 3") {
    const auto reps = eval_evt_conditions(EvtProcessParams::power_case(1.0, 2.0, 2.99), 100000);
    CHECK(reps[0].verdict == Verdict::diverging);
  }
  SUBCASE("first condition against a direct sum") {
    const auto p = EvtProcessParams::power_case(1.0, 2.0, 0.5);
    const auto reps = eval_evt_conditions(p, 1000);
    const std::size_t k = reps[0].grid.back().index;
    double s = 0.0;
    for (std::size_t j = p.L; j < k; ++j) s += std::pow(double(j), 2.0 * p.gamma);
    const double expected = s / std::pow(double(k), 2.0 * p.gamma + 1.0 + p.nu());
    CHECK(reps[0].grid.back().value == doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("parameter errors") {
    auto p = EvtProcessParams::power_case(1.0, 2.0);
    CHECK_THROWS_AS(eval_evt_conditions(p, 50), ParameterError);
    p.L = 200;
    CHECK_THROWS_AS(eval_evt_conditions(p, 100), ParameterError);
  }
}

TEST_CASE("maxvar probe") {
  std::vector<double> lambdas;
  for (double l = 1.0; l <= 30.0; l += 1.0) lambdas.push_back(l);
  SUBCASE("iid centred unit variance, Kolmogorov inequality") {
    const auto gen = AssocGenerator::iid();
    const auto pr = maxvar_probe([&](SeededStream& s, std::size_t n) { return generate(gen, s, n); },
                                 2.0, 100, lambdas, 5000, 1, 100.0);
    CHECK(pr.constant <= 1.0 + 3.0 * pr.constant_se);
    CHECK(pr.var_known);
  }
  SUBCASE("single variable is Chebyshev") {
    const auto gen = AssocGenerator::iid(IidDist::uniform);
    std::vector<double> small{0.5, 1.0, 1.5, 2.0};
    const auto pr = maxvar_probe([&](SeededStream& s, std::size_t n) { return generate(gen, s, n); },
                                 2.0, 1, small, 5000, 2, 1.0);
    CHECK(pr.constant <= 1.0 + 3.0 * pr.constant_se);
  }
  SUBCASE("associated Gaussian gives a finite constant") {
    const auto gen = AssocGenerator::gaussian(
        [](std::size_t i, std::size_t j) { return std::pow(0.5, std::abs(double(i) - double(j))); });
    const auto pr = maxvar_probe([&](SeededStream& s, std::size_t n) { return generate(gen, s, n); },
                                 2.0, 100, lambdas, 2000, 3);
    CHECK(std::isfinite(pr.constant));
    CHECK(pr.constant > 0.0);
    CHECK(std::isfinite(pr.emax_ratio));
  }
  SUBCASE("degenerate and insufficient replications") {
    const auto pr = maxvar_probe([](SeededStream&, std::size_t n) { return std::vector<double>(n, 0.0); },
                                 2.0, 10, lambdas, 1000, 4);
    CHECK(pr.degenerate);
    CHECK_THROWS_AS(maxvar_probe([](SeededStream&, std::size_t n) { return std::vector<double>(n); },
                                 2.0, 10, lambdas, 999, 4),
                    ParameterError);
  }
}
