#include <cmath>
#include <random>

#include "doctest.h"
#include "slln_lab/errors.hpp"
#include "slln_lab/moments.hpp"

using namespace slln;

namespace {

// Direct products, independent of the library code.
double prod_s(std::size_t j, std::size_t k, double g) {
  double p = 1.0;
  for (std::size_t h = j; h < k; ++h) p *= double(h) / (h + g);
  return p;
}

struct McStats {
  double mean, se_mean, var, se_var, cov, se_cov;
};

// exp(-g sum_{h=j}^{k-1} E_h/h) and the i-version from the same draws.
McStats simulate(std::size_t i, std::size_t j, std::size_t k, double g, std::size_t R,
                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> a(R), b(R);
  double ma = 0.0, mb = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    double t = 0.0;
    for (std::size_t h = j; h < k; ++h) t += expo(rng) / double(h);
    double u = 0.0;
    for (std::size_t h = i; h < j; ++h) u += expo(rng) / double(h);
    a[r] = std::exp(-g * t);
    b[r] = a[r] * std::exp(-g * u);
    ma += a[r];
    mb += b[r];
  }
  ma /= R;
  mb /= R;
  double v = 0, v4 = 0, c = 0, c2 = 0;
  for (std::size_t r = 0; r < R; ++r) {
    const double x = a[r] - ma, y = b[r] - mb;
    v += x * x;
    v4 += x * x * x * x;
    c += x * y;
    c2 += x * x * y * y;
  }
  McStats s;
  s.mean = ma;
  s.var = v / (R - 1);
  s.se_mean = std::sqrt(s.var / R);
  s.se_var = std::sqrt((v4 / R - (v / R) * (v / R)) / R);
  s.cov = c / (R - 1);
  s.se_cov = std::sqrt((c2 / R - (c / R) * (c / R)) / R);
  return s;
}

}  // namespace

TEST_CASE("s_jk closed values") {
  CHECK(s_jk(10, 10, 3.0) == 1.0);
  CHECK(s_jk(9, 10, 1.0) == doctest::Approx(0.9).epsilon(1e-15));
  for (double g : {0.3, 1.0, 2.5})
    for (std::size_t k : {5, 50, 500})
      CHECK(s_jk(1, k, g) == doctest::Approx(prod_s(1, k, g)).epsilon(1e-12));
  CHECK_THROWS_AS(s_jk(11, 10, 1.0), IndexError);
  CHECK_THROWS_AS(s_jk(0, 10, 1.0), IndexError);
}

TEST_CASE("var_S closed values") {
  CHECK(var_S(10, 10, 2.0) == 0.0);
  CHECK(var_S(9, 10, 1.0) == doctest::Approx(9.0 / 11.0 - 0.81).epsilon(1e-12));
  CHECK(var_S(9, 10, 1.0) == doctest::Approx(0.0081818181818).epsilon(1e-9));
  for (std::size_t j : {1, 7, 30})
    CHECK(var_S(j, 40, 1.5) ==
          doctest::Approx(prod_s(j, 40, 3.0) - prod_s(j, 40, 1.5) * prod_s(j, 40, 1.5)).epsilon(1e-10));
}

TEST_CASE("cov_S structure") {
  CHECK(cov_S(7, 7, 30, 2.0) == doctest::Approx(var_S(7, 30, 2.0)).epsilon(1e-14));
  CHECK(cov_S(3, 30, 30, 2.0) == 0.0);
  CHECK(cov_S(3, 10, 30, 2.0) == doctest::Approx(prod_s(3, 10, 2.0) * var_S(10, 30, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(cov_S(5, 4, 30, 1.0), IndexError);
}

TEST_CASE("moments agree with Monte Carlo within 3 SE") {
  const McStats a = simulate(10, 10, 100, 2.0, 1000000, 1);
  CHECK(std::abs(a.mean - s_jk(10, 100, 2.0)) <= 3.0 * a.se_mean);
  const McStats b = simulate(50, 50, 200, 2.0, 1000000, 2);
  CHECK(std::abs(b.var - var_S(50, 200, 2.0)) <= 3.0 * b.se_var);
  const McStats c = simulate(20, 40, 100, 1.0, 1000000, 3);
  CHECK(std::abs(c.cov - cov_S(20, 40, 100, 1.0)) <= 3.0 * c.se_cov);
}

TEST_CASE("newman_bound") {
  const NewmanBound e = newman_bound(10, 10, 2.0);
  CHECK(e.exact == 0.0);
  const NewmanBound b = newman_bound(10, 1000000, 2.0);
  double sum = 0.0;
  for (std::size_t h = 10; h < 1000000; ++h) sum += 1.0 / (double(h) * h);
  CHECK(sum == doctest::Approx(0.10516).epsilon(1e-4));
  CHECK(b.exact == doctest::Approx(4.0 * sum).epsilon(1e-10));
  CHECK(b.exact <= 4.0 / 9.0);
  CHECK(b.integral_bound == doctest::Approx(4.0 / 9.0));
  CHECK(b.stated_bound == doctest::Approx(4.0 / 10.0));
  CHECK_THROWS(newman_bound(1, 10, 2.0));
}

TEST_CASE("property: covariances are non-negative and below the exponent covariance") {
  for (double g : {0.25, 1.0, 3.0})
    for (std::size_t k = 2; k <= 50; ++k)
      for (std::size_t j = 2; j <= k; ++j) {
        const double bound = newman_bound(j, k, g).exact;
        for (std::size_t i = 1; i <= j; ++i) {
          const double c = cov_S(i, j, k, g);
          REQUIRE(c >= 0.0);
          REQUIRE(c <= bound * (1 + 1e-12));
        }
      }
}

TEST_CASE("MomentOracle matches the direct functions") {
  const MomentOracle o(1.7, 400);
  for (std::size_t k : {2, 17, 399, 400})
    for (std::size_t j = 1; j <= k; j += 13)
      for (std::size_t i = 1; i <= j; i += 29) {
        REQUIRE(o.s(j, k) == doctest::Approx(s_jk(j, k, 1.7)).epsilon(1e-11));
        REQUIRE(o.var(j, k) == doctest::Approx(var_S(j, k, 1.7)).epsilon(1e-9).scale(1e-14));
        REQUIRE(o.cov(i, j, k) == doctest::Approx(cov_S(i, j, k, 1.7)).epsilon(1e-9).scale(1e-14));
      }
  CHECK_THROWS_AS(o.s(1, 401), IndexError);
}
