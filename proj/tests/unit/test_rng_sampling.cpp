#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "slln_lab/errors.hpp"
#include "slln_lab/rng.hpp"
#include "slln_lab/sampling.hpp"

using namespace slln;

namespace {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("stream output depends only on seed and counter") {
  SeededStream a(42);
  for (int i = 0; i < 10; ++i) a.next_u64();
  SeededStream b(42, 10);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.counter() == 11);
  SeededStream c(43);
  SeededStream d(42);
  CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("uniforms lie in the open unit interval") {
  SeededStream s(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal draws consume two counter steps") {
  SeededStream s(5);
  s.next_normal();
  CHECK(s.counter() == 2);
  s.next_exponential();
  CHECK(s.counter() == 3);
}

TEST_CASE("draw_exponentials is deterministic and advances by n") {
  SeededStream a(7), b(7);
  const auto x = draw_exponentials(a, 1000);
  CHECK(x == draw_exponentials(b, 1000));
  CHECK(a.counter() == 1000);
  SeededStream e(7);
  CHECK_THROWS_AS(draw_exponentials(e, 0), EmptyRequestError);
}

TEST_CASE("exponential moments and survival against analytic values") {
  SeededStream s(20240521);
  const auto x = draw_exponentials(s, 1000000);
  double mean = 0.0;
  std::size_t above = 0;
  for (double v : x) {
    mean += v;
    above += v > 1.0;
  }
  mean /= x.size();
  CHECK(std::abs(mean - 1.0) < 0.01);
  CHECK(std::abs(double(above) / x.size() - std::exp(-1.0)) < 0.005);

  // Independent reference generator agrees in distribution.
  std::mt19937_64 ref(99);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> a(x.begin(), x.begin() + 20000), b(20000);
  for (double& v : b) v = expo(ref);
  CHECK(ks_two_sample(a, b) < 1.628 * std::sqrt(2.0 / 20000));
}

TEST_CASE("uniform order statistics") {
  SUBCASE("n = 1 is uniform") {
    double mean = 0.0;
    for (std::uint64_t r = 0; r < 100000; ++r) {
      SeededStream s(r);
      mean += uniform_order_stats(s, 1).values[0];
    }
    CHECK(std::abs(mean / 100000 - 0.5) < 0.005);
  }
  SUBCASE("sorted, and matches sorted iid uniforms in law") {
    std::vector<double> mine, ref;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::uint64_t r = 0; r < 10000; ++r) {
      SeededStream s(1000 + r);
      const auto o = uniform_order_stats(s, 50);
      REQUIRE(o.is_sorted());
      REQUIRE(std::adjacent_find(o.values.begin(), o.values.end(),
                                 [](double a, double b) { return a >= b; }) == o.values.end());
      mine.push_back(o.values[9]);
      std::vector<double> u(50);
      for (double& v : u) v = unif(gen);
      std::sort(u.begin(), u.end());
      ref.push_back(u[9]);
    }
    CHECK(ks_two_sample(mine, ref) < 1.628 * std::sqrt(2.0 / 10000));
  }
  SUBCASE("empty request") {
    SeededStream s(0);
    CHECK_THROWS_AS(uniform_order_stats(s, 0), EmptyRequestError);
  }
}

TEST_CASE("weibull-domain sampler") {
  SUBCASE("gamma = 1 reduces to a negated uniform") {
    QuantileRep rep;
    SeededStream s(11);
    const auto y = sample_weibull_domain(s, 100000, rep);
    double mean = 0.0;
    for (double v : y.values) mean += v;
    CHECK(std::abs(mean / 1e5 + 0.5) < 0.005);
  }
  SUBCASE("maximum approaches the endpoint at rate U_{1,n}^gamma") {
    QuantileRep rep;
    rep.gamma = 2.0;
    rep.y0 = 1.5;
    const double n = 1e5;
    const double bound = std::pow(10.0 * std::log(n) / n, 2.0);
    int ok = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
      SeededStream s(500 + r);
      const auto y = sample_weibull_domain(s, 100000, rep);
      REQUIRE(y.is_sorted());
      REQUIRE(y.values.back() < rep.y0);
      ok += rep.y0 - y.values.back() <= bound;
    }
    CHECK(ok >= 99);
  }
  SUBCASE("second-order terms and inverse exponent") {
    QuantileRep rep;
    rep.gamma = 2.0;
    rep.mode = ExponentMode::inverse_gamma;
    rep.p = [](double u) { return 0.1 * u; };
    rep.b = [](double t) { return 0.2 * t; };
    rep.validate();
    // exp(int_u^1 0.2 dt) = exp(0.2 (1 - u))
    const double u = 0.3;
    CHECK(rep.tail_distance(u) ==
          doctest::Approx(std::sqrt(u) * (1.0 + 0.1 * u) * std::exp(0.2 * (1.0 - u))).epsilon(1e-8));
  }
  SUBCASE("invalid representations") {
    QuantileRep rep;
    rep.c = 0.0;
    SeededStream s(1);
    CHECK_THROWS_AS(sample_weibull_domain(s, 10, rep), ParameterError);
    rep.c = 1.0;
    rep.gamma = -1.0;
    CHECK_THROWS_AS(rep.validate(), ParameterError);
    rep.gamma = 1.0;
    rep.p = [](double) { return 0.5; };
    CHECK_THROWS_AS(rep.validate(), ParameterError);
  }
  SUBCASE("mode names round-trip") {
    CHECK(exponent_mode_from_string(to_string(ExponentMode::inverse_gamma)) ==
          ExponentMode::inverse_gamma);
    CHECK_THROWS_AS(exponent_mode_from_string("sideways"), ParameterError);
  }
}
