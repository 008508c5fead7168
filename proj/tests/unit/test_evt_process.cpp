#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "slln_lab/errors.hpp"
#include "slln_lab/evt_process.hpp"
#include "slln_lab/moments.hpp"
#include "slln_lab/sampling.hpp"

using namespace slln;

namespace {

// Brute-force S_{j,k} for j = 1..k from given exponentials.
std::vector<double> block_factors(const std::vector<double>& e, std::size_t k, double g) {
  std::vector<double> S(k + 1, 1.0);
  double acc = 0.0;
  for (std::size_t j = k - 1; j >= 1; --j) {
    acc += e[j - 1] / double(j);
    S[j] = std::exp(-g * acc);
  }
  return S;
}

}  // namespace

TEST_CASE("k = 2 single term has mean 1/2 for f = id, gamma = 1") {
  const EvtProcessParams p = EvtProcessParams::power_case(1.0, 1.0);
  double sum = 0.0, sum2 = 0.0;
  const int R = 100000;
  for (int r = 0; r < R; ++r) {
    SeededStream s(r);
    const double v = simulate_wk(s, p, 2, WkScale::normalized).at(2) * 2.0;  // f(2) = 2
    sum += v;
    sum2 += v * v;
  }
  const double m = sum / R;
  const double se = std::sqrt((sum2 / R - m * m) / R);
  CHECK(std::abs(m - 0.5) <= 3 * se);
}

TEST_CASE("recursions equal brute-force sums") {
  for (double tau : {0.5, 1.0, 2.0}) {
    EvtProcessParams p = EvtProcessParams::power_case(tau, 1.5);
    SeededStream s(3);
    const auto e = draw_exponentials(s, 201);
    const auto norm = wk_from_exponentials(e, p, 200, WkScale::normalized);
    const auto raw = wk_from_exponentials(e, p, 200, WkScale::raw);
    const auto hill = wk_from_exponentials(e, p, 200, WkScale::hill_matched);
    const auto star = sk_star_from_exponentials(e, p, 200);
    for (std::size_t k = 2; k <= 200; ++k) {
      const auto S = block_factors(e, k, p.gamma);
      double sigma = 0.0, w = 0.0, centred = 0.0;
      for (std::size_t j = 1; j < k; ++j) {
        const double df = p.f(j) - p.f(j - 1);
        sigma += df * S[j];
        w += p.f(j) * (S[j + 1] - S[j]);
        centred += df * (S[j] - s_jk(j, k, p.gamma));
      }
      REQUIRE(norm.at(k) == doctest::Approx(sigma / p.f(k)).epsilon(1e-12));
      REQUIRE(raw.at(k) == doctest::Approx(w).epsilon(1e-12));
      REQUIRE(star.at(k) == doctest::Approx(p.alpha(k) * centred / k).epsilon(1e-9).scale(1e-12));
      if (k < 200) {
        // Entry k of the matched scale is W_{k+1}/f(k).
        const auto S1 = block_factors(e, k + 1, p.gamma);
        double w1 = 0.0;
        for (std::size_t j = 1; j <= k; ++j) w1 += p.f(j) * (S1[j + 1] - S1[j]);
        REQUIRE(hill.at(k) == doctest::Approx(w1 / p.f(k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("parameter validation") {
  EvtProcessParams p;
  SeededStream s(1);
  CHECK_THROWS_AS(simulate_wk(s, p, 1), ParameterError);
  p.gamma = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK_THROWS_AS(EvtProcessParams::power_case(1.0, 2.0, 3.0), ParameterError);
  p = EvtProcessParams::power_case(1.0, 2.0);
  p.delta = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  std::vector<double> e(5, 1.0);
  CHECK_THROWS(wk_from_exponentials(e, EvtProcessParams{}, 100, WkScale::normalized));
}

TEST_CASE("scale names round-trip") {
  for (WkScale w : {WkScale::normalized, WkScale::raw, WkScale::hill_matched})
    CHECK(wk_scale_from_string(to_string(w)) == w);
  CHECK_THROWS_AS(wk_scale_from_string("log"), ParameterError);
}

TEST_CASE("mu_k") {
  const EvtProcessParams p = EvtProcessParams::power_case(2.0, 1.0);
  CHECK(mu_k(p, 2) == doctest::Approx(p.alpha(2) * (p.f(1) - p.f(0)) * s_jk(1, 2, 1.0) / 2.0).epsilon(1e-14));
  double direct = 0.0;
  for (std::size_t j = 1; j < 300; ++j) direct += (p.f(j) - p.f(j - 1)) * s_jk(j, 300, 1.0);
  CHECK(mu_k(p, 300) == doctest::Approx(p.alpha(300) * direct / 300).epsilon(1e-11));
  CHECK_THROWS(mu_k(p, 1));
}

TEST_CASE("expected_wk matches the mean of exact factors") {
  const EvtProcessParams p = EvtProcessParams::power_case(1.0, 2.0);
  double sigma = 0.0;
  for (std::size_t j = 1; j < 100; ++j) sigma += s_jk(j, 100, 2.0);
  CHECK(expected_wk(p, 100, WkScale::normalized) == doctest::Approx(sigma / 100).epsilon(1e-12));
  // Hill-matched mean is gamma/(gamma+1) for every k when f = id.
  for (std::size_t k : {5, 100, 1000})
    CHECK(expected_wk(p, k, WkScale::hill_matched) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mu_limit") {
  SUBCASE("f = id, alpha = 1, gamma = 2") {
    const auto m = mu_limit(EvtProcessParams::power_case(1.0, 2.0));
    REQUIRE(m.value);
    CHECK(std::abs(*m.value - 1.0 / 3.0) < 1e-3);
  }
  SUBCASE("tau = 2, gamma = 1") {
    const auto m = mu_limit(EvtProcessParams::power_case(2.0, 1.0));
    REQUIRE(m.value);
    CHECK(std::abs(*m.value - 2.0 / 3.0) < 1e-3);
    REQUIRE(m.tau_over_tau_plus_gamma);
    CHECK(*m.tau_over_tau_plus_gamma == doctest::Approx(2.0 / 3.0));
    CHECK(*m.tau_over_gamma_plus_one == doctest::Approx(1.0));
  }
  SUBCASE("growing normalisation is flagged") {
    EvtProcessParams p = EvtProcessParams::power_case(1.0, 2.0);
    p.alpha = ScalingRule::power(1.0);
    const auto m = mu_limit(p);
    CHECK(m.diverging);
    CHECK_FALSE(m.value);
  }
}

TEST_CASE("centred path") {
  const EvtProcessParams p = EvtProcessParams::power_case(1.0, 2.0);
  SUBCASE("mean zero and variance equals the covariance oracle") {
    const int R = 20000;
    double s100 = 0.0, s100sq = 0.0, s50 = 0.0, s50sq = 0.0, s50_4 = 0.0;
    std::vector<double> v50(R);
    for (int r = 0; r < R; ++r) {
      SeededStream s(10000 + r);
      const auto path = simulate_sk_star(s, p, 100);
      s100 += path.at(100);
      s100sq += path.at(100) * path.at(100);
      v50[r] = path.at(50) * 50.0;
      s50 += v50[r];
    }
    const double m100 = s100 / R;
    CHECK(std::abs(m100) <= 3.0 * std::sqrt((s100sq / R - m100 * m100) / R));
    const double m50 = s50 / R;
    for (double x : v50) {
      const double d = x - m50;
      s50sq += d * d;
      s50_4 += d * d * d * d;
    }
    const double var = s50sq / (R - 1);
    const double se = std::sqrt((s50_4 / R - (s50sq / R) * (s50sq / R)) / R);
    double oracle = 0.0;
    for (std::size_t i = 1; i < 50; ++i)
      for (std::size_t j = 1; j < 50; ++j)
        oracle += cov_S(std::min(i, j), std::max(i, j), 50, 2.0);
    CHECK(var_sk_star(p, 50) == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(std::abs(var - oracle) <= 3.0 * se);
  }
  SUBCASE("median magnitude decreases from k = 1e3 to 1e4") {
    std::vector<double> a, b;
    for (int r = 0; r < 100; ++r) {
      SeededStream s(777 + r);
      const auto path = simulate_sk_star(s, p, 10000);
      a.push_back(std::abs(path.at(1000)));
      b.push_back(std::abs(path.at(10000)));
    }
    std::nth_element(a.begin(), a.begin() + 50, a.end());
    std::nth_element(b.begin(), b.begin() + 50, b.end());
    CHECK(b[50] < a[50]);
  }
}

TEST_CASE("single seeded path is near 1/3 at k = 50, 75, 100") {
  const EvtProcessParams p = EvtProcessParams::power_case(1.0, 2.0);
  SeededStream s(20240521);
  const auto path = simulate_wk(s, p, 100);
  for (std::size_t k : {50, 75, 100}) {
    CHECK(path.at(k) > 0.1);
    CHECK(path.at(k) < 1.0);
  }
}
