#include "slln_lab/moments.hpp"

#include <cmath>
#include <string>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "slln_lab/errors.hpp"

namespace slln {

namespace {

constexpr std::size_t kDirectRange = 4096;

void check_indices(std::size_t j, std::size_t k) {
  if (j < 1 || j > k) {
    throw IndexError("need 1 <= j <= k (j = " + std::to_string(j) + ", k = " +
                     std::to_string(k) + ")");
  }
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

double log_s_direct(std::size_t j, std::size_t k, double gamma) {
  CompensatedSum acc;
  for (std::size_t h = j; h < k; ++h) acc.add(-std::log1p(gamma / static_cast<double>(h)));
  return acc.value();
}

// log of prod_{h=j}^{k-1} (h+gamma)^2 / (h (h+2 gamma)), i.e. s(2g)/s(g)^2.
double log_second_moment_ratio(std::size_t j, std::size_t k, double gamma) {
  CompensatedSum acc;
  for (std::size_t h = j; h < k; ++h) {
    const double x = static_cast<double>(h);
    acc.add(std::log1p(gamma * gamma / (x * (x + 2.0 * gamma))));
  }
  return acc.value();
}

}  // namespace

double s_jk(std::size_t j, std::size_t k, double gamma) {
  check_indices(j, k);
  check_gamma(gamma);
  if (j == k) return 1.0;
  if (k - j <= kDirectRange) return std::exp(log_s_direct(j, k, gamma));
  // Gamma(k) Gamma(j+g) / (Gamma(j) Gamma(k+g))
  const double num = boost::math::tgamma_delta_ratio(static_cast<double>(k), gamma);
  const double den = boost::math::tgamma_delta_ratio(static_cast<double>(j), gamma);
  if (num > 0.0 && den > 0.0 && std::isfinite(num) && std::isfinite(den)) return num / den;
  return std::exp(std::lgamma(static_cast<double>(k)) - std::lgamma(k + gamma) -
                  std::lgamma(static_cast<double>(j)) + std::lgamma(j + gamma));
}

double var_S(std::size_t j, std::size_t k, double gamma) {
  check_indices(j, k);
  check_gamma(gamma);
  if (j == k) return 0.0;
  const double s = s_jk(j, k, gamma);
  return s * s * std::expm1(log_second_moment_ratio(j, k, gamma));
}

double cov_S(std::size_t i, std::size_t j, std::size_t k, double gamma) {
  if (i > j) throw IndexError("cov_S requires i <= j");
  check_indices(i, k);
  check_indices(j, k);
  return s_jk(i, j, gamma) * var_S(j, k, gamma);
}

NewmanBound newman_bound(std::size_t j, std::size_t k, double gamma) {
  check_gamma(gamma);
  if (j < 2 || j > k) throw IndexError("newman_bound requires 2 <= j <= k");
  NewmanBound out;
  const double g2 = gamma * gamma;
  out.stated_bound = g2 / static_cast<double>(j);
  out.integral_bound = g2 / static_cast<double>(j - 1);
  if (j == k) return out;
  double sum;
  if (k - j <= kDirectRange) {
    CompensatedSum acc;
    for (std::size_t h = k - 1; h >= j; --h) {
      const double x = static_cast<double>(h);
      acc.add(1.0 / (x * x));
    }
    sum = acc.value();
  } else {
    sum = boost::math::trigamma(static_cast<double>(j)) -
          boost::math::trigamma(static_cast<double>(k));
  }
  out.exact = g2 * sum;
  return out;
}

MomentOracle::MomentOracle(double gamma, std::size_t k_max)
    : gamma_(gamma), k_max_(k_max), log_s_(k_max + 1, 0.0), log_r_(k_max + 1, 0.0) {
  check_gamma(gamma);
  if (k_max < 1) throw ParameterError("MomentOracle needs k_max >= 1");
  CompensatedSum acc_s;
  CompensatedSum acc_r;
  for (std::size_t h = k_max - 1; h >= 1; --h) {
    const double x = static_cast<double>(h);
    acc_s.add(-std::log1p(gamma / x));
    acc_r.add(std::log1p(gamma * gamma / (x * (x + 2.0 * gamma))));
    log_s_[h] = acc_s.value();
    log_r_[h] = acc_r.value();
  }
}

void MomentOracle::check(std::size_t j, std::size_t k) const {
  check_indices(j, k);
  if (k > k_max_) {
    throw IndexError("k = " + std::to_string(k) + " exceeds oracle range " +
                     std::to_string(k_max_));
  }
}

double MomentOracle::s(std::size_t j, std::size_t k) const {
  check(j, k);
  return j == k ? 1.0 : std::exp(log_s_[j] - log_s_[k]);
}

double MomentOracle::var(std::size_t j, std::size_t k) const {
  check(j, k);
  if (j == k) return 0.0;
  const double s = std::exp(log_s_[j] - log_s_[k]);
  return s * s * std::expm1(log_r_[j] - log_r_[k]);
}

double MomentOracle::cov(std::size_t i, std::size_t j, std::size_t k) const {
  if (i > j) return cov(j, i, k);
  return s(i, j) * var(j, k);
}

}  // namespace slln
