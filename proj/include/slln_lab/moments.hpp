#pragma once

#include <cstddef>
#include <vector>

namespace slln {

// Block factors S_{j,k} = exp(-gamma sum_{h=j}^{k-1} E_h / h) for iid unit
// exponentials E_h. Since E exp(-t E) = 1/(1+t), their moments are products of
// h/(h+gamma) and everything below is exact.

/// s_{j,k} = E S_{j,k} = prod_{h=j}^{k-1} h / (h + gamma); 1 <= j <= k.
double s_jk(std::size_t j, std::size_t k, double gamma);

/// Var S_{j,k} = s_{j,k}(2 gamma) - s_{j,k}(gamma)^2.
double var_S(std::size_t j, std::size_t k, double gamma);

/// Cov(S_{i,k}, S_{j,k}) for i <= j <= k; equals s_{i,j} Var S_{j,k} >= 0.
double cov_S(std::size_t i, std::size_t j, std::size_t k, double gamma);

struct NewmanBound {
  double exact = 0.0;           // gamma^2 sum_{h=j}^{k-1} h^-2
  double stated_bound = 0.0;    // gamma^2 / j
  double integral_bound = 0.0;  // gamma^2 / (j-1), what the integral comparison gives
};

/// Covariance of the exponents gamma sum E_h/h over [j, k), which bounds
/// |Cov(S_{i,k}, S_{j,k})| for i <= j.  Requires 2 <= j <= k.
NewmanBound newman_bound(std::size_t j, std::size_t k, double gamma);

/**
 * Cached exact moments for a fixed gamma and all indices up to k_max.
 *
 * Keeps suffix sums of log(h/(h+gamma)) and log1p(gamma^2/(h(h+2gamma))), so
 * every s, Var and Cov lookup is O(1). Immutable after construction and safe
 * for concurrent reads.
 */
class MomentOracle {
 public:
  MomentOracle(double gamma, std::size_t k_max);

  double gamma() const noexcept { return gamma_; }
  std::size_t k_max() const noexcept { return k_max_; }

  double s(std::size_t j, std::size_t k) const;
  double var(std::size_t j, std::size_t k) const;
  double cov(std::size_t i, std::size_t j, std::size_t k) const;

 private:
  void check(std::size_t j, std::size_t k) const;

  double gamma_;
  std::size_t k_max_;
  // log_s_[h] = sum_{m=h}^{k_max-1} log(m/(m+gamma)); log_r_ likewise for the
  // second-moment ratio (h+gamma)^2 / (h(h+2gamma)).
  std::vector<double> log_s_;
  std::vector<double> log_r_;
};

}  // namespace slln
