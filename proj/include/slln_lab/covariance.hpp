#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "slln_lab/evt_process.hpp"
#include "slln_lab/moments.hpp"

namespace slln {

/// Cov(X_i, X_j) = v_i 1{i = j}.
struct IndependentCov {
  std::function<double(std::size_t)> variance;
  std::string label;
};

/// Cov(X_i, X_j) = rho(|i - j|), rho(0) = Var X_1.
struct StationaryCov {
  std::function<double(std::size_t)> rho;
  std::string label;
};

struct GeneralCov {
  std::function<double(std::size_t, std::size_t)> cov;
  std::string label;
};

/// Sample covariance matrix (row-major, n x n) with entrywise standard errors.
struct EmpiricalCov {
  std::size_t n = 0;
  std::size_t replications = 0;
  bool low_precision = false;  // fewer than 30 replications
  std::vector<double> cov;
  std::vector<double> se;

  double at(std::size_t i, std::size_t j) const { return cov[(i - 1) * n + (j - 1)]; }
  double se_at(std::size_t i, std::size_t j) const { return se[(i - 1) * n + (j - 1)]; }
};

/**
 * Triangular array X_{i,k} = alpha(k) df(i) (S_{i,k} - s_{i,k}), i < k, with
 * exact covariances. X_{i,k} = 0 for i >= k. Sums ending at index n are taken
 * in row k = n + 1, so sum_{i<=q} X_{i,q+1} = S*_{q+1}.
 */
struct EvtOracleCov {
  EvtProcessParams params;
  std::shared_ptr<const MomentOracle> oracle;
  std::size_t max_index = 0;
};

class CovarianceModel {
 public:
  using Kind = std::variant<IndependentCov, StationaryCov, GeneralCov, EmpiricalCov, EvtOracleCov>;

  static CovarianceModel independent(std::function<double(std::size_t)> variance,
                                     std::string label = "independent");
  static CovarianceModel stationary(std::function<double(std::size_t)> rho,
                                    std::string label = "stationary");
  static CovarianceModel general(std::function<double(std::size_t, std::size_t)> cov,
                                 std::string label = "general");
  static CovarianceModel empirical(EmpiricalCov data);
  /// Oracle for sums up to `max_index`; max_index() is rounded up to the end of
  /// the enclosing square block (q+1)^2.
  static CovarianceModel evt_oracle(const EvtProcessParams& params, std::size_t max_index);

  const Kind& kind() const noexcept { return kind_; }
  std::string kind_name() const;
  std::string label() const;
  bool row_dependent() const noexcept { return std::holds_alternative<EvtOracleCov>(kind_); }
  std::size_t max_index() const noexcept;
  double scale() const noexcept { return scale_; }
  bool drops_negative() const noexcept { return drop_negative_; }

  /// Cov(X_i, X_j), 1-based; `row` is only read by the evt_oracle kind.
  double cov(std::size_t i, std::size_t j, std::size_t row = 0) const;

  /// Same model with every covariance multiplied by c > 0.
  CovarianceModel scaled(double c) const;

 private:
  friend CovarianceModel drop_negative_covariances(CovarianceModel model);

  explicit CovarianceModel(Kind kind) : kind_(std::move(kind)) {}
  double raw_cov(std::size_t i, std::size_t j, std::size_t row) const;

  Kind kind_;
  double scale_ = 1.0;
  bool drop_negative_ = false;
};

/// Off-diagonal covariances replaced by max(cov, 0): for negatively dependent
/// sequences this yields an upper bound on every partial-sum variance.
CovarianceModel drop_negative_covariances(CovarianceModel model);

/// Var(sum_{i=first}^{j} X_i) for j = first..last.
std::vector<double> block_variance_profile(const CovarianceModel& model, std::size_t first,
                                           std::size_t last, std::size_t row = 0);

/// sum_{i<=n} w[i-1] Cov(X_i, S_n), evt rows at n + 1.
double weighted_cov_with_sum(const CovarianceModel& model, const std::vector<double>& w,
                             std::size_t n);

}  // namespace slln
