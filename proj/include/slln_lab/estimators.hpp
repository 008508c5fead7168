#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slln_lab/sampling.hpp"
#include "slln_lab/weight.hpp"

namespace slln {

struct HillEstimate {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string weight;            // WeightFunction::label()
  double statistic = 0.0;        // T_n(f)
  std::optional<double> ratio;   // T_n(f) / (y0 - log X_{n-k,n})
};

/**
 * Functional Hill statistic on a sample of log-observations:
 *
 *   T_n(f) = (1/f(k)) sum_{j=1}^{k} f(j) (log X_{n-j+1,n} - log X_{n-j,n}).
 *
 * Uses the top k+1 order statistics. Ties give zero spacings and are allowed.
 * Throws IndexError unless 1 <= k < n, ContractViolation on unsorted input.
 */
HillEstimate hill_functional(const OrderStatSample& log_sample, std::size_t k,
                             const WeightFunction& f);

/// T_n(f) / (y0 - log X_{n-k,n}); throws EndpointViolation unless y0 > max.
double hill_ratio(const OrderStatSample& log_sample, std::size_t k, const WeightFunction& f,
                  double y0);

/// Statistic (and ratio when y0 is given) for each k; one sortedness check.
std::vector<HillEstimate> hill_sweep(const OrderStatSample& log_sample,
                                     const std::vector<std::size_t>& ks, const WeightFunction& f,
                                     std::optional<double> y0 = std::nullopt);

}  // namespace slln
