#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slln_lab/rng.hpp"
#include "slln_lab/weight.hpp"

namespace slln {

/// Parameters of the weighted exponential-spacing process and its centred,
/// scaled sum S*_k = alpha(k) sum_{j<k} df(j) (S_{j,k} - s_{j,k}).
struct EvtProcessParams {
  double gamma = 2.0;
  WeightFunction f = WeightFunction::identity();
  ScalingRule alpha = ScalingRule::power(0.0);
  std::size_t L = 10;   // cutoff index for the sufficient conditions
  double delta = 0.5;   // 0 < delta < 3

  double nu() const noexcept { return (1.0 - delta) / 2.0; }
  void validate() const;

  /// f(j) = j^tau, alpha(k) = k^{-(tau-1)}.
  static EvtProcessParams power_case(double tau, double gamma, double delta = 0.5,
                                     std::size_t L = 10);
};

enum class WkScale {
  normalized,    // entry k: (1/f(k)) sum_{j<k} df(j) S_{j,k}
  raw,           // entry k: W_k = sum_{j<k} f(j) (S_{j+1,k} - S_{j,k})
  hill_matched,  // entry k: W_{k+1} / f(k), same law as the Hill ratio at k
};

std::string to_string(WkScale scale);
WkScale wk_scale_from_string(const std::string& name);

/// One trajectory; values[k-1] holds entry k, k = 1..k_max (entry 1 is 0 except for hill_matched).
struct WkPath {
  std::uint64_t seed = 0;
  std::size_t k_max = 0;
  WkScale scale = WkScale::normalized;
  std::vector<double> values;

  double at(std::size_t k) const { return values.at(k - 1); }
};

/**
 * Deterministic path from given exponentials E_1, E_2, ... (E[h-1] = E_h).
 *
 * Uses the O(k_max) recursions
 *   Sigma_k = (Sigma_{k-1} + df(k-1)) D_k,
 *   W_k     = D_k W_{k-1} + f(k-1) (1 - D_k),     D_k = exp(-gamma E_{k-1}/(k-1)).
 * Needs k_max - 1 exponentials (k_max for the hill_matched scale).
 */
WkPath wk_from_exponentials(std::span<const double> exponentials, const EvtProcessParams& params,
                            std::size_t k_max, WkScale scale);

/// Draws the exponentials from `stream` and runs wk_from_exponentials.
WkPath simulate_wk(SeededStream& stream, const EvtProcessParams& params, std::size_t k_max,
                   WkScale scale = WkScale::normalized);

/// Centred path: values[k-1] = S*_k / k, with exact term-wise centering.
WkPath simulate_sk_star(SeededStream& stream, const EvtProcessParams& params, std::size_t k_max);

/// Same as simulate_sk_star from given exponentials.
WkPath sk_star_from_exponentials(std::span<const double> exponentials,
                                 const EvtProcessParams& params, std::size_t k_max);

/// mu_k = k^{-1} sum_{j<k} alpha(k) df(j) s_{j,k}. Requires k >= 2.
double mu_k(const EvtProcessParams& params, std::size_t k);

/// Exact expectation of entry k of a path with the given scale.
double expected_wk(const EvtProcessParams& params, std::size_t k, WkScale scale);

/// Exact Var(S*_k) = alpha(k)^2 sum_{i,j<k} df(i) df(j) Cov(S_{i,k}, S_{j,k}).
double var_sk_star(const EvtProcessParams& params, std::size_t k);

struct MuLimit {
  std::optional<double> value;  // empty when divergence was detected
  double error_estimate = 0.0;
  bool diverging = false;
  std::vector<std::pair<std::size_t, double>> trace;  // (k, mu_k)
  // Closed-form candidates, power weights only.
  std::optional<double> tau_over_tau_plus_gamma;
  std::optional<double> tau_over_gamma_plus_one;
};

/// Limit of mu_k from the exact sums on k = k0 2^m, accelerated by Aitken /
/// Richardson extrapolation with an estimated rate.
MuLimit mu_limit(const EvtProcessParams& params, std::size_t k0 = 1000, std::size_t k_cap = 1u << 22,
                 double tolerance = 1e-10);

}  // namespace slln
