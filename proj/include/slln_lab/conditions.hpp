#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slln_lab/covariance.hpp"
#include "slln_lab/evt_process.hpp"
#include "slln_lab/rng.hpp"

namespace slln {

enum class Verdict { bounded, diverging, inconclusive };

/// sup_bounded: the condition is "sup < infinity".
/// vanishing:   the condition is "value -> 0"; `bounded` then means it holds.
enum class Criterion { sup_bounded, vanishing };

std::string to_string(Verdict v);
std::string to_string(Criterion c);
Verdict verdict_from_string(const std::string& s);
Criterion criterion_from_string(const std::string& s);

/**
 * Numerical surrogate for a supremum being finite. The slope is the
 * least-squares slope of log|value| against log(index) over the top half of
 * the grid, the residual is the RMS of that fit.
 *
 *   sup_bounded: bounded   iff slope <= slope_tol and the running sup is finite
 *                diverging iff slope >  slope_tol and residual < residual_tol
 *   vanishing:   bounded   iff slope < -slope_tol (or all values are 0)
 *                diverging iff slope >= -slope_tol and residual < residual_tol
 *
 * Anything else is inconclusive.
 */
struct VerdictRule {
  double slope_tol = 0.02;
  double residual_tol = 0.05;
};

struct GridPoint {
  std::size_t index = 0;
  double value = 0.0;

  bool operator==(const GridPoint&) const = default;
};

struct ConditionReport {
  std::string condition_id;
  std::map<std::string, double> parameters;
  std::string model;  // label of the covariance model or rule
  Criterion criterion = Criterion::sup_bounded;
  std::vector<GridPoint> grid;
  double running_sup = 0.0;
  double loglog_slope = 0.0;
  double fit_residual = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

/// Fills running_sup, slope, residual and verdict from `report.grid`.
void finalize_report(ConditionReport& report, const VerdictRule& rule = {});

/// Sorted distinct integers ceil(1.25^m) in [from, to]. The upper end is not
/// forced into the grid, so grids for larger `to` extend smaller ones.
std::vector<std::size_t> geometric_grid(std::size_t from, std::size_t to, double ratio = 1.25);

struct GcipReports {
  ConditionReport prefix;  // Var(sum_{i<=q} X_i) / q^{(3-delta)/2}
  ConditionReport blocks;  // max over square blocks / q^{3-delta}

  /// diverging if either diverges, bounded if both are bounded.
  Verdict combined() const;
};

/**
 * Prefix report over q <= q_max, block report over q <= sqrt(q_max):
 * for q^2+1 <= k <= (q+1)^2, sup_{j<=k} Var(sum_{i=q^2+1}^{j} X_i) / q^{3-delta}.
 * Throws ParameterError unless 0 < delta < 3 and q_max >= 10.
 */
GcipReports eval_gcip(const CovarianceModel& model, double delta, std::size_t q_max,
                      const VerdictRule& rule = {});

/// sum_{i<=n} b_i^{-r} Cov(X_i, S_n) for n <= n_max. Throws ContractViolation
/// if b is not positive and non-decreasing on 1..n_max.
ConditionReport eval_gchr(const CovarianceModel& model, const std::function<double(std::size_t)>& b,
                          double r, std::size_t n_max, const VerdictRule& rule = {},
                          const std::string& b_label = "b");

/// sum_{i<=n} Var(X_i) / i^2.
ConditionReport eval_kolmogorov(const CovarianceModel& model, std::size_t n_max,
                                const VerdictRule& rule = {});

/// n^{-(1+nu)} sum_{i<=n} Var(X_i).
ConditionReport eval_variance_growth(const CovarianceModel& model, double nu, std::size_t n_max,
                                     const VerdictRule& rule = {});

/// sum_{j=2}^{n} Cov(X_1, X_j) = sum_{l=1}^{n-1} rho(l) for a stationary model.
ConditionReport eval_covariance_series(const CovarianceModel& model, std::size_t n_max,
                                       const VerdictRule& rule = {});

struct Sigma2Result {
  std::optional<double> value;  // rho(0) + 2 sum_{l>=1} rho(l); empty if diverging
  bool diverging = false;
  bool converged = false;       // tail estimate below tolerance
  double tail_estimate = 0.0;
  std::size_t terms = 0;
};

/// Sums rho over dyadic blocks, extrapolating the tail from the ratio of
/// consecutive blocks. Stationary models only.
Sigma2Result eval_newman_sigma2(const CovarianceModel& model, double tolerance = 1e-8,
                                std::size_t max_terms = std::size_t{1} << 26);

/// (1/n) sum_{j=1}^{n} rho(j-1), vanishing criterion. Stationary models only.
ConditionReport eval_cesaro(const CovarianceModel& model, std::size_t n_max,
                            const VerdictRule& rule = {});

/// q^{-nu} [rho(0) + (2/q) sum_{i=2}^{q} (q-i+1) rho(i-1)]. Stationary models only.
ConditionReport eval_q2(const CovarianceModel& model, double nu, std::size_t q_max,
                        const VerdictRule& rule = {});

/// sum_{i<=n} i^{-2} Cov(X_i, S_i); evt rows at n + 1.
ConditionReport eval_birkel(const CovarianceModel& model, std::size_t n_max,
                            const VerdictRule& rule = {});

/**
 * The five sufficient conditions for S*_k / k -> 0, evaluated exactly:
 *
 *   evt_diag_variance    alpha^2(k) k^{-(2 gamma+1+nu)} sum_{j=L}^{k-1} df(j)^2 j^{2 gamma}
 *   evt_cross_cov        alpha^2(k) k^{-(1+nu)} sum_{j=L+1}^{k-1} [sum_{i=L}^{j-1} df(i)] df(j)/j
 *   evt_cross_mean       alpha^2(k) k^{-(1+nu)} sum_{j=L}^{k-1} df(j)/j
 *   evt_block_variance   sup_{q^2<k<=(q+1)^2} alpha^2(k) q^{-(3-delta)}
 *                          sum_{i=1}^{2q+1} df(q^2+i)^2 ((q^2+i)/k)^{2 gamma}
 *   evt_block_cross_cov  sup_{q^2<k<=(q+1)^2} alpha^2(k) q^{-(3-delta)}
 *                          sum_{j=2}^{2q+1} [sum_{i<j} df(q^2+i)] df(q^2+j)/(q^2+j)
 *
 * The first three use k in [L, k_max], the block conditions q^2 >= L and
 * q <= sqrt(k_max). Throws ParameterError if k_max < L^2 or L >= k_max.
 */
std::array<ConditionReport, 5> eval_evt_conditions(const EvtProcessParams& params,
                                                   std::size_t k_max, const VerdictRule& rule = {});

using PathSampler = std::function<std::vector<double>(SeededStream&, std::size_t n)>;

struct MaxVarLambda {
  double lambda = 0.0;
  double exceed_prob = 0.0;  // P(max_{l<=n} |S_l| >= lambda)
  double ratio = 0.0;        // lambda^r P / Var(S_n)
  double se = 0.0;           // binomial standard error of ratio
};

struct MaxVarProbe {
  double r = 2.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  double var_sn = 0.0;         // known or estimated Var(S_n)
  bool var_known = false;
  bool degenerate = false;     // Var(S_n) = 0, ratios undefined
  double constant = 0.0;       // sup over lambda of the ratio
  double constant_se = 0.0;    // standard error at the maximizing lambda
  double argmax_lambda = 0.0;
  double emax_ratio = 0.0;     // E[(max_{l<=n} |S_l|)^2] / Var(S_n)
  double emax_se = 0.0;
  std::vector<MaxVarLambda> per_lambda;
};

/// Monte Carlo estimate of the maximal-inequality constant. Replication i
/// draws from SeededStream(base_seed + i). Throws ParameterError if reps < 1000.
MaxVarProbe maxvar_probe(const PathSampler& sampler, double r, std::size_t n,
                         const std::vector<double>& lambda_grid, std::size_t reps,
                         std::uint64_t base_seed, std::optional<double> known_variance = {});

}  // namespace slln
