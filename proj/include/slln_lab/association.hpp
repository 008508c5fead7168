#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slln_lab/covariance.hpp"
#include "slln_lab/rng.hpp"

namespace slln {

/// Centred, unit-variance marginals.
enum class IidDist { normal, exponential, uniform, rademacher };

std::string to_string(IidDist d);
IidDist iid_dist_from_string(const std::string& s);

/// Lower-triangular factor L with L L^T = C, row-major n x n.
struct GaussianFactor {
  std::size_t n = 0;
  std::vector<double> lower;
};

/**
 * Semidefinite Cholesky. Zero pivots are allowed when the remaining column
 * vanishes as well. Throws DecompositionError naming (row, col) for an
 * asymmetric matrix, a negative entry (when `require_nonnegative`), a negative
 * pivot, or a zero pivot with a non-zero column.
 */
GaussianFactor semidefinite_cholesky(const std::vector<double>& matrix, std::size_t n,
                                     bool require_nonnegative = true);

struct FactorCache;

class AssocGenerator {
 public:
  struct Iid {
    IidDist dist = IidDist::normal;
  };
  struct Gaussian {
    std::function<double(std::size_t, std::size_t)> rho;  // 1-based
    std::string label;
    std::shared_ptr<FactorCache> cache;
  };
  /// X_i = map(i, Y_i) with every map(i, .) monotone in the same direction.
  struct Transform {
    std::shared_ptr<const AssocGenerator> base;
    std::function<double(std::size_t, double)> map;
    bool increasing = true;
    std::string label;
  };
  /// X_k = xi_1 + ... + xi_k for iid xi.
  struct PartialSums {
    IidDist dist = IidDist::normal;
  };
  /// Multinomial cell counts minus their mean, `trials` draws over n equally
  /// likely cells. Negatively associated: cross-covariances are -trials/n^2.
  struct Multinomial {
    std::size_t trials = 0;
  };
  using Kind = std::variant<Iid, Gaussian, Transform, PartialSums, Multinomial>;

  static AssocGenerator iid(IidDist dist = IidDist::normal);
  static AssocGenerator gaussian(std::function<double(std::size_t, std::size_t)> rho,
                                 std::string label = "gaussian");
  /// Gaussian with a fixed n x n correlation matrix (row-major).
  static AssocGenerator gaussian_matrix(std::vector<double> matrix, std::size_t n);
  static AssocGenerator transform(AssocGenerator base, std::function<double(std::size_t, double)> map,
                                  bool increasing = true, std::string label = "transform");
  static AssocGenerator partial_sums(IidDist dist = IidDist::normal);
  static AssocGenerator multinomial(std::size_t trials);

  const Kind& kind() const noexcept { return kind_; }
  std::string label() const;
  /// True for the negatively associated construction.
  bool negatively_associated() const noexcept;
  /// Largest supported n (fixed-matrix gaussians), otherwise SIZE_MAX.
  std::size_t max_n() const noexcept { return max_n_; }

 private:
  explicit AssocGenerator(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
  std::size_t max_n_ = static_cast<std::size_t>(-1);
};

/// One realization of length n. Gaussian factors are cached per n.
std::vector<double> generate(const AssocGenerator& gen, SeededStream& stream, std::size_t n);

/// R x n row-major matrix; row r uses SeededStream(base_seed + r).
std::vector<double> generate_replications(const AssocGenerator& gen, std::uint64_t base_seed,
                                          std::size_t replications, std::size_t n);

/// Unbiased covariances of the columns of an R x n row-major sample matrix,
/// with standard errors sqrt((m4 - c^2) / R). Throws ParameterError if R < 2.
CovarianceModel empirical_cov_model(const std::vector<double>& samples, std::size_t replications,
                                    std::size_t n);

using PairSampler = std::function<std::pair<double, double>(SeededStream&)>;

struct SmoothMap {
  std::function<double(double)> fn;
  double derivative_sup = 1.0;  // sup |fn'|
  std::string label;
};

struct NewmanLemmaCheck {
  std::size_t reps = 0;
  double cov_fg = 0.0;  // Cov(f(X), g(Y))
  double se_fg = 0.0;
  double cov_xy = 0.0;  // Cov(X, Y)
  double se_xy = 0.0;
  double bound = 0.0;   // sup|f'| sup|g'| Cov(X, Y)
  double z = 0.0;       // (|cov_fg| - bound) / combined SE
  bool holds = false;   // |cov_fg| <= bound + 3 combined SE
};

/// Monte Carlo check of |Cov(f(X), g(Y))| <= sup|f'| sup|g'| Cov(X, Y).
/// Replication i uses SeededStream(base_seed + i). Throws ParameterError if reps < 1000.
NewmanLemmaCheck check_newman_lemma(const PairSampler& sampler, const SmoothMap& f,
                                    const SmoothMap& g, std::size_t reps,
                                    std::uint64_t base_seed = 0);

/// Square matrix from a CSV file (comma separated, no header, '#' comments).
std::vector<double> load_matrix_csv(const std::string& path, std::size_t& n);

}  // namespace slln
