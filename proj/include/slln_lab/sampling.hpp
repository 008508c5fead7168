#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "slln_lab/rng.hpp"

namespace slln {

/// Ascending order statistics of one sample.
struct OrderStatSample {
  std::vector<double> values;

  std::size_t n() const noexcept { return values.size(); }
  bool is_sorted() const;
};

enum class ExponentMode {
  gamma,          // y0 - G^{-1}(1-u) = c u^gamma (...)
  inverse_gamma,  // y0 - G^{-1}(1-u) = c u^{1/gamma} (...)
};

std::string to_string(ExponentMode mode);
ExponentMode exponent_mode_from_string(const std::string& name);

/**
 * Quantile representation of a distribution G with finite upper endpoint y0:
 *
 *   y0 - G^{-1}(1-u) = c u^e (1 + p(u)) exp( int_u^1 b(t)/t dt ),  u in (0,1),
 *
 * with e = gamma or 1/gamma depending on `mode`. Empty p or b mean the zero
 * function. The integral is evaluated by adaptive Gauss-Kronrod quadrature to
 * relative tolerance 1e-8.
 */
struct QuantileRep {
  double y0 = 0.0;
  double c = 1.0;
  double gamma = 1.0;
  ExponentMode mode = ExponentMode::gamma;
  std::function<double(double)> p;
  std::function<double(double)> b;

  /// Throws ParameterError on c <= 0, gamma <= 0, non-finite y0, or p/b not
  /// vanishing at 0 on the grid u = 10^-1 .. 10^-15.
  void validate() const;

  double exponent() const noexcept {
    return mode == ExponentMode::gamma ? gamma : 1.0 / gamma;
  }

  /// y0 - G^{-1}(1-u).
  double tail_distance(double u) const;

  /// G^{-1}(1-u).
  double quantile_upper(double u) const { return y0 - tail_distance(u); }
};

/// n iid unit exponentials; the stream counter advances by exactly n.
std::vector<double> draw_exponentials(SeededStream& stream, std::size_t n);

/**
 * Uniform order statistics U_{1,n} <= ... <= U_{n,n}, built top-down:
 * U_{n,n} = V^{1/n} and log U_{j,n} = log U_{j+1,n} - E_j / j, so that the
 * spacings j log(U_{j+1,n}/U_{j,n}) are the iid exponentials E_j.
 */
OrderStatSample uniform_order_stats(SeededStream& stream, std::size_t n);

/// Order statistics of Y = G^{-1}(1-U) for n iid uniforms U; all values < y0.
OrderStatSample sample_weibull_domain(SeededStream& stream, std::size_t n,
                                      const QuantileRep& rep);

}  // namespace slln
