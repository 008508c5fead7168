#include "slln_lab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slln_lab/errors.hpp"

namespace slln {

namespace {

void require_nonempty(std::size_t n) {
  if (n == 0) throw EmptyRequestError("requested zero variates");
}

// p and b must vanish at 0; checked along u = 10^-m.
void check_vanishing(const std::function<double(double)>& fn, const char* name) {
  if (!fn) return;
  constexpr int kPoints = 15;
  double last = 0.0;
  double tail_max = 0.0;
  for (int m = 1; m <= kPoints; ++m) {
    const double v = fn(std::pow(10.0, -m));
    if (!std::isfinite(v)) {
      throw ParameterError(std::string(name) + "(u) is not finite on the validation grid");
    }
    last = std::abs(v);
    if (m > kPoints - 5) tail_max = std::max(tail_max, last);
  }
  if (last > 0.05 || tail_max > 0.1) {
    throw ParameterError(std::string(name) + "(u) does not vanish as u -> 0");
  }
}

}  // namespace

bool OrderStatSample::is_sorted() const { return std::is_sorted(values.begin(), values.end()); }

std::string to_string(ExponentMode mode) {
  return mode == ExponentMode::gamma ? "gamma" : "inverse_gamma";
}

ExponentMode exponent_mode_from_string(const std::string& name) {
  if (name == "gamma") return ExponentMode::gamma;
  if (name == "inverse_gamma") return ExponentMode::inverse_gamma;
  throw ParameterError("unknown exponent mode '" + name + "'");
}

void QuantileRep::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("c must be positive");
  if (!std::isfinite(y0)) throw ParameterError("y0 must be finite");
  check_vanishing(p, "p");
  check_vanishing(b, "b");
  if (p) {
    for (int m = 1; m <= 15; ++m) {
      if (!(1.0 + p(std::pow(10.0, -m)) > 0.0)) {
        throw ParameterError("1 + p(u) must stay positive");
      }
    }
  }
}

double QuantileRep::tail_distance(double u) const {
  double q = c * std::pow(u, exponent());
  if (p) q *= 1.0 + p(u);
  if (b && u < 1.0) {
    auto integrand = [this](double t) { return b(t) / t; };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, u, 1.0, 15, 1e-8);
    q *= std::exp(integral);
  }
  return q;
}

std::vector<double> draw_exponentials(SeededStream& stream, std::size_t n) {
  require_nonempty(n);
  std::vector<double> out(n);
  for (auto& e : out) e = stream.next_exponential();
  return out;
}

OrderStatSample uniform_order_stats(SeededStream& stream, std::size_t n) {
  require_nonempty(n);
  std::vector<double> log_u(n);
  log_u[n - 1] = std::log(stream.next_uniform()) / static_cast<double>(n);
  // log_u[j-1] holds log U_{j,n}
  for (std::size_t j = n - 1; j >= 1; --j) {
    log_u[j - 1] = log_u[j] - stream.next_exponential() / static_cast<double>(j);
  }
  OrderStatSample out;
  out.values.resize(n);
  std::transform(log_u.begin(), log_u.end(), out.values.begin(),
                 [](double x) { return std::exp(x); });
  return out;
}

OrderStatSample sample_weibull_domain(SeededStream& stream, std::size_t n,
                                      const QuantileRep& rep) {
  rep.validate();
  const OrderStatSample u = uniform_order_stats(stream, n);
  OrderStatSample out;
  out.values.resize(n);
  // Y_{n-j+1,n} = G^{-1}(1 - U_{j,n})
  for (std::size_t j = 0; j < n; ++j) {
    out.values[n - 1 - j] = rep.quantile_upper(u.values[j]);
  }
  if (rep.p || rep.b) std::sort(out.values.begin(), out.values.end());
  return out;
}

}  // namespace slln
