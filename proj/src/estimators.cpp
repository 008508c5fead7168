#include "slln_lab/estimators.hpp"

#include <cmath>
#include <string>

#include "slln_lab/errors.hpp"

namespace slln {

namespace {

void check_sample(const OrderStatSample& s) {
  if (!s.is_sorted()) throw ContractViolation("sample must be sorted ascending");
}

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k >= n) {
    throw IndexError("need 1 <= k < n (k = " + std::to_string(k) + ", n = " + std::to_string(n) +
                     ")");
  }
}

double statistic_unchecked(const std::vector<double>& x, std::size_t k, const WeightFunction& f) {
  const std::size_t n = x.size();
  const double fk = f(k);
  if (!(fk > 0.0) || !std::isfinite(fk)) throw ParameterError("f(k) must be positive");
  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const double w = f(j);
    if (!std::isfinite(w)) throw ParameterError("weight f(j) is not finite");
    sum += w * (x[n - j] - x[n - j - 1]);
  }
  return sum / fk;
}

double ratio_unchecked(const std::vector<double>& x, std::size_t k, double statistic, double y0) {
  const std::size_t n = x.size();
  if (!(y0 > x.back())) throw EndpointViolation("y0 must exceed the sample maximum");
  return statistic / (y0 - x[n - k - 1]);
}

}  // namespace

HillEstimate hill_functional(const OrderStatSample& log_sample, std::size_t k,
                             const WeightFunction& f) {
  check_sample(log_sample);
  check_k(k, log_sample.n());
  HillEstimate est;
  est.n = log_sample.n();
  est.k = k;
  est.weight = f.label();
  est.statistic = statistic_unchecked(log_sample.values, k, f);
  return est;
}

double hill_ratio(const OrderStatSample& log_sample, std::size_t k, const WeightFunction& f,
                  double y0) {
  const HillEstimate est = hill_functional(log_sample, k, f);
  return ratio_unchecked(log_sample.values, k, est.statistic, y0);
}

std::vector<HillEstimate> hill_sweep(const OrderStatSample& log_sample,
                                     const std::vector<std::size_t>& ks, const WeightFunction& f,
                                     std::optional<double> y0) {
  check_sample(log_sample);
  std::vector<HillEstimate> out;
  out.reserve(ks.size());
  for (const std::size_t k : ks) {
    check_k(k, log_sample.n());
    HillEstimate est;
    est.n = log_sample.n();
    est.k = k;
    est.weight = f.label();
    est.statistic = statistic_unchecked(log_sample.values, k, f);
    if (y0) est.ratio = ratio_unchecked(log_sample.values, k, est.statistic, *y0);
    out.push_back(std::move(est));
  }
  return out;
}

}  // namespace slln
