#include "slln_lab/evt_process.hpp"

#include <algorithm>
#include <cmath>

#include "slln_lab/errors.hpp"
#include "slln_lab/moments.hpp"
#include "slln_lab/sampling.hpp"

namespace slln {

namespace {

void require_kmax(std::size_t k_max) {
  if (k_max < 2) throw ParameterError("k_max must be at least 2");
}

// sum_{j<k} df(j) s_{j,k}, by m_{k+1} = (m_k + df(k)) k/(k+gamma).
double centering_sum(const EvtProcessParams& p, std::size_t k) {
  double m = 0.0;
  for (std::size_t h = 1; h < k; ++h) {
    const double x = static_cast<double>(h);
    m = (m + p.f.delta(h)) * (x / (x + p.gamma));
  }
  return m;
}

}  // namespace

void EvtProcessParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
  if (L < 1) throw ParameterError("L must be at least 1");
  if (!(delta > 0.0 && delta < 3.0)) throw ParameterError("delta must lie in (0, 3)");
  if (f(0) != 0.0) throw ParameterError("weight function must satisfy f(0) = 0");
}

EvtProcessParams EvtProcessParams::power_case(double tau, double gamma, double delta,
                                              std::size_t L) {
  EvtProcessParams p;
  p.gamma = gamma;
  p.f = WeightFunction::power(tau);
  p.alpha = ScalingRule::power(1.0 - tau);
  p.delta = delta;
  p.L = L;
  p.validate();
  return p;
}

std::string to_string(WkScale scale) {
  switch (scale) {
    case WkScale::normalized:
      return "normalized";
    case WkScale::raw:
      return "raw";
    case WkScale::hill_matched:
      return "hill_matched";
  }
  return "normalized";
}

WkScale wk_scale_from_string(const std::string& name) {
  if (name == "normalized") return WkScale::normalized;
  if (name == "raw") return WkScale::raw;
  if (name == "hill_matched" || name == "hill") return WkScale::hill_matched;
  throw ParameterError("unknown path scale '" + name + "'");
}

WkPath wk_from_exponentials(std::span<const double> exponentials, const EvtProcessParams& params,
                            std::size_t k_max, WkScale scale) {
  require_kmax(k_max);
  params.validate();
  const std::size_t last = scale == WkScale::hill_matched ? k_max + 1 : k_max;
  if (exponentials.size() < last - 1) {
    throw ParameterError("need " + std::to_string(last - 1) + " exponentials");
  }
  if (params.f.domain_end() < last) throw ParameterError("weight table too short for k_max");

  WkPath path;
  path.k_max = k_max;
  path.scale = scale;
  path.values.assign(k_max, 0.0);

  double sigma = 0.0;  // sum_{j<k} df(j) S_{j,k}
  double w = 0.0;      // W_k
  for (std::size_t k = 2; k <= last; ++k) {
    const double h = static_cast<double>(k - 1);
    const double t = -params.gamma * exponentials[k - 2] / h;
    const double d = std::exp(t);
    const double f_prev = params.f(k - 1);
    sigma = (sigma + params.f.delta(k - 1)) * d;
    w = d * w - f_prev * std::expm1(t);
    switch (scale) {
      case WkScale::normalized:
        path.values[k - 1] = sigma / params.f(k);
        break;
      case WkScale::raw:
        path.values[k - 1] = w;
        break;
      case WkScale::hill_matched:
        // W_k / f(k-1) belongs to entry k-1
        path.values[k - 2] = w / f_prev;
        break;
    }
  }
  return path;
}

WkPath simulate_wk(SeededStream& stream, const EvtProcessParams& params, std::size_t k_max,
                   WkScale scale) {
  require_kmax(k_max);
  const std::uint64_t seed = stream.seed();
  const std::size_t needed = scale == WkScale::hill_matched ? k_max : k_max - 1;
  const auto e = draw_exponentials(stream, needed);
  WkPath path = wk_from_exponentials(e, params, k_max, scale);
  path.seed = seed;
  return path;
}

WkPath sk_star_from_exponentials(std::span<const double> exponentials,
                                 const EvtProcessParams& params, std::size_t k_max) {
  require_kmax(k_max);
  params.validate();
  if (exponentials.size() < k_max - 1) {
    throw ParameterError("need " + std::to_string(k_max - 1) + " exponentials");
  }
  WkPath path;
  path.k_max = k_max;
  path.scale = WkScale::normalized;
  path.values.assign(k_max, 0.0);
  double sigma = 0.0;
  double centre = 0.0;
  for (std::size_t k = 2; k <= k_max; ++k) {
    const double h = static_cast<double>(k - 1);
    const double df = params.f.delta(k - 1);
    sigma = (sigma + df) * std::exp(-params.gamma * exponentials[k - 2] / h);
    centre = (centre + df) * (h / (h + params.gamma));
    path.values[k - 1] = params.alpha(k) * (sigma - centre) / static_cast<double>(k);
  }
  return path;
}

WkPath simulate_sk_star(SeededStream& stream, const EvtProcessParams& params, std::size_t k_max) {
  require_kmax(k_max);
  const std::uint64_t seed = stream.seed();
  const auto e = draw_exponentials(stream, k_max - 1);
  WkPath path = sk_star_from_exponentials(e, params, k_max);
  path.seed = seed;
  return path;
}

double mu_k(const EvtProcessParams& params, std::size_t k) {
  if (k < 2) throw IndexError("mu_k requires k >= 2");
  params.validate();
  return params.alpha(k) * centering_sum(params, k) / static_cast<double>(k);
}

double expected_wk(const EvtProcessParams& params, std::size_t k, WkScale scale) {
  params.validate();
  if (k < 1) throw IndexError("k must be at least 1");
  switch (scale) {
    case WkScale::normalized:
      return centering_sum(params, k) / params.f(k);
    case WkScale::raw:
      return k == 1 ? 0.0 : params.f(k - 1) - centering_sum(params, k);
    case WkScale::hill_matched:
      return (params.f(k) - centering_sum(params, k + 1)) / params.f(k);
  }
  return 0.0;
}

double var_sk_star(const EvtProcessParams& params, std::size_t k) {
  if (k < 2) throw IndexError("var_sk_star requires k >= 2");
  params.validate();
  const MomentOracle oracle(params.gamma, k);
  double total = 0.0;
  double m = 0.0;  // sum_{i<j} df(i) s_{i,j}
  for (std::size_t j = 1; j < k; ++j) {
    const double df = params.f.delta(j);
    total += df * oracle.var(j, k) * (df + 2.0 * m);
    const double x = static_cast<double>(j);
    m = (m + df) * (x / (x + params.gamma));
  }
  const double a = params.alpha(k);
  return a * a * total;
}

MuLimit mu_limit(const EvtProcessParams& params, std::size_t k0, std::size_t k_cap,
                 double tolerance) {
  params.validate();
  if (k0 < 2 || k_cap < 4 * k0) throw ParameterError("mu_limit needs k0 >= 2 and k_cap >= 4 k0");
  MuLimit out;
  if (const auto tau = params.f.tau()) {
    out.tau_over_tau_plus_gamma = *tau / (*tau + params.gamma);
    out.tau_over_gamma_plus_one = *tau / (params.gamma + 1.0);
  }

  std::vector<double> extrapolated;
  for (std::size_t k = k0; k <= k_cap; k *= 2) {
    out.trace.emplace_back(k, mu_k(params, k));
    const std::size_t m = out.trace.size();
    if (m < 3) continue;
    const double v0 = out.trace[m - 3].second;
    const double v1 = out.trace[m - 2].second;
    const double v2 = out.trace[m - 1].second;
    const double d1 = v1 - v0;
    const double d2 = v2 - v1;
    double ext = v2;
    if (d1 != 0.0 && d2 != 0.0) {
      const double r = d2 / d1;
      if (r > 0.0 && r < 0.95) ext = v2 + d2 * r / (1.0 - r);
    }
    extrapolated.push_back(ext);
    if (extrapolated.size() >= 2) {
      out.error_estimate = std::abs(extrapolated.back() - extrapolated[extrapolated.size() - 2]);
      if (out.error_estimate <= tolerance * std::max(1.0, std::abs(ext))) break;
    }
  }

  // Divergence: successive increments not shrinking over the last doublings.
  const std::size_t m = out.trace.size();
  if (m >= 4) {
    int growing = 0;
    for (std::size_t i = m - 3; i < m; ++i) {
      const double d_prev = std::abs(out.trace[i - 1].second - out.trace[i - 2].second);
      const double d_cur = std::abs(out.trace[i].second - out.trace[i - 1].second);
      const double scale = std::max(1.0, std::abs(out.trace[i].second));
      if (d_cur >= 0.95 * d_prev && d_cur > 1e-9 * scale) ++growing;
    }
    if (growing == 3) out.diverging = true;
  }
  if (!std::isfinite(out.trace.back().second)) out.diverging = true;
  if (!out.diverging) {
    out.value = extrapolated.empty() ? out.trace.back().second : extrapolated.back();
  }
  return out;
}

}  // namespace slln
