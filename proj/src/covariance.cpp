#include "slln_lab/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slln_lab/errors.hpp"

namespace slln {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clip_off_diagonal(double c, bool clip) { return clip ? std::max(c, 0.0) : c; }

void check_range(const CovarianceModel& model, std::size_t first, std::size_t last) {
  if (first < 1 || last < first) throw IndexError("need 1 <= first <= last");
  if (last > model.max_index()) {
    throw IndexError("index " + std::to_string(last) + " beyond model range " +
                     std::to_string(model.max_index()));
  }
}

}  // namespace

CovarianceModel CovarianceModel::independent(std::function<double(std::size_t)> variance,
                                             std::string label) {
  if (!variance) throw ParameterError("empty variance rule");
  return CovarianceModel(IndependentCov{std::move(variance), std::move(label)});
}

CovarianceModel CovarianceModel::stationary(std::function<double(std::size_t)> rho,
                                            std::string label) {
  if (!rho) throw ParameterError("empty covariance rule");
  if (rho(0) < 0.0) throw ParameterError("rho(0) is a variance and must be non-negative");
  return CovarianceModel(StationaryCov{std::move(rho), std::move(label)});
}

CovarianceModel CovarianceModel::general(std::function<double(std::size_t, std::size_t)> cov,
                                         std::string label) {
  if (!cov) throw ParameterError("empty covariance rule");
  return CovarianceModel(GeneralCov{std::move(cov), std::move(label)});
}

CovarianceModel CovarianceModel::empirical(EmpiricalCov data) {
  if (data.n == 0 || data.cov.size() != data.n * data.n) {
    throw ParameterError("empirical covariance matrix has the wrong size");
  }
  return CovarianceModel(std::move(data));
}

CovarianceModel CovarianceModel::evt_oracle(const EvtProcessParams& params,
                                            std::size_t max_index) {
  params.validate();
  if (max_index < 1) throw ParameterError("max_index must be positive");
  // Extend to the end of the square block containing max_index.
  auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(max_index)));
  while (root * root > max_index) --root;
  const std::size_t last = (root + 1) * (root + 1);
  params.f.validate(std::min(last + 1, params.f.domain_end()));
  if (params.f.domain_end() < last) throw ParameterError("weight table too short for max_index");
  EvtOracleCov kind{params, std::make_shared<const MomentOracle>(params.gamma, last + 1), last};
  return CovarianceModel(std::move(kind));
}

std::string CovarianceModel::kind_name() const {
  return std::visit(Overloaded{[](const IndependentCov&) { return std::string("independent"); },
                               [](const StationaryCov&) { return std::string("stationary"); },
                               [](const GeneralCov&) { return std::string("general"); },
                               [](const EmpiricalCov&) { return std::string("empirical"); },
                               [](const EvtOracleCov&) { return std::string("evt_oracle"); }},
                    kind_);
}

std::string CovarianceModel::label() const {
  return std::visit(Overloaded{[](const IndependentCov& k) { return k.label; },
                               [](const StationaryCov& k) { return k.label; },
                               [](const GeneralCov& k) { return k.label; },
                               [](const EmpiricalCov& k) {
                                 return "empirical(R=" + std::to_string(k.replications) + ")";
                               },
                               [](const EvtOracleCov& k) {
                                 return "evt(gamma=" + std::to_string(k.params.gamma) +
                                        ", f=" + k.params.f.label() + ")";
                               }},
                    kind_);
}

std::size_t CovarianceModel::max_index() const noexcept {
  if (const auto* e = std::get_if<EmpiricalCov>(&kind_)) return e->n;
  if (const auto* e = std::get_if<EvtOracleCov>(&kind_)) return e->max_index;
  return std::numeric_limits<std::size_t>::max();
}

double CovarianceModel::raw_cov(std::size_t i, std::size_t j, std::size_t row) const {
  return std::visit(
      Overloaded{[&](const IndependentCov& k) { return i == j ? k.variance(i) : 0.0; },
                 [&](const StationaryCov& k) { return k.rho(i > j ? i - j : j - i); },
                 [&](const GeneralCov& k) { return k.cov(i, j); },
                 [&](const EmpiricalCov& k) { return k.at(i, j); },
                 [&](const EvtOracleCov& k) {
                   if (row == 0) throw ParameterError("evt_oracle covariance needs a row index");
                   if (std::max(i, j) >= row) return 0.0;
                   const double a = k.params.alpha(row);
                   return a * a * k.params.f.delta(i) * k.params.f.delta(j) *
                          k.oracle->cov(std::min(i, j), std::max(i, j), row);
                 }},
      kind_);
}

double CovarianceModel::cov(std::size_t i, std::size_t j, std::size_t row) const {
  if (i < 1 || j < 1) throw IndexError("covariance indices are 1-based");
  if (std::max(i, j) > max_index()) throw IndexError("index beyond model range");
  const double c = raw_cov(i, j, row);
  return scale_ * (i == j ? c : clip_off_diagonal(c, drop_negative_));
}

CovarianceModel CovarianceModel::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("scale must be positive");
  CovarianceModel out = *this;
  out.scale_ *= c;
  return out;
}

CovarianceModel drop_negative_covariances(CovarianceModel model) {
  model.drop_negative_ = true;
  return model;
}

std::vector<double> block_variance_profile(const CovarianceModel& model, std::size_t first,
                                           std::size_t last, std::size_t row) {
  check_range(model, first, last);
  const std::size_t len = last - first + 1;
  const bool clip = model.drops_negative();
  std::vector<double> out(len, 0.0);

  std::visit(
      Overloaded{
          [&](const IndependentCov& k) {
            double v = 0.0;
            for (std::size_t j = first; j <= last; ++j) {
              v += k.variance(j);
              out[j - first] = v;
            }
          },
          [&](const StationaryCov& k) {
            const double rho0 = k.rho(0);
            double v = 0.0;
            double lag_sum = 0.0;  // sum_{l=1}^{j-first} rho(l)
            for (std::size_t j = first; j <= last; ++j) {
              if (j > first) lag_sum += clip_off_diagonal(k.rho(j - first), clip);
              v += rho0 + 2.0 * lag_sum;
              out[j - first] = v;
            }
          },
          [&](const EvtOracleCov& k) {
            if (row == 0) throw ParameterError("evt_oracle profile needs a row index");
            if (row > k.oracle->k_max()) throw IndexError("row beyond oracle range");
            const double a = k.params.alpha(row);
            const double g = k.params.gamma;
            double v = 0.0;
            double m = 0.0;  // sum_{i=first}^{j-1} df(i) s_{i,j}
            for (std::size_t j = first; j <= last; ++j) {
              if (j < row) {
                const double df = k.params.f.delta(j);
                v += a * a * df * k.oracle->var(j, row) * (df + 2.0 * m);
                const double x = static_cast<double>(j);
                m = (m + df) * (x / (x + g));
              }
              out[j - first] = v;
            }
          },
          [&](const auto&) {
            double v = 0.0;
            for (std::size_t j = first; j <= last; ++j) {
              double cross = 0.0;
              for (std::size_t i = first; i < j; ++i) {
                cross += clip_off_diagonal(model.cov(i, j, row) / model.scale(), clip);
              }
              v += model.cov(j, j, row) / model.scale() + 2.0 * cross;
              out[j - first] = v;
            }
          }},
      model.kind());

  for (auto& v : out) v *= model.scale();
  return out;
}

double weighted_cov_with_sum(const CovarianceModel& model, const std::vector<double>& w,
                             std::size_t n) {
  check_range(model, 1, n);
  if (w.size() < n) throw ParameterError("weight vector shorter than n");
  const bool clip = model.drops_negative();
  const double total = std::visit(
      Overloaded{
          [&](const IndependentCov& k) {
            double s = 0.0;
            for (std::size_t i = 1; i <= n; ++i) s += w[i - 1] * k.variance(i);
            return s;
          },
          [&](const StationaryCov& k) {
            // sum_i w_i [rho(0) + R(i-1) + R(n-i)], R(m) = sum_{l=1}^{m} rho(l)
            std::vector<double> prefix(n, 0.0);
            for (std::size_t l = 1; l < n; ++l) {
              prefix[l] = prefix[l - 1] + clip_off_diagonal(k.rho(l), clip);
            }
            const double rho0 = k.rho(0);
            double s = 0.0;
            for (std::size_t i = 1; i <= n; ++i) {
              s += w[i - 1] * (rho0 + prefix[i - 1] + prefix[n - i]);
            }
            return s;
          },
          [&](const EvtOracleCov& k) {
            const std::size_t row = n + 1;
            if (row > k.oracle->k_max()) throw IndexError("row beyond oracle range");
            const double a = k.params.alpha(row);
            const double g = k.params.gamma;
            double s = 0.0;
            double m = 0.0;   // sum_{i<j} df(i) s_{i,j}
            double mw = 0.0;  // sum_{i<j} w_i df(i) s_{i,j}
            for (std::size_t j = 1; j <= n; ++j) {
              const double df = k.params.f.delta(j);
              const double wj = w[j - 1];
              s += df * k.oracle->var(j, row) * (wj * df + mw + wj * m);
              const double x = static_cast<double>(j);
              const double step = x / (x + g);
              m = (m + df) * step;
              mw = (mw + wj * df) * step;
            }
            return a * a * s;
          },
          [&](const auto&) {
            double s = 0.0;
            for (std::size_t i = 1; i <= n; ++i) {
              double row_sum = 0.0;
              for (std::size_t j = 1; j <= n; ++j) {
                const double c = model.cov(i, j, n + 1) / model.scale();
                row_sum += c;
              }
              s += w[i - 1] * row_sum;
            }
            return s;
          }},
      model.kind());
  return total * model.scale();
}

}  // namespace slln
