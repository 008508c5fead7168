#include "slln_lab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slln_lab/errors.hpp"

namespace slln {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const StationaryCov& require_stationary(const CovarianceModel& model, const char* who) {
  const auto* s = std::get_if<StationaryCov>(&model.kind());
  if (s == nullptr) {
    throw ParameterError(std::string(who) + " needs a stationary covariance model");
  }
  return *s;
}

double rho_at(const CovarianceModel& model, std::size_t lag) {
  return model.cov(1, 1 + lag);
}

void require_range(const CovarianceModel& model, std::size_t n_max, std::size_t min_n = 2) {
  if (n_max < min_n) throw ParameterError("grid end must be at least " + std::to_string(min_n));
  if (n_max > model.max_index()) throw ParameterError("grid end beyond the model's index range");
}

ConditionReport make_report(std::string id, const CovarianceModel& model) {
  ConditionReport r;
  r.condition_id = std::move(id);
  r.model = model.label();
  return r;
}

// Keeps grid entries whose index is in `grid`, from a dense value callback.
class GridCursor {
 public:
  explicit GridCursor(const std::vector<std::size_t>& grid) : grid_(grid) {}
  bool hit(std::size_t n) const { return pos_ < grid_.size() && grid_[pos_] == n; }
  void record(ConditionReport& r, std::size_t n, double v) {
    r.grid.push_back({n, v});
    ++pos_;
  }

 private:
  const std::vector<std::size_t>& grid_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::diverging: return "diverging";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(Criterion c) {
  return c == Criterion::sup_bounded ? "sup_bounded" : "vanishing";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "bounded") return Verdict::bounded;
  if (s == "diverging") return Verdict::diverging;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw ParameterError("unknown verdict '" + s + "'");
}

Criterion criterion_from_string(const std::string& s) {
  if (s == "sup_bounded") return Criterion::sup_bounded;
  if (s == "vanishing") return Criterion::vanishing;
  throw ParameterError("unknown criterion '" + s + "'");
}

std::vector<std::size_t> geometric_grid(std::size_t from, std::size_t to, double ratio) {
  if (!(ratio > 1.0)) throw ParameterError("grid ratio must exceed 1");
  std::vector<std::size_t> out;
  from = std::max<std::size_t>(from, 1);
  for (int m = 0;; ++m) {
    const double x = std::ceil(std::pow(ratio, m) - 1e-9);
    if (x > static_cast<double>(to)) break;
    const auto n = static_cast<std::size_t>(x);
    if (n >= from && (out.empty() || out.back() != n)) out.push_back(n);
  }
  return out;
}

void finalize_report(ConditionReport& report, const VerdictRule& rule) {
  double sup = -kInf;
  bool finite = true;
  for (const auto& p : report.grid) {
    if (!std::isfinite(p.value)) finite = false;
    sup = std::max(sup, p.value);
  }
  report.running_sup = report.grid.empty() ? 0.0 : (finite ? sup : kInf);

  const std::size_t n = report.grid.size();
  const std::size_t half = std::min(n, std::max<std::size_t>(3, (n + 1) / 2));
  std::vector<double> xs;
  std::vector<double> ys;
  bool all_zero = true;
  for (std::size_t i = n - half; i < n; ++i) {
    const double v = std::abs(report.grid[i].value);
    if (v != 0.0) all_zero = false;
    if (v > 0.0 && std::isfinite(v)) {
      xs.push_back(std::log(static_cast<double>(report.grid[i].index)));
      ys.push_back(std::log(v));
    }
  }

  if (xs.size() >= 3) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (my + slope * (xs[i] - mx));
      ss += e * e;
    }
    report.loglog_slope = slope;
    report.fit_residual = std::sqrt(ss / xs.size());
  } else {
    report.loglog_slope = all_zero && !report.grid.empty() ? -kInf
                                                           : std::numeric_limits<double>::quiet_NaN();
    report.fit_residual = 0.0;
  }

  const double s = report.loglog_slope;
  const bool fit_ok = report.fit_residual < rule.residual_tol;
  if (report.grid.empty() || std::isnan(s)) {
    report.verdict = Verdict::inconclusive;
  } else if (report.criterion == Criterion::sup_bounded) {
    if (s <= rule.slope_tol && finite) {
      report.verdict = Verdict::bounded;
    } else if (s > rule.slope_tol && fit_ok) {
      report.verdict = Verdict::diverging;
    } else {
      report.verdict = Verdict::inconclusive;
    }
  } else {
    if (s < -rule.slope_tol && finite) {
      report.verdict = Verdict::bounded;
    } else if (s >= -rule.slope_tol && fit_ok) {
      report.verdict = Verdict::diverging;
    } else {
      report.verdict = Verdict::inconclusive;
    }
  }
}

Verdict GcipReports::combined() const {
  if (prefix.verdict == Verdict::diverging || blocks.verdict == Verdict::diverging) {
    return Verdict::diverging;
  }
  if (prefix.verdict == Verdict::bounded && blocks.verdict == Verdict::bounded) {
    return Verdict::bounded;
  }
  return Verdict::inconclusive;
}

GcipReports eval_gcip(const CovarianceModel& model, double delta, std::size_t q_max,
                      const VerdictRule& rule) {
  if (!(delta > 0.0 && delta < 3.0)) throw ParameterError("delta must lie in (0, 3)");
  if (q_max < 10) throw ParameterError("q_max must be at least 10");
  require_range(model, q_max);

  GcipReports out{make_report("gcip_prefix", model), make_report("gcip_blocks", model)};
  for (auto* r : {&out.prefix, &out.blocks}) {
    r->parameters["delta"] = delta;
    r->parameters["nu"] = (1.0 - delta) / 2.0;
    r->parameters["q_max"] = static_cast<double>(q_max);
  }

  const auto grid = geometric_grid(1, q_max);
  if (model.row_dependent()) {
    for (std::size_t q : grid) {
      const double v = block_variance_profile(model, 1, q, q + 1).back();
      out.prefix.grid.push_back({q, v / std::pow(static_cast<double>(q), (3.0 - delta) / 2.0)});
    }
  } else {
    const auto profile = block_variance_profile(model, 1, q_max);
    for (std::size_t q : grid) {
      out.prefix.grid.push_back(
          {q, profile[q - 1] / std::pow(static_cast<double>(q), (3.0 - delta) / 2.0)});
    }
  }

  std::size_t root = static_cast<std::size_t>(std::sqrt(static_cast<double>(q_max)));
  while (root * root > q_max) --root;
  for (std::size_t q : geometric_grid(1, root)) {
    const std::size_t first = q * q + 1;
    const std::size_t last = (q + 1) * (q + 1);
    if (last > model.max_index()) break;
    double best = 0.0;
    if (model.row_dependent()) {
      // Row k only carries X_i for i < k; the block sum up to j <= k stops at k-1.
      for (std::size_t k = first + 1; k <= last; ++k) {
        const auto prof = block_variance_profile(model, first, k - 1, k);
        best = std::max(best, *std::max_element(prof.begin(), prof.end()));
      }
    } else {
      const auto prof = block_variance_profile(model, first, last);
      best = *std::max_element(prof.begin(), prof.end());
    }
    out.blocks.grid.push_back({q, best / std::pow(static_cast<double>(q), 3.0 - delta)});
  }

  finalize_report(out.prefix, rule);
  finalize_report(out.blocks, rule);
  return out;
}

ConditionReport eval_gchr(const CovarianceModel& model, const std::function<double(std::size_t)>& b,
                          double r, std::size_t n_max, const VerdictRule& rule,
                          const std::string& b_label) {
  if (!(r > 0.0)) throw ParameterError("r must be positive");
  if (!b) throw ParameterError("empty b rule");
  require_range(model, n_max);

  std::vector<double> w(n_max);
  double prev = 0.0;
  for (std::size_t i = 1; i <= n_max; ++i) {
    const double bi = b(i);
    if (!(bi > 0.0) || !std::isfinite(bi)) {
      throw ContractViolation("b_" + std::to_string(i) + " is not positive");
    }
    if (bi < prev) {
      throw ContractViolation("b is decreasing at i = " + std::to_string(i));
    }
    prev = bi;
    w[i - 1] = std::pow(bi, -r);
  }

  ConditionReport rep = make_report("gchr", model);
  rep.parameters["r"] = r;
  rep.parameters["n_max"] = static_cast<double>(n_max);
  rep.model += "; b=" + b_label;
  const auto grid = geometric_grid(1, n_max);

  const auto& kind = model.kind();
  if (std::holds_alternative<GeneralCov>(kind) || std::holds_alternative<EmpiricalCov>(kind)) {
    // G(n) = G(n-1) + sum_{i<n} w_i c_{in} + w_n sum_{i<=n} c_{in}
    GridCursor cur(grid);
    double g = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
      double col = 0.0;
      double wcol = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        const double c = model.cov(i, n);
        col += c;
        wcol += w[i - 1] * c;
      }
      col += model.cov(n, n);
      g += wcol + w[n - 1] * col;
      if (cur.hit(n)) cur.record(rep, n, g);
    }
  } else {
    for (std::size_t n : grid) rep.grid.push_back({n, weighted_cov_with_sum(model, w, n)});
  }
  finalize_report(rep, rule);
  return rep;
}

ConditionReport eval_kolmogorov(const CovarianceModel& model, std::size_t n_max,
                                const VerdictRule& rule) {
  require_range(model, n_max);
  ConditionReport rep = make_report("kolmogorov", model);
  rep.parameters["n_max"] = static_cast<double>(n_max);
  const auto grid = geometric_grid(1, n_max);
  GridCursor cur(grid);
  double s = 0.0;
  for (std::size_t i = 1; i <= n_max; ++i) {
    const double x = static_cast<double>(i);
    s += model.cov(i, i, i + 1) / (x * x);
    if (cur.hit(i)) cur.record(rep, i, s);
  }
  finalize_report(rep, rule);
  return rep;
}

ConditionReport eval_variance_growth(const CovarianceModel& model, double nu, std::size_t n_max,
                                     const VerdictRule& rule) {
  require_range(model, n_max);
  ConditionReport rep = make_report("variance_growth", model);
  rep.parameters["nu"] = nu;
  rep.parameters["n_max"] = static_cast<double>(n_max);
  const auto grid = geometric_grid(1, n_max);
  GridCursor cur(grid);
  double s = 0.0;
  for (std::size_t i = 1; i <= n_max; ++i) {
    s += model.cov(i, i, i + 1);
    if (cur.hit(i)) cur.record(rep, i, s / std::pow(static_cast<double>(i), 1.0 + nu));
  }
  finalize_report(rep, rule);
  return rep;
}

ConditionReport eval_covariance_series(const CovarianceModel& model, std::size_t n_max,
                                       const VerdictRule& rule) {
  require_stationary(model, "eval_covariance_series");
  require_range(model, n_max);
  ConditionReport rep = make_report("covariance_series", model);
  rep.parameters["n_max"] = static_cast<double>(n_max);
  const auto grid = geometric_grid(2, n_max);
  GridCursor cur(grid);
  double s = 0.0;
  for (std::size_t n = 2; n <= n_max; ++n) {
    s += rho_at(model, n - 1);
    if (cur.hit(n)) cur.record(rep, n, s);
  }
  finalize_report(rep, rule);
  return rep;
}

Sigma2Result eval_newman_sigma2(const CovarianceModel& model, double tolerance,
                                std::size_t max_terms) {
  require_stationary(model, "eval_newman_sigma2");
  if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");
  Sigma2Result out;
  const double rho0 = rho_at(model, 0);

  // Blocks B_m = sum_{l=2^{m-1}}^{2^m - 1} rho(l); tail after block m ~ B_m r/(1-r).
  double partial = 0.0;
  std::vector<double> blocks;
  std::vector<double> extrapolated;
  std::size_t lag = 1;
  for (std::size_t width = 1; lag + width - 1 <= max_terms; width *= 2) {
    double b = 0.0;
    for (std::size_t l = lag; l < lag + width; ++l) b += rho_at(model, l);
    lag += width;
    partial += b;
    blocks.push_back(b);
    out.terms = lag - 1;

    const std::size_t m = blocks.size();
    if (m < 4) continue;
    const double b1 = blocks[m - 2];
    if (b == 0.0 && b1 == 0.0) {
      out.tail_estimate = 0.0;
      out.converged = true;
      break;
    }
    const double ratio = b1 != 0.0 ? b / b1 : 1.0;
    const double scale = std::max(1.0, std::abs(partial));

    // Divergence: three consecutive block ratios near or above 1 with blocks
    // that are not negligible.
    bool stalled = m >= 6;
    for (std::size_t t = m - 3; stalled && t < m; ++t) {
      const double prev = blocks[t - 1];
      stalled = prev != 0.0 && blocks[t] / prev >= 0.95 && std::abs(blocks[t]) > tolerance * scale;
    }
    if (stalled || !std::isfinite(partial)) {
      out.diverging = true;
      out.tail_estimate = kInf;
      return out;
    }

    const double tail = (ratio > 0.0 && ratio < 0.95) ? b * ratio / (1.0 - ratio) : 0.0;
    extrapolated.push_back(partial + tail);
    out.tail_estimate = tail;
    const std::size_t e = extrapolated.size();
    if (e >= 2 && std::abs(extrapolated[e - 1] - extrapolated[e - 2]) < tolerance * scale &&
        std::abs(b) < std::sqrt(tolerance) * scale) {
      out.converged = true;
      partial = extrapolated.back();
      break;
    }
  }
  if (!out.converged && !extrapolated.empty()) partial = extrapolated.back();
  out.value = rho0 + 2.0 * partial;
  return out;
}

ConditionReport eval_cesaro(const CovarianceModel& model, std::size_t n_max,
                            const VerdictRule& rule) {
  require_stationary(model, "eval_cesaro");
  require_range(model, n_max);
  ConditionReport rep = make_report("cesaro", model);
  rep.criterion = Criterion::vanishing;
  rep.parameters["n_max"] = static_cast<double>(n_max);
  const auto grid = geometric_grid(1, n_max);
  GridCursor cur(grid);
  double s = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    s += rho_at(model, n - 1);
    if (cur.hit(n)) cur.record(rep, n, s / static_cast<double>(n));
  }
  finalize_report(rep, rule);
  return rep;
}

ConditionReport eval_q2(const CovarianceModel& model, double nu, std::size_t q_max,
                        const VerdictRule& rule) {
  require_stationary(model, "eval_q2");
  require_range(model, q_max);
  ConditionReport rep = make_report("q2", model);
  rep.parameters["nu"] = nu;
  rep.parameters["q_max"] = static_cast<double>(q_max);
  const auto grid = geometric_grid(1, q_max);
  GridCursor cur(grid);
  const double rho0 = rho_at(model, 0);
  // sum_{l=1}^{q-1} (q-l) rho(l) = q R1 - R2 with R1 = sum rho(l), R2 = sum l rho(l).
  double r1 = 0.0;
  double r2 = 0.0;
  for (std::size_t q = 1; q <= q_max; ++q) {
    if (q >= 2) {
      const double c = rho_at(model, q - 1);
      r1 += c;
      r2 += static_cast<double>(q - 1) * c;
    }
    if (cur.hit(q)) {
      const double x = static_cast<double>(q);
      const double inner = rho0 + (2.0 / x) * (x * r1 - r2);
      cur.record(rep, q, std::pow(x, -nu) * inner);
    }
  }
  finalize_report(rep, rule);
  return rep;
}

ConditionReport eval_birkel(const CovarianceModel& model, std::size_t n_max,
                            const VerdictRule& rule) {
  require_range(model, n_max);
  ConditionReport rep = make_report("birkel", model);
  rep.parameters["n_max"] = static_cast<double>(n_max);
  const auto grid = geometric_grid(1, n_max);

  if (const auto* e = std::get_if<EvtOracleCov>(&model.kind())) {
    const double g = e->params.gamma;
    for (std::size_t n : grid) {
      const std::size_t row = n + 1;
      const double a = e->params.alpha(row);
      double s = 0.0;
      double m = 0.0;  // sum_{j<i} df(j) s_{j,i}
      for (std::size_t i = 1; i <= n; ++i) {
        const double df = e->params.f.delta(i);
        const double x = static_cast<double>(i);
        s += df * e->oracle->var(i, row) * (df + m) / (x * x);
        m = (m + df) * (x / (x + g));
      }
      rep.grid.push_back({n, model.scale() * a * a * s});
    }
    finalize_report(rep, rule);
    return rep;
  }

  GridCursor cur(grid);
  const auto* st = std::get_if<StationaryCov>(&model.kind());
  double total = 0.0;
  double lag_sum = 0.0;
  for (std::size_t i = 1; i <= n_max; ++i) {
    double c = 0.0;  // Cov(X_i, S_i)
    if (st != nullptr) {
      if (i >= 2) lag_sum += rho_at(model, i - 1);
      c = rho_at(model, 0) + lag_sum;
    } else if (std::holds_alternative<IndependentCov>(model.kind())) {
      c = model.cov(i, i);
    } else {
      for (std::size_t j = 1; j <= i; ++j) c += model.cov(i, j);
    }
    const double x = static_cast<double>(i);
    total += c / (x * x);
    if (cur.hit(i)) cur.record(rep, i, total);
  }
  finalize_report(rep, rule);
  return rep;
}

std::array<ConditionReport, 5> eval_evt_conditions(const EvtProcessParams& params,
                                                   std::size_t k_max, const VerdictRule& rule) {
  params.validate();
  const std::size_t L = params.L;
  if (L >= k_max) throw ParameterError("L must be smaller than k_max");
  if (k_max / L < L) throw ParameterError("k_max must be at least L^2");
  std::size_t root = static_cast<std::size_t>(std::sqrt(static_cast<double>(k_max)));
  while (root * root > k_max) --root;
  const std::size_t top = (root + 1) * (root + 1);
  if (params.f.domain_end() < top) throw ParameterError("weight table too short for k_max");
  params.f.validate(top);

  const double g = params.gamma;
  const double nu = params.nu();
  const std::string label =
      "gamma=" + std::to_string(g) + ", f=" + params.f.label() + ", alpha=" + params.alpha.label();

  std::array<ConditionReport, 5> reps;
  const char* ids[5] = {"evt_diag_variance", "evt_cross_cov", "evt_cross_mean",
                        "evt_block_variance", "evt_block_cross_cov"};
  for (int i = 0; i < 5; ++i) {
    reps[i].condition_id = ids[i];
    reps[i].model = label;
    reps[i].parameters = {{"gamma", g},
                          {"delta", params.delta},
                          {"nu", nu},
                          {"L", static_cast<double>(L)},
                          {"k_max", static_cast<double>(k_max)}};
  }

  // Conditions on k in [L, k_max]; partial sums carried over j < k.
  {
    const auto grid = geometric_grid(L, k_max);
    GridCursor c0(grid);
    GridCursor c1(grid);
    GridCursor c2(grid);
    double diag = 0.0;      // sum_{j=L}^{k-1} df(j)^2 j^{2 gamma}, scaled by 1/s^{2 gamma}
    double diag_ref = 1.0;  // reference scale s for diag
    double inner = 0.0;     // sum_{i=L}^{j-1} df(i)
    double cross = 0.0;
    double mean = 0.0;
    for (std::size_t k = L; k <= k_max; ++k) {
      if (k > L) {
        const std::size_t j = k - 1;
        const double x = static_cast<double>(j);
        const double df = params.f.delta(j);
        // Rescale the reference so j^{2 gamma} never overflows.
        const double new_ref = x;
        diag = diag * std::pow(diag_ref / new_ref, 2.0 * g) + df * df;
        diag_ref = new_ref;
        if (j >= L + 1) cross += inner * df / x;
        inner += df;
        mean += df / x;
      }
      if (c0.hit(k)) {
        const double x = static_cast<double>(k);
        const double a = params.alpha(k);
        const double d = diag * std::pow(diag_ref / x, 2.0 * g);
        const double norm = a * a / std::pow(x, 1.0 + nu);
        c0.record(reps[0], k, norm * d);
        c1.record(reps[1], k, norm * cross);
        c2.record(reps[2], k, norm * mean);
      }
    }
  }

  // Square blocks q^2 + 1 .. (q+1)^2 with q^2 >= L.
  for (std::size_t q : geometric_grid(1, root)) {
    if (q * q < L) continue;
    const std::size_t base = q * q;
    const double b1 = static_cast<double>(base + 1);
    double var_sum = 0.0;  // sum_i df(q^2+i)^2 ((q^2+i)/(q^2+1))^{2 gamma}
    double cross = 0.0;
    double inner = 0.0;
    for (std::size_t i = 1; i <= 2 * q + 1; ++i) {
      const double x = static_cast<double>(base + i);
      const double df = params.f.delta(base + i);
      var_sum += df * df * std::pow(x / b1, 2.0 * g);
      if (i >= 2) cross += inner * df / x;
      inner += df;
    }
    const double norm = std::pow(static_cast<double>(q), -(3.0 - params.delta));
    double best_var = 0.0;
    double best_cross = 0.0;
    for (std::size_t k = base + 1; k <= base + 2 * q + 1; ++k) {
      const double a = params.alpha(k);
      best_var = std::max(best_var, a * a * std::pow(b1 / static_cast<double>(k), 2.0 * g) * var_sum);
      best_cross = std::max(best_cross, a * a * cross);
    }
    reps[3].grid.push_back({q, norm * best_var});
    reps[4].grid.push_back({q, norm * best_cross});
  }

  for (auto& r : reps) finalize_report(r, rule);
  return reps;
}

MaxVarProbe maxvar_probe(const PathSampler& sampler, double r, std::size_t n,
                         const std::vector<double>& lambda_grid, std::size_t reps,
                         std::uint64_t base_seed, std::optional<double> known_variance) {
  if (!sampler) throw ParameterError("empty sampler");
  if (reps < 1000) throw ParameterError("maxvar_probe needs at least 1000 replications");
  if (n < 1) throw ParameterError("n must be at least 1");
  if (!(r > 0.0)) throw ParameterError("r must be positive");
  if (lambda_grid.empty()) throw ParameterError("empty lambda grid");
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw ParameterError("lambda values must be positive");
  }

  MaxVarProbe out;
  out.r = r;
  out.n = n;
  out.reps = reps;
  std::vector<std::size_t> exceed(lambda_grid.size(), 0);
  double mean_sn = 0.0;
  double m2_sn = 0.0;
  double mean_max2 = 0.0;
  double m2_max2 = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    SeededStream stream(base_seed + rep);
    const auto x = sampler(stream, n);
    if (x.size() < n) throw ParameterError("sampler returned fewer than n values");
    double s = 0.0;
    double mx = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      s += x[l];
      mx = std::max(mx, std::abs(s));
    }
    for (std::size_t t = 0; t < lambda_grid.size(); ++t) {
      if (mx >= lambda_grid[t]) ++exceed[t];
    }
    const double cnt = static_cast<double>(rep + 1);
    const double d = s - mean_sn;
    mean_sn += d / cnt;
    m2_sn += d * (s - mean_sn);
    const double v = mx * mx;
    const double dv = v - mean_max2;
    mean_max2 += dv / cnt;
    m2_max2 += dv * (v - mean_max2);
  }

  const double R = static_cast<double>(reps);
  out.var_known = known_variance.has_value();
  out.var_sn = known_variance ? *known_variance : m2_sn / (R - 1.0);
  if (!(out.var_sn > 0.0)) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t t = 0; t < lambda_grid.size(); ++t) {
    const double lam = lambda_grid[t];
    const double p = static_cast<double>(exceed[t]) / R;
    const double f = std::pow(lam, r) / out.var_sn;
    MaxVarLambda e{lam, p, f * p, f * std::sqrt(p * (1.0 - p) / R)};
    if (e.ratio > out.constant || out.per_lambda.empty()) {
      out.constant = e.ratio;
      out.constant_se = e.se;
      out.argmax_lambda = lam;
    }
    out.per_lambda.push_back(e);
  }
  out.emax_ratio = mean_max2 / out.var_sn;
  out.emax_se = std::sqrt(m2_max2 / (R - 1.0) / R) / out.var_sn;
  return out;
}

}  // namespace slln
