#include "slln_lab/association.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "slln_lab/errors.hpp"

namespace slln {

struct FactorCache {
  std::mutex mu;
  std::map<std::size_t, std::shared_ptr<const GaussianFactor>> by_n;
  std::shared_ptr<const GaussianFactor> fixed;  // gaussian_matrix only
};

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double draw_iid(IidDist d, SeededStream& s) {
  switch (d) {
    case IidDist::normal: return s.next_normal();
    case IidDist::exponential: return s.next_exponential() - 1.0;
    case IidDist::uniform: return std::sqrt(3.0) * (2.0 * s.next_uniform() - 1.0);
    case IidDist::rademacher: return (s.next_u64() >> 63) != 0 ? 1.0 : -1.0;
  }
  return 0.0;
}

std::shared_ptr<const GaussianFactor> factor_for(const AssocGenerator::Gaussian& g, std::size_t n) {
  std::lock_guard<std::mutex> lock(g.cache->mu);
  if (g.cache->fixed) return g.cache->fixed;
  auto it = g.cache->by_n.find(n);
  if (it != g.cache->by_n.end()) return it->second;
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = g.rho(i + 1, j + 1);
  }
  auto f = std::make_shared<const GaussianFactor>(semidefinite_cholesky(c, n));
  g.cache->by_n.emplace(n, f);
  return f;
}

void check_monotone(const AssocGenerator::Transform& t, std::size_t n) {
  constexpr int kPoints = 41;
  for (std::size_t i = 1; i <= n; ++i) {
    double prev = t.map(i, -8.0);
    for (int p = 1; p < kPoints; ++p) {
      const double x = -8.0 + 16.0 * p / (kPoints - 1);
      const double v = t.map(i, x);
      if (t.increasing ? v < prev : v > prev) {
        throw ContractViolation("transform map is not monotone at coordinate " +
                                std::to_string(i));
      }
      prev = v;
    }
  }
}

}  // namespace

std::string to_string(IidDist d) {
  switch (d) {
    case IidDist::normal: return "normal";
    case IidDist::exponential: return "exponential";
    case IidDist::uniform: return "uniform";
    case IidDist::rademacher: return "rademacher";
  }
  return "normal";
}

IidDist iid_dist_from_string(const std::string& s) {
  if (s == "normal") return IidDist::normal;
  if (s == "exponential") return IidDist::exponential;
  if (s == "uniform") return IidDist::uniform;
  if (s == "rademacher") return IidDist::rademacher;
  throw ParameterError("unknown distribution '" + s + "'");
}

GaussianFactor semidefinite_cholesky(const std::vector<double>& a, std::size_t n,
                                     bool require_nonnegative) {
  if (n == 0 || a.size() != n * n) throw ParameterError("matrix must be n x n with n >= 1");
  double diag_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a[i * n + j];
      if (!std::isfinite(v)) throw DecompositionError("non-finite matrix entry", i + 1, j + 1);
      if (j > i && std::abs(v - a[j * n + i]) > 1e-12 * (1.0 + std::abs(v))) {
        throw DecompositionError("matrix is not symmetric at (" + std::to_string(i + 1) + ", " +
                                     std::to_string(j + 1) + ")",
                                 i + 1, j + 1);
      }
      if (require_nonnegative && v < 0.0) {
        throw DecompositionError("negative correlation at (" + std::to_string(i + 1) + ", " +
                                     std::to_string(j + 1) + ")",
                                 i + 1, j + 1);
      }
    }
    diag_max = std::max(diag_max, a[i * n + i]);
  }
  const double tol = 1e-10 * std::max(1.0, diag_max) * static_cast<double>(n);

  GaussianFactor f{n, std::vector<double>(n * n, 0.0)};
  auto& L = f.lower;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
    if (d < -tol) {
      throw DecompositionError("matrix is not positive semidefinite: pivot " +
                                   std::to_string(j + 1) + " is " + std::to_string(d),
                               j + 1, j + 1);
    }
    const bool zero_pivot = d <= tol;
    const double ljj = zero_pivot ? 0.0 : std::sqrt(d);
    L[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      if (zero_pivot) {
        if (std::abs(s) > std::sqrt(tol)) {
          throw DecompositionError("matrix is not positive semidefinite: zero pivot " +
                                       std::to_string(j + 1) + " with non-zero entry at row " +
                                       std::to_string(i + 1),
                                   i + 1, j + 1);
        }
      } else {
        L[i * n + j] = s / ljj;
      }
    }
  }
  return f;
}

AssocGenerator AssocGenerator::iid(IidDist dist) { return AssocGenerator(Iid{dist}); }

AssocGenerator AssocGenerator::gaussian(std::function<double(std::size_t, std::size_t)> rho,
                                        std::string label) {
  if (!rho) throw ParameterError("empty correlation rule");
  return AssocGenerator(Gaussian{std::move(rho), std::move(label), std::make_shared<FactorCache>()});
}

AssocGenerator AssocGenerator::gaussian_matrix(std::vector<double> matrix, std::size_t n) {
  auto cache = std::make_shared<FactorCache>();
  cache->fixed = std::make_shared<const GaussianFactor>(semidefinite_cholesky(matrix, n));
  auto shared = std::make_shared<const std::vector<double>>(std::move(matrix));
  Gaussian g{[shared, n](std::size_t i, std::size_t j) { return (*shared)[(i - 1) * n + (j - 1)]; },
             "gaussian(matrix " + std::to_string(n) + "x" + std::to_string(n) + ")", cache};
  AssocGenerator out(std::move(g));
  out.max_n_ = n;
  return out;
}

AssocGenerator AssocGenerator::transform(AssocGenerator base,
                                         std::function<double(std::size_t, double)> map,
                                         bool increasing, std::string label) {
  if (!map) throw ParameterError("empty transform map");
  const std::size_t max_n = base.max_n_;
  Transform t{std::make_shared<const AssocGenerator>(std::move(base)), std::move(map), increasing,
              std::move(label)};
  check_monotone(t, std::min<std::size_t>(max_n, 16));
  AssocGenerator out(std::move(t));
  out.max_n_ = max_n;
  return out;
}

AssocGenerator AssocGenerator::partial_sums(IidDist dist) { return AssocGenerator(PartialSums{dist}); }

AssocGenerator AssocGenerator::multinomial(std::size_t trials) {
  if (trials == 0) throw ParameterError("multinomial needs at least one trial");
  return AssocGenerator(Multinomial{trials});
}

std::string AssocGenerator::label() const {
  return std::visit(
      Overloaded{[](const Iid& k) { return "iid(" + to_string(k.dist) + ")"; },
                 [](const Gaussian& k) { return k.label; },
                 [](const Transform& k) { return k.label + "(" + k.base->label() + ")"; },
                 [](const PartialSums& k) { return "partial_sums(" + to_string(k.dist) + ")"; },
                 [](const Multinomial& k) {
                   return "multinomial(trials=" + std::to_string(k.trials) + ")";
                 }},
      kind_);
}

bool AssocGenerator::negatively_associated() const noexcept {
  if (std::holds_alternative<Multinomial>(kind_)) return true;
  if (const auto* t = std::get_if<Transform>(&kind_)) return t->base->negatively_associated();
  return false;
}

std::vector<double> generate(const AssocGenerator& gen, SeededStream& stream, std::size_t n) {
  if (n < 1) throw EmptyRequestError("n must be at least 1");
  if (n > gen.max_n()) throw ParameterError("n exceeds the generator's matrix size");
  std::vector<double> x(n);
  std::visit(Overloaded{[&](const AssocGenerator::Iid& k) {
                          for (auto& v : x) v = draw_iid(k.dist, stream);
                        },
                        [&](const AssocGenerator::Gaussian& k) {
                          const auto f = factor_for(k, n);
                          const std::size_t m = f->n;
                          std::vector<double> z(n);
                          for (auto& v : z) v = stream.next_normal();
                          for (std::size_t i = 0; i < n; ++i) {
                            double s = 0.0;
                            for (std::size_t j = 0; j <= i; ++j) s += f->lower[i * m + j] * z[j];
                            x[i] = s;
                          }
                        },
                        [&](const AssocGenerator::Transform& k) {
                          const auto y = generate(*k.base, stream, n);
                          for (std::size_t i = 0; i < n; ++i) x[i] = k.map(i + 1, y[i]);
                        },
                        [&](const AssocGenerator::PartialSums& k) {
                          double s = 0.0;
                          for (auto& v : x) {
                            s += draw_iid(k.dist, stream);
                            v = s;
                          }
                        },
                        [&](const AssocGenerator::Multinomial& k) {
                          std::fill(x.begin(), x.end(), 0.0);
                          const double nn = static_cast<double>(n);
                          for (std::size_t t = 0; t < k.trials; ++t) {
                            auto cell = static_cast<std::size_t>(stream.next_uniform() * nn);
                            x[std::min(cell, n - 1)] += 1.0;
                          }
                          const double mean = static_cast<double>(k.trials) / nn;
                          for (auto& v : x) v -= mean;
                        }},
             gen.kind());
  return x;
}

std::vector<double> generate_replications(const AssocGenerator& gen, std::uint64_t base_seed,
                                          std::size_t replications, std::size_t n) {
  if (replications < 1) throw EmptyRequestError("need at least one replication");
  std::vector<double> out;
  out.reserve(replications * n);
  for (std::size_t r = 0; r < replications; ++r) {
    SeededStream stream(base_seed + r);
    const auto x = generate(gen, stream, n);
    out.insert(out.end(), x.begin(), x.end());
  }
  return out;
}

CovarianceModel empirical_cov_model(const std::vector<double>& samples, std::size_t replications,
                                    std::size_t n) {
  if (replications < 2) throw ParameterError("covariance needs at least 2 replications");
  if (n < 1 || samples.size() != replications * n) {
    throw ParameterError("sample matrix has the wrong size");
  }
  const double R = static_cast<double>(replications);
  std::vector<double> mean(n, 0.0);
  for (std::size_t r = 0; r < replications; ++r) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += samples[r * n + i];
  }
  for (auto& m : mean) m /= R;

  EmpiricalCov e;
  e.n = n;
  e.replications = replications;
  e.low_precision = replications < 30;
  e.cov.assign(n * n, 0.0);
  e.se.assign(n * n, 0.0);
  std::vector<double> m4(n * n, 0.0);
  std::vector<double> d(n);
  for (std::size_t r = 0; r < replications; ++r) {
    for (std::size_t i = 0; i < n; ++i) d[i] = samples[r * n + i] - mean[i];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double p = d[i] * d[j];
        e.cov[i * n + j] += p;
        m4[i * n + j] += p * p;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double biased = e.cov[i * n + j] / R;
      const double c = e.cov[i * n + j] / (R - 1.0);
      const double se = std::sqrt(std::max(0.0, m4[i * n + j] / R - biased * biased) / R);
      e.cov[i * n + j] = e.cov[j * n + i] = c;
      e.se[i * n + j] = e.se[j * n + i] = se;
    }
  }
  return CovarianceModel::empirical(std::move(e));
}

NewmanLemmaCheck check_newman_lemma(const PairSampler& sampler, const SmoothMap& f,
                                    const SmoothMap& g, std::size_t reps,
                                    std::uint64_t base_seed) {
  if (reps < 1000) throw ParameterError("check_newman_lemma needs at least 1000 replications");
  if (!sampler || !f.fn || !g.fn) throw ParameterError("empty sampler or map");
  std::vector<double> xs(reps), ys(reps), fx(reps), gy(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    SeededStream stream(base_seed + i);
    const auto [x, y] = sampler(stream);
    xs[i] = x;
    ys[i] = y;
    fx[i] = f.fn(x);
    gy[i] = g.fn(y);
  }
  // Covariance and the standard error of its estimate from centred products.
  auto cov_se = [reps](const std::vector<double>& a, const std::vector<double>& b) {
    const double R = static_cast<double>(reps);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= R;
    mb /= R;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
      const double p = (a[i] - ma) * (b[i] - mb);
      s += p;
      s2 += p * p;
    }
    const double biased = s / R;
    const double se = std::sqrt(std::max(0.0, s2 / R - biased * biased) / R);
    return std::pair<double, double>{s / (R - 1.0), se};
  };
  NewmanLemmaCheck out;
  out.reps = reps;
  std::tie(out.cov_fg, out.se_fg) = cov_se(fx, gy);
  std::tie(out.cov_xy, out.se_xy) = cov_se(xs, ys);
  const double norms = f.derivative_sup * g.derivative_sup;
  out.bound = norms * out.cov_xy;
  const double se = std::hypot(out.se_fg, norms * out.se_xy);
  const double excess = std::abs(out.cov_fg) - out.bound;
  out.z = se > 0.0 ? excess / se : (excess > 0.0 ? HUGE_VAL : 0.0);
  out.holds = excess <= 3.0 * se + 1e-12 * std::max(1.0, std::abs(out.bound));
  return out;
}

std::vector<double> load_matrix_csv(const std::string& path, std::size_t& n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParameterError("bad number '" + cell + "' in " + path + " row " +
                             std::to_string(rows + 1));
      }
      ++c;
    }
    if (rows == 0) cols = c;
    if (c != cols) throw ParameterError("ragged row " + std::to_string(rows + 1) + " in " + path);
    ++rows;
  }
  if (rows == 0 || rows != cols) throw ParameterError("matrix in " + path + " is not square");
  n = rows;
  return values;
}

}  // namespace slln
