#include "slln_lab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "slln_lab/conditions.hpp"
#include "slln_lab/errors.hpp"
#include "slln_lab/estimators.hpp"
#include "slln_lab/evt_process.hpp"
#include "slln_lab/io.hpp"
#include "slln_lab/sampling.hpp"

namespace slln {

namespace {

constexpr std::size_t kChunk = 64;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
T param_or(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter '") + key + "': " + e.what());
  }
}

std::function<double(std::size_t)> rho_rule_from_json(const json& spec, double rho0) {
  const std::string rule = param_or<std::string>(spec, "rho", "zero");
  if (rule == "zero") {
    return [rho0](std::size_t l) { return l == 0 ? rho0 : 0.0; };
  }
  if (rule == "power") {
    const double p = param_or(spec, "exponent", 2.0);
    const double c = param_or(spec, "coefficient", 1.0);
    return [rho0, p, c](std::size_t l) {
      return l == 0 ? rho0 : c * std::pow(static_cast<double>(l), -p);
    };
  }
  if (rule == "geometric") {
    const double b = param_or(spec, "base", 0.5);
    const double c = param_or(spec, "coefficient", rho0);
    if (!(b >= 0.0 && b < 1.0)) throw ConfigError("geometric base must lie in [0, 1)");
    return [rho0, b, c](std::size_t l) {
      return l == 0 ? rho0 : c * std::pow(b, static_cast<double>(l));
    };
  }
  if (rule == "constant") {
    const double v = param_or(spec, "value", 0.5);
    return [rho0, v](std::size_t l) { return l == 0 ? rho0 : v; };
  }
  throw ConfigError("unknown covariance rule '" + rule + "'");
}

EvtProcessParams evt_params_from_json(const json& spec) {
  const double tau = param_or(spec, "tau", 1.0);
  const double gamma = param_or(spec, "gamma", 2.0);
  EvtProcessParams p = EvtProcessParams::power_case(tau, gamma, param_or(spec, "delta", 0.5),
                                                    param_or<std::size_t>(spec, "L", 10));
  if (spec.contains("alpha_exponent")) {
    p.alpha = ScalingRule::power(spec.at("alpha_exponent").get<double>());
  }
  return p;
}

std::vector<double> lambdas_from_json(const json& p) {
  if (p.contains("lambdas")) return p.at("lambdas").get<std::vector<double>>();
  return {0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0};
}

// Output slots for one replication of the Monte Carlo experiments.
using Replicate = std::function<void(std::uint64_t, std::vector<double>&)>;

Replicate wk_replicate(const ExperimentConfig& c, std::function<double(std::size_t)>& target) {
  const EvtProcessParams params = evt_params_from_json(c.params);
  const std::string scale_name = param_or<std::string>(c.params, "scale", "normalized");
  const std::size_t k_max = c.grid.back();
  if (c.grid.front() < 1) throw ConfigError("k grid must start at 1 or above");
  const auto grid = c.grid;
  if (scale_name == "centred") {
    // S*_k / k, exactly centred.
    target = [](std::size_t) { return 0.0; };
    return [params, k_max, grid](std::uint64_t seed, std::vector<double>& out) {
      SeededStream stream(seed);
      const WkPath path = simulate_sk_star(stream, params, k_max);
      for (std::size_t g = 0; g < grid.size(); ++g) out[g] = path.at(grid[g]);
    };
  }
  const WkScale scale = wk_scale_from_string(scale_name);
  target = [params, scale](std::size_t k) { return expected_wk(params, k, scale); };
  return [params, scale, k_max, grid](std::uint64_t seed, std::vector<double>& out) {
    SeededStream stream(seed);
    const WkPath path = simulate_wk(stream, params, k_max, scale);
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] = path.at(grid[g]);
  };
}

Replicate hill_replicate(const ExperimentConfig& c, std::function<double(std::size_t)>& target) {
  QuantileRep rep;
  rep.gamma = param_or(c.params, "gamma", 2.0);
  rep.mode = exponent_mode_from_string(param_or<std::string>(c.params, "mode", "gamma"));
  rep.y0 = param_or(c.params, "y0", 0.0);
  rep.c = param_or(c.params, "c", 1.0);
  rep.validate();
  const double tau = param_or(c.params, "tau", 1.0);
  const WeightFunction f = WeightFunction::power(tau);
  const std::size_t n = param_or<std::size_t>(c.params, "n", 10000);
  if (c.grid.back() >= n) throw ConfigError("hill_ratio grid must satisfy k < n");

  EvtProcessParams law = EvtProcessParams::power_case(tau, rep.exponent());
  target = [law](std::size_t k) { return expected_wk(law, k, WkScale::hill_matched); };
  const auto grid = c.grid;
  return [rep, f, n, grid](std::uint64_t seed, std::vector<double>& out) {
    SeededStream stream(seed);
    const auto sample = sample_weibull_domain(stream, n, rep);
    const auto sweep = hill_sweep(sample, grid, f, rep.y0);
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] = *sweep[g].ratio;
  };
}

json run_conditions(const CovarianceModel& model, const json& list, std::size_t default_n) {
  json reports = json::array();
  for (const auto& c : list) {
    const std::string name = param_or<std::string>(c, "name", "");
    const std::size_t n_max = param_or(c, "n_max", default_n);
    if (name == "gcip") {
      const auto g = eval_gcip(model, param_or(c, "delta", 1.0), n_max);
      json a = to_json(g.prefix);
      json b = to_json(g.blocks);
      reports.push_back(a);
      reports.push_back(b);
    } else if (name == "gchr") {
      const double bexp = param_or(c, "b_exponent", 1.0);
      reports.push_back(to_json(eval_gchr(
          model, [bexp](std::size_t i) { return std::pow(static_cast<double>(i), bexp); },
          param_or(c, "r", 2.0), n_max, {}, "i^" + format_double(bexp))));
    } else if (name == "kolmogorov") {
      reports.push_back(to_json(eval_kolmogorov(model, n_max)));
    } else if (name == "variance_growth") {
      reports.push_back(to_json(eval_variance_growth(model, param_or(c, "nu", 0.0), n_max)));
    } else if (name == "covariance_series") {
      reports.push_back(to_json(eval_covariance_series(model, n_max)));
    } else if (name == "cesaro") {
      reports.push_back(to_json(eval_cesaro(model, n_max)));
    } else if (name == "q2") {
      reports.push_back(to_json(eval_q2(model, param_or(c, "nu", 0.0), n_max)));
    } else if (name == "birkel") {
      reports.push_back(to_json(eval_birkel(model, n_max)));
    } else if (name == "newman") {
      json s = to_json(eval_newman_sigma2(model, param_or(c, "tol", 1e-8)));
      s["condition_id"] = "newman_sigma2";
      reports.push_back(s);
    } else {
      throw ConfigError("unknown condition '" + name + "'");
    }
  }
  return reports;
}

CovarianceModel model_for(const ExperimentConfig& c, std::size_t n) {
  const json& spec = c.params.at("model");
  if (param_or<std::string>(spec, "kind", "") == "generator") {
    const auto gen = generator_from_json(spec.at("generator"));
    const auto samples = generate_replications(gen, c.base_seed, c.replications, n);
    return empirical_cov_model(samples, c.replications, n);
  }
  return covariance_model_from_json(spec, n);
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::wk_convergence: return "wk_convergence";
    case ExperimentId::hill_ratio: return "hill_ratio";
    case ExperimentId::gcip_sweep: return "gcip_sweep";
    case ExperimentId::maxvar_probe: return "maxvar_probe";
    case ExperimentId::condition_suite: return "condition_suite";
  }
  return "wk_convergence";
}

ExperimentId experiment_id_from_string(const std::string& s) {
  for (auto id : {ExperimentId::wk_convergence, ExperimentId::hill_ratio, ExperimentId::gcip_sweep,
                  ExperimentId::maxvar_probe, ExperimentId::condition_suite}) {
    if (to_string(id) == s) return id;
  }
  throw ConfigError("unknown experiment_id '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be at least 1");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw ConfigError("grid must be strictly increasing");
  }
  if ((id == ExperimentId::wk_convergence || id == ExperimentId::hill_ratio) && grid.empty()) {
    throw ConfigError(to_string(id) + " needs a non-empty grid");
  }
  if (!grid.empty() && grid.front() == 0) throw ConfigError("grid indices start at 1");
  if (!params.is_object()) throw ConfigError("params must be an object");
  if (id == ExperimentId::gcip_sweep && !params.contains("model")) {
    throw ConfigError(to_string(id) + " needs params.model");
  }
  if (id == ExperimentId::maxvar_probe && replications < 1000) {
    throw ConfigError("maxvar_probe needs at least 1000 replications");
  }
}

json ExperimentConfig::to_json() const {
  json j = {{"experiment_id", to_string(id)},
            {"params", params},
            {"replications", replications},
            {"base_seed", base_seed},
            {"grid", grid}};
  json out = json::object();
  if (!output_json.empty()) out["json"] = output_json;
  if (!output_csv.empty()) out["csv"] = output_csv;
  j["output"] = out;
  j["threads"] = threads;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
      static const char* known[] = {"experiment_id", "params",  "replications", "base_seed",
                                    "grid",          "output",  "threads"};
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* k) { return key == k; }) == std::end(known)) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
    c.id = experiment_id_from_string(j.at("experiment_id").get<std::string>());
    c.params = j.value("params", json::object());
    c.replications = j.value("replications", std::size_t{1});
    c.base_seed = j.value("base_seed", kDefaultSeed);
    c.grid = j.value("grid", std::vector<std::size_t>{});
    if (j.contains("output")) {
      c.output_json = j.at("output").value("json", "");
      c.output_csv = j.at("output").value("csv", "");
    }
    c.threads = j.value("threads", 0u);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return from_json(j);
}

std::string ExperimentConfig::hash() const {
  json j = to_json();
  j.erase("output");
  j.erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

void Moments::add(double x) noexcept {
  ++count;
  const double d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (x - mean);
}

void Moments::merge(const Moments& o) noexcept {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(o.count);
  const double n = na + nb;
  const double d = o.mean - mean;
  mean += d * nb / n;
  m2 += o.m2 + d * d * na * nb / n;
  count += o.count;
}

double Moments::variance() const noexcept {
  return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1);
}

double Moments::standard_error() const noexcept {
  return count < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
}

void QuantileSketch::add(double x) {
  if (levels_.empty()) levels_.emplace_back();
  levels_[0].push_back(x);
  ++count_;
  compress();
}

void QuantileSketch::merge(const QuantileSketch& o) {
  if (levels_.size() < o.levels_.size()) levels_.resize(o.levels_.size());
  for (std::size_t h = 0; h < o.levels_.size(); ++h) {
    levels_[h].insert(levels_[h].end(), o.levels_[h].begin(), o.levels_[h].end());
  }
  count_ += o.count_;
  compress();
}

void QuantileSketch::compress() {
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    if (levels_[h].size() <= kExact) continue;
    if (h + 1 == levels_.size()) levels_.emplace_back();
    auto& lv = levels_[h];
    std::sort(lv.begin(), lv.end());
    // Keep one element back when the size is odd so weights stay exact.
    std::vector<double> keep;
    if (lv.size() % 2 == 1) {
      keep.push_back(lv.back());
      lv.pop_back();
    }
    const std::size_t offset = (compactions_++) & 1U;
    auto& up = levels_[h + 1];
    for (std::size_t i = offset; i < lv.size(); i += 2) up.push_back(lv[i]);
    lv = std::move(keep);
  }
}

double QuantileSketch::quantile(double p) const {
  if (count_ == 0) throw EmptyRequestError("quantile of an empty sketch");
  std::vector<std::pair<double, double>> items;
  double total = 0.0;
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    const double w = std::ldexp(1.0, static_cast<int>(h));
    for (double v : levels_[h]) {
      items.emplace_back(v, w);
      total += w;
    }
  }
  std::sort(items.begin(), items.end());
  const double need = std::clamp(p, 0.0, 1.0) * total;
  double cum = 0.0;
  for (const auto& [v, w] : items) {
    cum += w;
    if (cum >= need) return v;
  }
  return items.back().first;
}

std::vector<GridStats> aggregate_replications(
    const std::function<void(std::uint64_t, std::vector<double>&)>& replicate,
    const std::vector<std::size_t>& grid, std::size_t replications, std::uint64_t base_seed,
    unsigned threads) {
  const std::size_t G = grid.size();
  const std::size_t chunks = (replications + kChunk - 1) / kChunk;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));

  std::vector<PointAccumulator> total(G);
  const std::size_t wave = static_cast<std::size_t>(threads) * 4;
  for (std::size_t start = 0; start < chunks; start += wave) {
    const std::size_t stop = std::min(chunks, start + wave);
    std::vector<std::vector<PointAccumulator>> parts(stop - start);
    std::atomic<std::size_t> next{start};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&]() {
      std::vector<double> out(G);
      for (std::size_t c = next++; c < stop; c = next++) {
        try {
          auto& acc = parts[c - start];
          acc.resize(G);
          const std::size_t r_end = std::min(replications, (c + 1) * kChunk);
          for (std::size_t r = c * kChunk; r < r_end; ++r) {
            replicate(base_seed + r, out);
            for (std::size_t g = 0; g < G; ++g) acc[g].add(out[g]);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    for (const auto& part : parts) {
      for (std::size_t g = 0; g < G; ++g) total[g].merge(part[g]);
    }
  }

  std::vector<GridStats> rows(G);
  for (std::size_t g = 0; g < G; ++g) {
    const auto& a = total[g];
    rows[g].index = grid[g];
    rows[g].count = a.moments.count;
    rows[g].mean = a.moments.mean;
    rows[g].se = a.moments.standard_error();
    rows[g].q05 = a.sketch.quantile(0.05);
    rows[g].q50 = a.sketch.quantile(0.5);
    rows[g].q95 = a.sketch.quantile(0.95);
  }
  return rows;
}

RunResult run(const ExperimentConfig& config) {
  config.validate();
  // Fail on unwritable outputs before spending any compute.
  if (!config.output_json.empty()) ensure_writable(config.output_json);
  if (!config.output_csv.empty()) ensure_writable(config.output_csv);

  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  res.experiment_id = to_string(config.id);
  res.config_hash = config.hash();
  res.base_seed = config.base_seed;
  res.replications = config.replications;
  res.threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                    : config.threads;

  switch (config.id) {
    case ExperimentId::wk_convergence:
    case ExperimentId::hill_ratio: {
      std::function<double(std::size_t)> auto_target;
      const Replicate rep = config.id == ExperimentId::wk_convergence
                                ? wk_replicate(config, auto_target)
                                : hill_replicate(config, auto_target);
      res.rows = aggregate_replications(rep, config.grid, config.replications, config.base_seed,
                                        res.threads);
      std::function<double(std::size_t)> target;
      if (config.params.contains("target")) {
        const json& t = config.params.at("target");
        if (t.is_number()) {
          const double v = t.get<double>();
          target = [v](std::size_t) { return v; };
        } else if (t == "auto") {
          target = auto_target;
        } else if (t != "none") {
          throw ConfigError("target must be a number, \"auto\" or \"none\"");
        }
      } else {
        target = auto_target;
      }
      if (target) {
        for (auto& r : res.rows) {
          r.target = target(r.index);
          if (r.se > 0.0) r.z = (r.mean - *r.target) / r.se;
        }
      }
      break;
    }
    case ExperimentId::gcip_sweep: {
      const std::size_t q_max = param_or<std::size_t>(config.params, "q_max", 10000);
      const auto deltas = param_or(config.params, "deltas", std::vector<double>{1.0});
      const CovarianceModel model = model_for(config, q_max);
      json sweeps = json::array();
      for (double d : deltas) {
        const auto g = eval_gcip(model, d, q_max);
        sweeps.push_back({{"delta", d},
                          {"prefix", to_json(g.prefix)},
                          {"blocks", to_json(g.blocks)},
                          {"verdict", to_string(g.combined())}});
      }
      res.details = {{"model", model.label()}, {"sweeps", sweeps}};
      break;
    }
    case ExperimentId::maxvar_probe: {
      const auto gen = generator_from_json(config.params.value("generator", json{{"kind", "iid"}}));
      const std::size_t n = param_or<std::size_t>(config.params, "n", 100);
      std::optional<double> known;
      if (config.params.contains("known_variance")) {
        known = config.params.at("known_variance").get<double>();
      }
      const auto probe = maxvar_probe(
          [&gen](SeededStream& s, std::size_t m) { return generate(gen, s, m); },
          param_or(config.params, "r", 2.0), n, lambdas_from_json(config.params),
          config.replications, config.base_seed, known);
      res.details = to_json(probe);
      res.details["generator"] = gen.label();
      break;
    }
    case ExperimentId::condition_suite: {
      const std::size_t n_max = param_or<std::size_t>(config.params, "n_max", 10000);
      const json list = config.params.value("conditions", json::array());
      json reports = json::array();
      json model_conditions = json::array();
      for (const auto& c : list) {
        if (param_or<std::string>(c, "name", "") == "evt") {
          for (const auto& r :
               eval_evt_conditions(evt_params_from_json(c), param_or(c, "k_max", n_max))) {
            reports.push_back(to_json(r));
          }
        } else {
          model_conditions.push_back(c);
        }
      }
      if (!model_conditions.empty()) {
        if (!config.params.contains("model")) throw ConfigError("condition_suite needs params.model");
        const CovarianceModel model = model_for(config, n_max);
        for (auto& r : run_conditions(model, model_conditions, n_max)) reports.push_back(r);
      }
      res.details = {{"reports", reports}};
      break;
    }
  }

  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!config.output_json.empty()) write_file_atomic(config.output_json, res.to_json().dump(2) + "\n");
  if (!config.output_csv.empty()) write_file_atomic(config.output_csv, res.to_csv());
  return res;
}

json RunResult::payload() const {
  json rows_j = json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"index", r.index},
                      {"count", r.count},
                      {"mean", number_to_json(r.mean)},
                      {"se", number_to_json(r.se)},
                      {"q05", number_to_json(r.q05)},
                      {"q50", number_to_json(r.q50)},
                      {"q95", number_to_json(r.q95)},
                      {"target", r.target ? number_to_json(*r.target) : json(nullptr)},
                      {"z", r.z ? number_to_json(*r.z) : json(nullptr)}});
  }
  return {{"experiment_id", experiment_id},
          {"config_hash", config_hash},
          {"base_seed", base_seed},
          {"replications", replications},
          {"seeds", {{"first", base_seed}, {"last", base_seed + replications - 1}}},
          {"rows", rows_j},
          {"details", details}};
}

json RunResult::to_json() const {
  json j = payload();
  j["timing"] = {{"wall_time_s", wall_time_s}, {"threads", threads}};
  return j;
}

RunResult RunResult::from_json(const json& j) {
  RunResult r;
  r.experiment_id = j.at("experiment_id").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.base_seed = j.at("base_seed").get<std::uint64_t>();
  r.replications = j.at("replications").get<std::size_t>();
  for (const auto& e : j.at("rows")) {
    GridStats g;
    g.index = e.at("index").get<std::size_t>();
    g.count = e.at("count").get<std::uint64_t>();
    g.mean = number_from_json(e.at("mean"));
    g.se = number_from_json(e.at("se"));
    g.q05 = number_from_json(e.at("q05"));
    g.q50 = number_from_json(e.at("q50"));
    g.q95 = number_from_json(e.at("q95"));
    if (!e.at("target").is_null()) g.target = number_from_json(e.at("target"));
    if (!e.at("z").is_null()) g.z = number_from_json(e.at("z"));
    r.rows.push_back(g);
  }
  r.details = j.value("details", json::object());
  if (j.contains("timing")) {
    r.wall_time_s = j.at("timing").value("wall_time_s", 0.0);
    r.threads = j.at("timing").value("threads", 1u);
  }
  return r;
}

std::string RunResult::to_csv() const {
  std::string out = "index,count,mean,se,q05,q50,q95,target,z\n";
  for (const auto& r : rows) {
    out += std::to_string(r.index) + "," + std::to_string(r.count) + "," + format_double(r.mean) +
           "," + format_double(r.se) + "," + format_double(r.q05) + "," + format_double(r.q50) +
           "," + format_double(r.q95) + "," + (r.target ? format_double(*r.target) : "") + "," +
           (r.z ? format_double(*r.z) : "") + "\n";
  }
  return out;
}

RunResult RunResult::from_csv(const std::string& text) {
  RunResult res;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "index,count,mean,se,q05,q50,q95,target,z") {
    throw ParameterError("unexpected RunResult CSV header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 9) throw ParameterError("bad RunResult CSV row '" + line + "'");
    GridStats g;
    g.index = static_cast<std::size_t>(std::stoull(c[0]));
    g.count = std::stoull(c[1]);
    g.mean = parse_double(c[2]);
    g.se = parse_double(c[3]);
    g.q05 = parse_double(c[4]);
    g.q50 = parse_double(c[5]);
    g.q95 = parse_double(c[6]);
    if (!c[7].empty()) g.target = parse_double(c[7]);
    if (!c[8].empty()) g.z = parse_double(c[8]);
    res.rows.push_back(g);
  }
  return res;
}

DeviationTable compare_to_target(const RunResult& result,
                                 const std::vector<std::pair<std::size_t, double>>& target) {
  if (target.size() != result.rows.size()) throw ParameterError("target grid size mismatch");
  DeviationTable t;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto& r = result.rows[i];
    if (target[i].first != r.index) {
      throw ParameterError("target grid mismatch at index " + std::to_string(r.index));
    }
    DeviationRow d;
    d.index = r.index;
    d.mean = r.mean;
    d.target = target[i].second;
    d.difference = r.mean - d.target;
    d.z = r.se > 0.0 ? d.difference / r.se
                     : (d.difference == 0.0 ? 0.0 : std::copysign(HUGE_VAL, d.difference));
    if (i == 0 || std::abs(d.z) > t.worst_abs_z) {
      t.worst_abs_z = std::abs(d.z);
      t.worst_index = d.index;
    }
    t.rows.push_back(d);
  }
  return t;
}

DeviationTable compare_to_target(const RunResult& result,
                                 const std::function<double(std::size_t)>& target) {
  if (!target) throw ParameterError("empty target rule");
  std::vector<std::pair<std::size_t, double>> t;
  for (const auto& r : result.rows) t.emplace_back(r.index, target(r.index));
  return compare_to_target(result, t);
}

CovarianceModel covariance_model_from_json(const json& spec, std::size_t max_index) {
  const std::string kind = param_or<std::string>(spec, "kind", "");
  CovarianceModel model = [&]() {
    if (kind == "independent") {
      const double a = param_or(spec, "variance_exponent", 0.0);
      const double s = param_or(spec, "variance_scale", 1.0);
      return CovarianceModel::independent(
          [a, s](std::size_t i) { return s * std::pow(static_cast<double>(i), a); },
          "independent(v_i=" + format_double(s) + "*i^" + format_double(a) + ")");
    }
    if (kind == "stationary") {
      const double rho0 = param_or(spec, "rho0", 1.0);
      return CovarianceModel::stationary(
          rho_rule_from_json(spec, rho0),
          "stationary(" + param_or<std::string>(spec, "rho", "zero") + ")");
    }
    if (kind == "evt") {
      return CovarianceModel::evt_oracle(evt_params_from_json(spec), max_index);
    }
    if (kind == "matrix_csv") {
      std::size_t n = 0;
      auto m = std::make_shared<const std::vector<double>>(
          load_matrix_csv(spec.at("path").get<std::string>(), n));
      // Validate symmetry and definiteness without the sign restriction.
      semidefinite_cholesky(*m, n, false);
      EmpiricalCov e;
      e.n = n;
      e.replications = 0;
      e.cov = *m;
      e.se.assign(n * n, 0.0);
      return CovarianceModel::empirical(std::move(e));
    }
    throw ConfigError("unknown covariance model kind '" + kind + "'");
  }();
  if (spec.contains("scale")) model = model.scaled(spec.at("scale").get<double>());
  if (param_or(spec, "drop_negative", false)) model = drop_negative_covariances(std::move(model));
  return model;
}

AssocGenerator generator_from_json(const json& spec) {
  const std::string kind = param_or<std::string>(spec, "kind", "iid");
  const IidDist dist = iid_dist_from_string(param_or<std::string>(spec, "dist", "normal"));
  if (kind == "iid") return AssocGenerator::iid(dist);
  if (kind == "partial_sums") return AssocGenerator::partial_sums(dist);
  if (kind == "multinomial") {
    return AssocGenerator::multinomial(param_or<std::size_t>(spec, "trials", 100));
  }
  if (kind == "gaussian") {
    if (spec.contains("path")) {
      std::size_t n = 0;
      auto m = load_matrix_csv(spec.at("path").get<std::string>(), n);
      return AssocGenerator::gaussian_matrix(std::move(m), n);
    }
    auto rho = rho_rule_from_json(spec, 1.0);
    return AssocGenerator::gaussian(
        [rho](std::size_t i, std::size_t j) { return rho(i > j ? i - j : j - i); },
        "gaussian(" + param_or<std::string>(spec, "rho", "zero") + ")");
  }
  if (kind == "transform") {
    const std::string map = param_or<std::string>(spec, "map", "identity");
    AssocGenerator base = generator_from_json(spec.value("base", json{{"kind", "iid"}}));
    if (map == "exp") {
      return AssocGenerator::transform(std::move(base),
                                       [](std::size_t, double x) { return std::exp(x); }, true, map);
    }
    if (map == "tanh") {
      return AssocGenerator::transform(std::move(base),
                                       [](std::size_t, double x) { return std::tanh(x); }, true, map);
    }
    if (map == "cube") {
      return AssocGenerator::transform(std::move(base),
                                       [](std::size_t, double x) { return x * x * x; }, true, map);
    }
    if (map == "negate") {
      return AssocGenerator::transform(std::move(base), [](std::size_t, double x) { return -x; },
                                       false, map);
    }
    if (map == "identity") {
      return AssocGenerator::transform(std::move(base), [](std::size_t, double x) { return x; },
                                       true, map);
    }
    throw ConfigError("unknown transform map '" + map + "'");
  }
  throw ConfigError("unknown generator kind '" + kind + "'");
}

}  // namespace slln
