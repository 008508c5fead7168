// Command-line front end: simulation, estimators, condition checks, experiments
// and exact moment oracles.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slln_lab/association.hpp"
#include "slln_lab/conditions.hpp"
#include "slln_lab/errors.hpp"
#include "slln_lab/estimators.hpp"
#include "slln_lab/evt_process.hpp"
#include "slln_lab/io.hpp"
#include "slln_lab/moments.hpp"
#include "slln_lab/montecarlo.hpp"
#include "slln_lab/sampling.hpp"

namespace {

using namespace slln;

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;

struct OutputOpts {
  std::string format = "csv";
  std::string output;
};

void add_output_opts(CLI::App* app, OutputOpts& o) {
  app->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app->add_option("--output,-o", o.output,
                  "Output file (relative paths resolve under $SLLN_LAB_OUTPUT_DIR when set); "
                  "stdout when omitted");
}

std::string resolve_output(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("SLLN_LAB_OUTPUT_DIR");
  std::filesystem::path p(path);
  if (dir != nullptr && *dir != '\0' && p.is_relative()) return (std::filesystem::path(dir) / p).string();
  return path;
}

// Data goes to the output file or stdout; returns true if it went to a file.
bool emit(const OutputOpts& o, const std::string& csv, const json& j) {
  const std::string body = o.format == "json" ? j.dump(2) + "\n" : csv;
  if (o.output.empty()) {
    std::cout << body;
    return false;
  }
  write_file_atomic(resolve_output(o.output), body);
  return true;
}

std::vector<std::size_t> parse_index_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(cell)));
    } catch (const std::exception&) {
      throw ParameterError("bad index '" + cell + "'");
    }
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(parse_double(cell));
  }
  return out;
}

// ---------------------------------------------------------------- simulate-wk

struct SimulateOpts {
  double gamma = 2.0;
  double tau = 1.0;
  std::optional<double> alpha_exponent;
  std::size_t kmax = 100;
  std::uint64_t seed = kDefaultSeed;
  std::string scale = "normalized";
  bool centred = false;
  OutputOpts out;
};

void setup_simulate(CLI::App& root, SimulateOpts& o, int& rc) {
  auto* app = root.add_subcommand(
      "simulate-wk",
      "One seeded path of the exponential-spacing process with weights f(j) = j^tau.\n"
      "  normalized:   (1/f(k)) sum_{j<k} (f(j)-f(j-1)) exp(-gamma sum_{h=j}^{k-1} E_h/h)\n"
      "  raw:          f(k) times the normalized value\n"
      "  hill_matched: value at k+1 divided by f(k), distributed as the Hill ratio at k\n"
      "  --centred:    alpha(k) (sum_{j<k} df(j) (S_{j,k} - E S_{j,k})) / k instead");
  app->add_option("--gamma", o.gamma, "Tail index gamma > 0")->capture_default_str();
  app->add_option("--tau", o.tau, "Weight exponent tau > 0")->capture_default_str();
  app->add_option("--alpha-exponent", o.alpha_exponent, "alpha(k) = k^a (default 1 - tau)");
  app->add_option("--kmax", o.kmax, "Path length")->capture_default_str();
  app->add_option("--seed", o.seed, "Stream seed")->capture_default_str();
  app->add_option("--scale", o.scale, "Path scale")
      ->check(CLI::IsMember({"normalized", "raw", "hill_matched", "hill"}))
      ->capture_default_str();
  app->add_flag("--centred", o.centred, "Emit the centred sum S*_k / k");
  add_output_opts(app, o.out);
  app->callback([&]() {
    EvtProcessParams p = EvtProcessParams::power_case(o.tau, o.gamma);
    if (o.alpha_exponent) p.alpha = ScalingRule::power(*o.alpha_exponent);
    SeededStream stream(o.seed);
    const WkPath path = o.centred ? simulate_sk_star(stream, p, o.kmax)
                                  : simulate_wk(stream, p, o.kmax, wk_scale_from_string(o.scale));
    emit(o.out, to_csv(path), to_json(path));
    rc = kExitOk;
  });
}

// ----------------------------------------------------------------------- hill

struct HillOpts {
  std::size_t n = 10000;
  std::string ks = "100";
  double gamma = 2.0;
  double tau = 1.0;
  std::string mode = "gamma";
  double y0 = 0.0;
  double c = 1.0;
  std::uint64_t seed = kDefaultSeed;
  std::string input;
  OutputOpts out;
};

void setup_hill(CLI::App& root, HillOpts& o, int& rc) {
  auto* app = root.add_subcommand(
      "hill",
      "Functional Hill statistic T_n(f) = (1/f(k)) sum_{j=1}^{k} f(j) (Y_{n-j+1,n} - Y_{n-j,n})\n"
      "on log-observations Y, and the ratio T_n(f) / (y0 - Y_{n-k,n}).\n"
      "Samples come from y0 - c u^gamma (mode gamma) or y0 - c u^(1/gamma) (mode\n"
      "inverse_gamma) unless --input names a file with one log-observation per line.");
  app->add_option("--n", o.n, "Sample size")->capture_default_str();
  app->add_option("--k", o.ks, "Comma-separated k values")->capture_default_str();
  app->add_option("--gamma", o.gamma, "Tail index")->capture_default_str();
  app->add_option("--tau", o.tau, "Weight exponent, f(j) = j^tau")->capture_default_str();
  app->add_option("--mode", o.mode, "Exponent convention")
      ->check(CLI::IsMember({"gamma", "inverse_gamma"}))
      ->capture_default_str();
  app->add_option("--y0", o.y0, "Upper endpoint of the log-observations")->capture_default_str();
  app->add_option("--c", o.c, "Scale c > 0")->capture_default_str();
  app->add_option("--seed", o.seed, "Stream seed")->capture_default_str();
  app->add_option("--input", o.input, "Read log-observations from this file")
      ->check(CLI::ExistingFile);
  add_output_opts(app, o.out);
  app->callback([&]() {
    const WeightFunction f = WeightFunction::power(o.tau);
    OrderStatSample sample;
    if (!o.input.empty()) {
      std::istringstream in(read_file(o.input));
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        sample.values.push_back(parse_double(line));
      }
      std::sort(sample.values.begin(), sample.values.end());
    } else {
      QuantileRep rep;
      rep.gamma = o.gamma;
      rep.mode = exponent_mode_from_string(o.mode);
      rep.y0 = o.y0;
      rep.c = o.c;
      SeededStream stream(o.seed);
      sample = sample_weibull_domain(stream, o.n, rep);
    }
    const auto sweep = hill_sweep(sample, parse_index_list(o.ks), f, o.y0);
    emit(o.out, to_csv(sweep), to_json(sweep));
    rc = kExitOk;
  });
}

// ------------------------------------------------------------ check-conditions

struct ModelOpts {
  std::string kind = "independent";
  double variance_exponent = 0.0;
  double variance_scale = 1.0;
  std::string rho = "zero";
  double rho0 = 1.0;
  double rho_exponent = 2.0;
  double rho_base = 0.5;
  double rho_value = 0.5;
  std::string matrix;
  double gamma = 2.0;
  double tau = 1.0;
  std::optional<double> alpha_exponent;
  double delta = 0.5;
  std::size_t L = 10;
  double scale = 1.0;
  bool drop_negative = false;
};

void add_model_opts(CLI::App* app, ModelOpts& m) {
  app->add_option("--model", m.kind, "Covariance model")
      ->check(CLI::IsMember({"independent", "stationary", "evt", "matrix"}))
      ->capture_default_str();
  app->add_option("--variance-exponent", m.variance_exponent, "independent: Var X_i = s i^a")
      ->capture_default_str();
  app->add_option("--variance-scale", m.variance_scale, "independent: s")->capture_default_str();
  app->add_option("--rho", m.rho, "stationary: covariance rule for lags l >= 1")
      ->check(CLI::IsMember({"zero", "power", "geometric", "constant"}))
      ->capture_default_str();
  app->add_option("--rho0", m.rho0, "stationary: rho(0) = Var X_1")->capture_default_str();
  app->add_option("--rho-exponent", m.rho_exponent, "power rule: rho(l) = l^-p")
      ->capture_default_str();
  app->add_option("--rho-base", m.rho_base, "geometric rule: rho(l) = rho0 b^l")
      ->capture_default_str();
  app->add_option("--rho-value", m.rho_value, "constant rule: rho(l) = c")->capture_default_str();
  app->add_option("--matrix", m.matrix, "matrix: covariance matrix CSV")->check(CLI::ExistingFile);
  app->add_option("--gamma", m.gamma, "evt: tail index")->capture_default_str();
  app->add_option("--tau", m.tau, "evt: weight exponent")->capture_default_str();
  app->add_option("--alpha-exponent", m.alpha_exponent, "evt: alpha(k) = k^a (default 1 - tau)");
  app->add_option("--L", m.L, "evt: cutoff index")->capture_default_str();
  app->add_option("--scale", m.scale, "Multiply every covariance by this factor")
      ->capture_default_str();
  app->add_flag("--drop-negative", m.drop_negative, "Replace negative covariances by 0");
}

json model_spec(const ModelOpts& m) {
  json s;
  if (m.kind == "independent") {
    s = {{"kind", "independent"},
         {"variance_exponent", m.variance_exponent},
         {"variance_scale", m.variance_scale}};
  } else if (m.kind == "stationary") {
    s = {{"kind", "stationary"},      {"rho", m.rho},       {"rho0", m.rho0},
         {"exponent", m.rho_exponent}, {"base", m.rho_base}, {"value", m.rho_value}};
  } else if (m.kind == "evt") {
    s = {{"kind", "evt"}, {"gamma", m.gamma}, {"tau", m.tau}, {"delta", m.delta}, {"L", m.L}};
    if (m.alpha_exponent) s["alpha_exponent"] = *m.alpha_exponent;
  } else {
    if (m.matrix.empty()) throw ParameterError("--model matrix needs --matrix");
    s = {{"kind", "matrix_csv"}, {"path", m.matrix}};
  }
  if (m.scale != 1.0) s["scale"] = m.scale;
  if (m.drop_negative) s["drop_negative"] = true;
  return s;
}

struct CheckOpts {
  ModelOpts model;
  double delta = 1.0;
  double nu = 0.0;
  double r = 2.0;
  double b_exponent = 1.0;
  std::size_t nmax = 10000;
  std::size_t kmax = 100000;
  double tol = 1e-8;
  VerdictRule rule;
  OutputOpts out;
};

void report_verdicts(const std::vector<ConditionReport>& reps, const OutputOpts& o) {
  json arr = json::array();
  for (const auto& r : reps) arr.push_back(to_json(r));
  const bool to_file = emit(o, to_csv(reps), arr);
  std::ostream& os = to_file ? std::cout : std::cerr;
  for (const auto& r : reps) {
    os << r.condition_id << " " << to_string(r.verdict) << " sup=" << format_double(r.running_sup)
       << " slope=" << format_double(r.loglog_slope) << "\n";
  }
}

void setup_check(CLI::App& root, CheckOpts& o, int& rc) {
  auto* app = root.add_subcommand(
      "check-conditions",
      "Evaluate a strong-law condition on a grid and give a bounded / diverging /\n"
      "inconclusive verdict from the log-log slope of the top half of the grid.\n"
      "Verdict lines go to stdout when the data goes to --output, else to stderr.");
  app->require_subcommand(1);
  app->add_option("--slope-tol", o.rule.slope_tol, "Slope tolerance")->capture_default_str();
  app->add_option("--residual-tol", o.rule.residual_tol, "RMS fit residual tolerance")
      ->capture_default_str();

  auto common = [&](CLI::App* sub, bool with_model = true) {
    if (with_model) add_model_opts(sub, o.model);
    add_output_opts(sub, o.out);
  };
  auto build = [&o](std::size_t n) { return covariance_model_from_json(model_spec(o.model), n); };

  auto* gcip = app->add_subcommand(
      "gcip",
      "Var(X_1+...+X_q) / q^((3-delta)/2) for q <= nmax, and over square blocks\n"
      "q^2 < k <= (q+1)^2: sup_{j<=k} Var(X_{q^2+1}+...+X_j) / q^(3-delta), q <= sqrt(nmax)");
  gcip->add_option("--delta", o.delta, "0 < delta < 3")->capture_default_str();
  gcip->add_option("--nmax", o.nmax, "Largest q")->capture_default_str();
  common(gcip);
  gcip->callback([&, build]() {
    const auto g = eval_gcip(build(o.nmax), o.delta, o.nmax, o.rule);
    report_verdicts({g.prefix, g.blocks}, o.out);
    rc = kExitOk;
  });

  auto* gchr = app->add_subcommand(
      "gchr", "sum_{i<=n} b_i^(-r) Cov(X_i, S_n) with b_i = i^e, for n <= nmax");
  gchr->add_option("--r", o.r, "r > 0")->capture_default_str();
  gchr->add_option("--b-exponent", o.b_exponent, "b_i = i^e, e >= 0")->capture_default_str();
  gchr->add_option("--nmax", o.nmax, "Largest n")->capture_default_str();
  common(gchr);
  gchr->callback([&, build]() {
    const double e = o.b_exponent;
    const auto r = eval_gchr(
        build(o.nmax), [e](std::size_t i) { return std::pow(static_cast<double>(i), e); }, o.r,
        o.nmax, o.rule, "i^" + format_double(e));
    report_verdicts({r}, o.out);
    rc = kExitOk;
  });

  auto* kol = app->add_subcommand("kolmogorov", "sum_{i<=n} Var(X_i) / i^2");
  kol->add_option("--nmax", o.nmax, "Largest n")->capture_default_str();
  common(kol);
  kol->callback([&, build]() {
    report_verdicts({eval_kolmogorov(build(o.nmax), o.nmax, o.rule)}, o.out);
    rc = kExitOk;
  });

  auto* vg = app->add_subcommand("variance-growth", "n^-(1+nu) sum_{i<=n} Var(X_i)");
  vg->add_option("--nu", o.nu, "nu")->capture_default_str();
  vg->add_option("--nmax", o.nmax, "Largest n")->capture_default_str();
  common(vg);
  vg->callback([&, build]() {
    report_verdicts({eval_variance_growth(build(o.nmax), o.nu, o.nmax, o.rule)}, o.out);
    rc = kExitOk;
  });

  auto* q2 = app->add_subcommand(
      "q2", "Stationary: q^-nu [rho(0) + (2/q) sum_{i=2}^{q} (q-i+1) rho(i-1)]");
  q2->add_option("--nu", o.nu, "nu")->capture_default_str();
  q2->add_option("--nmax", o.nmax, "Largest q")->capture_default_str();
  common(q2);
  q2->callback([&, build]() {
    report_verdicts({eval_q2(build(o.nmax), o.nu, o.nmax, o.rule)}, o.out);
    rc = kExitOk;
  });

  auto* ces = app->add_subcommand(
      "cesaro", "Stationary: (1/n) sum_{j=1}^{n} rho(j-1); bounded means it tends to 0");
  ces->add_option("--nmax", o.nmax, "Largest n")->capture_default_str();
  common(ces);
  ces->callback([&, build]() {
    report_verdicts({eval_cesaro(build(o.nmax), o.nmax, o.rule)}, o.out);
    rc = kExitOk;
  });

  auto* cs = app->add_subcommand("covariance-series", "Stationary: sum_{j=2}^{n} Cov(X_1, X_j)");
  cs->add_option("--nmax", o.nmax, "Largest n")->capture_default_str();
  common(cs);
  cs->callback([&, build]() {
    report_verdicts({eval_covariance_series(build(o.nmax), o.nmax, o.rule)}, o.out);
    rc = kExitOk;
  });

  auto* bir = app->add_subcommand("birkel", "sum_{i<=n} i^-2 Cov(X_i, S_i)");
  bir->add_option("--nmax", o.nmax, "Largest n")->capture_default_str();
  common(bir);
  bir->callback([&, build]() {
    report_verdicts({eval_birkel(build(o.nmax), o.nmax, o.rule)}, o.out);
    rc = kExitOk;
  });

  auto* nw = app->add_subcommand(
      "newman", "Stationary: sigma^2 = rho(0) + 2 sum_{l>=1} rho(l); exit 1 when it diverges");
  nw->add_option("--tol", o.tol, "Tail tolerance")->capture_default_str();
  common(nw);
  nw->callback([&, build]() {
    const auto s = eval_newman_sigma2(build(1u << 30), o.tol);
    const std::string csv =
        "value,diverging,converged,tail_estimate,terms\n" +
        (s.value ? format_double(*s.value) : std::string()) + "," + (s.diverging ? "1" : "0") +
        "," + (s.converged ? "1" : "0") + "," + format_double(s.tail_estimate) + "," +
        std::to_string(s.terms) + "\n";
    emit(o.out, csv, to_json(s));
    if (s.diverging) {
      std::cerr << "error: the covariance series diverges\n";
      rc = kExitCompute;
    } else {
      rc = kExitOk;
    }
  });

  auto* evt = app->add_subcommand(
      "evt",
      "Sufficient conditions for S*_k/k -> 0 with f(j) = j^tau, alpha(k) = k^(1-tau):\n"
      "  evt_diag_variance    alpha^2 k^-(2g+1+nu) sum_{j=L}^{k-1} df(j)^2 j^(2g)\n"
      "  evt_cross_cov        alpha^2 k^-(1+nu) sum_{j=L+1}^{k-1} [sum_{i=L}^{j-1} df(i)] df(j)/j\n"
      "  evt_cross_mean       alpha^2 k^-(1+nu) sum_{j=L}^{k-1} df(j)/j\n"
      "  evt_block_variance   square-block analogue of the first, over q^(3-delta)\n"
      "  evt_block_cross_cov  square-block analogue of the second, over q^(3-delta)\n"
      "with nu = (1-delta)/2.");
  evt->alias("prop2");
  evt->add_option("--gamma", o.model.gamma, "Tail index")->capture_default_str();
  evt->add_option("--tau", o.model.tau, "Weight exponent")->capture_default_str();
  evt->add_option("--alpha-exponent", o.model.alpha_exponent, "alpha(k) = k^a (default 1 - tau)");
  evt->add_option("--delta", o.model.delta, "0 < delta < 3")->capture_default_str();
  evt->add_option("--L", o.model.L, "Cutoff index")->capture_default_str();
  evt->add_option("--kmax", o.kmax, "Largest k")->capture_default_str();
  common(evt, false);
  evt->callback([&]() {
    EvtProcessParams p =
        EvtProcessParams::power_case(o.model.tau, o.model.gamma, o.model.delta, o.model.L);
    if (o.model.alpha_exponent) p.alpha = ScalingRule::power(*o.model.alpha_exponent);
    const auto reps = eval_evt_conditions(p, o.kmax, o.rule);
    report_verdicts(std::vector<ConditionReport>(reps.begin(), reps.end()), o.out);
    rc = kExitOk;
  });
}

// --------------------------------------------------------------- probe-maxvar

struct ProbeOpts {
  std::string generator = "iid";
  std::string dist = "normal";
  std::string rho = "geometric";
  double rho_base = 0.5;
  double rho_exponent = 2.0;
  std::size_t trials = 100;
  std::size_t n = 100;
  double r = 2.0;
  std::string lambdas = "0.5,0.75,1,1.25,1.5,2,2.5,3";
  bool scale_lambdas = true;
  std::size_t reps = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> known_variance;
  OutputOpts out;
};

void setup_probe(CLI::App& root, ProbeOpts& o, int& rc) {
  auto* app = root.add_subcommand(
      "probe-maxvar",
      "Monte Carlo estimate of C = sup_lambda lambda^r P(max_{l<=n} |S_l| >= lambda) / Var(S_n)\n"
      "and of E[(max_{l<=n} |S_l|)^2] / Var(S_n). Lambdas are in units of sqrt(Var S_n)\n"
      "unless --absolute-lambdas is given.");
  app->add_option("--generator", o.generator, "Sequence generator")
      ->check(CLI::IsMember({"iid", "gaussian", "partial_sums", "multinomial"}))
      ->capture_default_str();
  app->add_option("--dist", o.dist, "Marginal for iid / partial_sums")
      ->check(CLI::IsMember({"normal", "exponential", "uniform", "rademacher"}))
      ->capture_default_str();
  app->add_option("--rho", o.rho, "gaussian: correlation rule")
      ->check(CLI::IsMember({"zero", "power", "geometric"}))
      ->capture_default_str();
  app->add_option("--rho-base", o.rho_base, "geometric rule base")->capture_default_str();
  app->add_option("--rho-exponent", o.rho_exponent, "power rule exponent")->capture_default_str();
  app->add_option("--trials", o.trials, "multinomial trials")->capture_default_str();
  app->add_option("--n", o.n, "Number of summands")->capture_default_str();
  app->add_option("--r", o.r, "Exponent r > 0")->capture_default_str();
  app->add_option("--lambdas", o.lambdas, "Comma-separated lambda grid")->capture_default_str();
  app->add_flag("!--absolute-lambdas", o.scale_lambdas, "Use the lambda grid as given");
  app->add_option("--reps", o.reps, "Replications (>= 1000)")->capture_default_str();
  app->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  app->add_option("--known-variance", o.known_variance, "Use this Var(S_n) instead of estimating");
  add_output_opts(app, o.out);
  app->callback([&]() {
    json spec = {{"kind", o.generator}, {"dist", o.dist},         {"rho", o.rho},
                 {"base", o.rho_base},  {"exponent", o.rho_exponent}, {"trials", o.trials}};
    const auto gen = generator_from_json(spec);
    auto lambdas = parse_real_list(o.lambdas);
    const PathSampler sampler = [&gen](SeededStream& s, std::size_t m) { return generate(gen, s, m); };
    if (o.scale_lambdas) {
      // Scale by sqrt(Var S_n), using a pilot run on seeds disjoint from the probe.
      double v = 0.0;
      if (o.known_variance) {
        v = *o.known_variance;
      } else {
        const auto pilot = maxvar_probe(sampler, o.r, o.n, {1.0}, 1000, o.seed + o.reps);
        v = pilot.var_sn;
      }
      for (auto& l : lambdas) l *= std::sqrt(std::max(v, 0.0));
    }
    const auto p = maxvar_probe(sampler, o.r, o.n, lambdas, o.reps, o.seed, o.known_variance);
    std::string csv = "lambda,exceed_prob,ratio,se\n";
    for (const auto& l : p.per_lambda) {
      csv += format_double(l.lambda) + "," + format_double(l.exceed_prob) + "," +
             format_double(l.ratio) + "," + format_double(l.se) + "\n";
    }
    const bool to_file = emit(o.out, csv, to_json(p));
    std::ostream& os = to_file ? std::cout : std::cerr;
    if (p.degenerate) {
      os << "degenerate: Var(S_n) = 0\n";
      rc = kExitCompute;
      return;
    }
    os << "C=" << format_double(p.constant) << " se=" << format_double(p.constant_se)
       << " emax_ratio=" << format_double(p.emax_ratio) << "\n";
    rc = kExitOk;
  });
}

// ----------------------------------------------------------------- experiment

struct ExperimentOpts {
  std::string config;
  std::optional<unsigned> threads;
  std::string output_json;
  std::string output_csv;
};

void setup_experiment(CLI::App& root, ExperimentOpts& o, int& rc) {
  auto* app = root.add_subcommand(
      "experiment",
      "Run a seeded replication experiment from a JSON config (wk_convergence, hill_ratio,\n"
      "gcip_sweep, maxvar_probe, condition_suite). Replication i uses seed base_seed + i.");
  app->add_option("config", o.config, "Config file")->required()->check(CLI::ExistingFile);
  app->add_option("--threads", o.threads, "Worker thread cap (0 = all cores)");
  app->add_option("--output-json", o.output_json, "Override output.json");
  app->add_option("--output-csv", o.output_csv, "Override output.csv");
  app->callback([&]() {
    ExperimentConfig c = ExperimentConfig::from_file(o.config);
    if (o.threads) c.threads = *o.threads;
    if (!o.output_json.empty()) c.output_json = o.output_json;
    if (!o.output_csv.empty()) c.output_csv = o.output_csv;
    c.output_json = resolve_output(c.output_json);
    c.output_csv = resolve_output(c.output_csv);
    const RunResult res = run(c);
    if (c.output_json.empty() && c.output_csv.empty()) {
      std::cout << res.to_json().dump(2) << "\n";
    } else {
      for (const auto& r : res.rows) {
        std::cout << r.index << " mean=" << format_double(r.mean) << " se=" << format_double(r.se);
        if (r.target) std::cout << " target=" << format_double(*r.target);
        std::cout << "\n";
      }
      std::cout << "config_hash=" << res.config_hash << "\n";
    }
    rc = kExitOk;
  });
}

// --------------------------------------------------------------------- oracle

struct OracleOpts {
  std::size_t i = 1;
  std::size_t j = 1;
  std::size_t k = 2;
  double gamma = 2.0;
  double tau = 1.0;
  std::optional<double> alpha_exponent;
  std::size_t k0 = 1000;
  OutputOpts out;
};

void print_value(const OutputOpts& o, const std::string& name, double v) {
  emit(o, format_double(v) + "\n", json{{name, number_to_json(v)}});
}

void setup_oracle(CLI::App& root, OracleOpts& o, int& rc) {
  auto* app = root.add_subcommand("oracle", "Exact moments of the block factors S_{j,k}");
  app->require_subcommand(1);
  auto idx = [&](CLI::App* sub, bool with_i) {
    if (with_i) sub->add_option("--i", o.i, "Index i <= j")->capture_default_str();
    sub->add_option("--j", o.j, "Index j")->capture_default_str();
    sub->add_option("--k", o.k, "Index k >= j")->capture_default_str();
    sub->add_option("--gamma", o.gamma, "gamma > 0")->capture_default_str();
    add_output_opts(sub, o.out);
  };

  auto* s = app->add_subcommand("s_jk", "E S_{j,k} = prod_{h=j}^{k-1} h/(h+gamma)");
  idx(s, false);
  s->callback([&]() {
    print_value(o.out, "s_jk", s_jk(o.j, o.k, o.gamma));
    rc = kExitOk;
  });

  auto* v = app->add_subcommand("var_S", "Var S_{j,k}");
  idx(v, false);
  v->callback([&]() {
    print_value(o.out, "var_S", var_S(o.j, o.k, o.gamma));
    rc = kExitOk;
  });

  auto* c = app->add_subcommand("cov_S", "Cov(S_{i,k}, S_{j,k}) = s_{i,j} Var S_{j,k}");
  idx(c, true);
  c->callback([&]() {
    print_value(o.out, "cov_S", cov_S(o.i, o.j, o.k, o.gamma));
    rc = kExitOk;
  });

  auto* nb = app->add_subcommand(
      "newman_bound",
      "gamma^2 sum_{h=j}^{k-1} h^-2, with gamma^2/j and gamma^2/(j-1) for comparison");
  idx(nb, false);
  nb->callback([&]() {
    const auto b = newman_bound(o.j, o.k, o.gamma);
    emit(o.out,
         "exact,stated_bound,integral_bound\n" + format_double(b.exact) + "," +
             format_double(b.stated_bound) + "," + format_double(b.integral_bound) + "\n",
         json{{"exact", b.exact}, {"stated_bound", b.stated_bound},
              {"integral_bound", b.integral_bound}});
    rc = kExitOk;
  });

  auto evt_params = [&o]() {
    EvtProcessParams p = EvtProcessParams::power_case(o.tau, o.gamma);
    if (o.alpha_exponent) p.alpha = ScalingRule::power(*o.alpha_exponent);
    return p;
  };
  auto* mk = app->add_subcommand(
      "mu_k", "mu_k = k^-1 sum_{j<k} alpha(k) df(j) s_{j,k}, f(j) = j^tau");
  mk->add_option("--k", o.k, "k >= 2")->capture_default_str();
  mk->add_option("--gamma", o.gamma, "gamma > 0")->capture_default_str();
  mk->add_option("--tau", o.tau, "tau > 0")->capture_default_str();
  mk->add_option("--alpha-exponent", o.alpha_exponent, "alpha(k) = k^a (default 1 - tau)");
  add_output_opts(mk, o.out);
  mk->callback([&, evt_params]() {
    print_value(o.out, "mu_k", mu_k(evt_params(), o.k));
    rc = kExitOk;
  });

  auto* ml = app->add_subcommand(
      "mu_limit",
      "Extrapolated limit of mu_k, with tau/(tau+gamma) and tau/(gamma+1) for comparison;\n"
      "exit 1 when mu_k diverges");
  ml->add_option("--gamma", o.gamma, "gamma > 0")->capture_default_str();
  ml->add_option("--tau", o.tau, "tau > 0")->capture_default_str();
  ml->add_option("--alpha-exponent", o.alpha_exponent, "alpha(k) = k^a (default 1 - tau)");
  ml->add_option("--k0", o.k0, "First k of the doubling sequence")->capture_default_str();
  add_output_opts(ml, o.out);
  ml->callback([&, evt_params]() {
    const auto m = mu_limit(evt_params(), o.k0);
    auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
    emit(o.out,
         "value,error_estimate,diverging,tau_over_tau_plus_gamma,tau_over_gamma_plus_one\n" +
             opt(m.value) + "," + format_double(m.error_estimate) + "," +
             (m.diverging ? "1" : "0") + "," + opt(m.tau_over_tau_plus_gamma) + "," +
             opt(m.tau_over_gamma_plus_one) + "\n",
         to_json(m));
    if (m.diverging) {
      std::cerr << "error: mu_k diverges\n";
      rc = kExitCompute;
    } else {
      rc = kExitOk;
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slln_lab: strong laws for associated sequences and extreme-value spacings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "slln_lab 1.0");

  int rc = kExitOk;
  SimulateOpts sim;
  HillOpts hill;
  CheckOpts check;
  ProbeOpts probe;
  ExperimentOpts exp;
  OracleOpts oracle;
  setup_simulate(app, sim, rc);
  setup_hill(app, hill, rc);
  setup_check(app, check, rc);
  setup_probe(app, probe, rc);
  setup_experiment(app, exp, rc);
  setup_oracle(app, oracle, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IndexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return rc;
}
