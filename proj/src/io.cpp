#include "slln_lab/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "slln_lab/errors.hpp"

namespace slln {

namespace fs = std::filesystem;

namespace {

std::string csv_safe(std::string s) {
  for (auto& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text,
                                               const std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (!seen_header) {
      if (cells != header) throw ParameterError("unexpected CSV header '" + line + "'");
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) throw ParameterError("bad CSV row '" + line + "'");
    rows.push_back(std::move(cells));
  }
  if (!seen_header) throw ParameterError("missing CSV header");
  return rows;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParameterError("bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf.data(), p);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ParameterError("bad number '" + std::string(s) + "'");
  }
  return v;
}

json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw ParameterError("expected a number");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

void ensure_writable(const std::string& path) {
  const fs::path target(path);
  if (fs::is_directory(target)) throw IoError("output path '" + path + "' is a directory");
  const fs::path probe = target.string() + ".probe." + std::to_string(::getpid());
  {
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("output path '" + path + "' is not writable");
  }
  std::error_code ec;
  fs::remove(probe, ec);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

json to_json(const WkPath& path) {
  json values = json::array();
  for (double v : path.values) values.push_back(number_to_json(v));
  return {{"seed", path.seed}, {"k_max", path.k_max}, {"scale", to_string(path.scale)},
          {"values", values}};
}

WkPath wk_path_from_json(const json& j) {
  WkPath p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.k_max = j.at("k_max").get<std::size_t>();
  p.scale = wk_scale_from_string(j.at("scale").get<std::string>());
  for (const auto& v : j.at("values")) p.values.push_back(number_from_json(v));
  if (p.values.size() != p.k_max) throw ParameterError("path length does not match k_max");
  return p;
}

std::string to_csv(const WkPath& path) {
  std::string out = "seed,scale,k,value\n";
  const std::string prefix = std::to_string(path.seed) + "," + to_string(path.scale) + ",";
  for (std::size_t k = 1; k <= path.values.size(); ++k) {
    out += prefix + std::to_string(k) + "," + format_double(path.values[k - 1]) + "\n";
  }
  return out;
}

WkPath wk_path_from_csv(const std::string& text) {
  const auto rows = csv_rows(text, {"seed", "scale", "k", "value"});
  WkPath p;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r == 0) {
      p.seed = parse_u64(rows[r][0]);
      p.scale = wk_scale_from_string(rows[r][1]);
    }
    if (parse_u64(rows[r][2]) != r + 1) throw ParameterError("path rows must be k = 1, 2, ...");
    p.values.push_back(parse_double(rows[r][3]));
  }
  p.k_max = p.values.size();
  return p;
}

json to_json(const ConditionReport& r) {
  json grid = json::array();
  for (const auto& g : r.grid) grid.push_back({g.index, number_to_json(g.value)});
  json params = json::object();
  for (const auto& [k, v] : r.parameters) params[k] = number_to_json(v);
  return {{"condition_id", r.condition_id},
          {"model", r.model},
          {"criterion", to_string(r.criterion)},
          {"parameters", params},
          {"grid", grid},
          {"running_sup", number_to_json(r.running_sup)},
          {"loglog_slope", number_to_json(r.loglog_slope)},
          {"fit_residual", number_to_json(r.fit_residual)},
          {"verdict", to_string(r.verdict)}};
}

ConditionReport condition_report_from_json(const json& j) {
  ConditionReport r;
  r.condition_id = j.at("condition_id").get<std::string>();
  r.model = j.value("model", "");
  r.criterion = criterion_from_string(j.at("criterion").get<std::string>());
  for (const auto& [k, v] : j.at("parameters").items()) r.parameters[k] = number_from_json(v);
  for (const auto& g : j.at("grid")) {
    r.grid.push_back({g.at(0).get<std::size_t>(), number_from_json(g.at(1))});
  }
  r.running_sup = number_from_json(j.at("running_sup"));
  r.loglog_slope = number_from_json(j.at("loglog_slope"));
  r.fit_residual = number_from_json(j.at("fit_residual"));
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  return r;
}

std::string to_csv(const std::vector<ConditionReport>& reports) {
  std::string out = "condition_id,criterion,index,value\n";
  for (const auto& r : reports) {
    const std::string prefix = csv_safe(r.condition_id) + "," + to_string(r.criterion) + ",";
    for (const auto& g : r.grid) {
      out += prefix + std::to_string(g.index) + "," + format_double(g.value) + "\n";
    }
  }
  return out;
}

std::vector<ConditionReport> condition_reports_from_csv(const std::string& text) {
  std::vector<ConditionReport> out;
  for (const auto& row : csv_rows(text, {"condition_id", "criterion", "index", "value"})) {
    if (out.empty() || out.back().condition_id != row[0]) {
      out.emplace_back();
      out.back().condition_id = row[0];
      out.back().criterion = criterion_from_string(row[1]);
    }
    out.back().grid.push_back({parse_u64(row[2]), parse_double(row[3])});
  }
  for (auto& r : out) finalize_report(r);
  return out;
}

json to_json(const std::vector<HillEstimate>& sweep) {
  json arr = json::array();
  for (const auto& h : sweep) {
    json e = {{"n", h.n}, {"k", h.k}, {"weight", h.weight},
              {"statistic", number_to_json(h.statistic)}};
    e["ratio"] = h.ratio ? number_to_json(*h.ratio) : json(nullptr);
    arr.push_back(e);
  }
  return arr;
}

std::vector<HillEstimate> hill_sweep_from_json(const json& j) {
  std::vector<HillEstimate> out;
  for (const auto& e : j) {
    HillEstimate h;
    h.n = e.at("n").get<std::size_t>();
    h.k = e.at("k").get<std::size_t>();
    h.weight = e.at("weight").get<std::string>();
    h.statistic = number_from_json(e.at("statistic"));
    if (e.contains("ratio") && !e.at("ratio").is_null()) h.ratio = number_from_json(e.at("ratio"));
    out.push_back(h);
  }
  return out;
}

std::string to_csv(const std::vector<HillEstimate>& sweep) {
  std::string out = "n,k,weight,statistic,ratio\n";
  for (const auto& h : sweep) {
    out += std::to_string(h.n) + "," + std::to_string(h.k) + "," + csv_safe(h.weight) + "," +
           format_double(h.statistic) + "," + (h.ratio ? format_double(*h.ratio) : "") + "\n";
  }
  return out;
}

std::vector<HillEstimate> hill_sweep_from_csv(const std::string& text) {
  std::vector<HillEstimate> out;
  for (const auto& row : csv_rows(text, {"n", "k", "weight", "statistic", "ratio"})) {
    HillEstimate h;
    h.n = parse_u64(row[0]);
    h.k = parse_u64(row[1]);
    h.weight = row[2];
    h.statistic = parse_double(row[3]);
    if (!row[4].empty()) h.ratio = parse_double(row[4]);
    out.push_back(h);
  }
  return out;
}

json to_json(const MaxVarProbe& p) {
  json lambdas = json::array();
  for (const auto& l : p.per_lambda) {
    lambdas.push_back({{"lambda", l.lambda},
                       {"exceed_prob", l.exceed_prob},
                       {"ratio", number_to_json(l.ratio)},
                       {"se", number_to_json(l.se)}});
  }
  return {{"r", p.r},
          {"n", p.n},
          {"reps", p.reps},
          {"var_sn", number_to_json(p.var_sn)},
          {"var_known", p.var_known},
          {"degenerate", p.degenerate},
          {"constant", number_to_json(p.constant)},
          {"constant_se", number_to_json(p.constant_se)},
          {"argmax_lambda", p.argmax_lambda},
          {"emax_ratio", number_to_json(p.emax_ratio)},
          {"emax_se", number_to_json(p.emax_se)},
          {"per_lambda", lambdas}};
}

json to_json(const Sigma2Result& s) {
  return {{"value", s.value ? number_to_json(*s.value) : json(nullptr)},
          {"diverging", s.diverging},
          {"converged", s.converged},
          {"tail_estimate", number_to_json(s.tail_estimate)},
          {"terms", s.terms}};
}

json to_json(const MuLimit& m) {
  json trace = json::array();
  for (const auto& [k, v] : m.trace) trace.push_back({k, number_to_json(v)});
  auto opt = [](const std::optional<double>& v) { return v ? number_to_json(*v) : json(nullptr); };
  return {{"value", opt(m.value)},
          {"error_estimate", number_to_json(m.error_estimate)},
          {"diverging", m.diverging},
          {"tau_over_tau_plus_gamma", opt(m.tau_over_tau_plus_gamma)},
          {"tau_over_gamma_plus_one", opt(m.tau_over_gamma_plus_one)},
          {"trace", trace}};
}

}  // namespace slln
