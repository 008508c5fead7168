#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slln_lab/association.hpp"
#include "slln_lab/covariance.hpp"

namespace slln {

using json = nlohmann::json;

enum class ExperimentId { wk_convergence, hill_ratio, gcip_sweep, maxvar_probe, condition_suite };

std::string to_string(ExperimentId id);
ExperimentId experiment_id_from_string(const std::string& s);  // throws ConfigError

inline constexpr std::uint64_t kDefaultSeed = 20240521;

/**
 * Experiment description. `params` is experiment specific (see README).
 * The hash covers everything except output paths and the thread count.
 */
struct ExperimentConfig {
  ExperimentId id = ExperimentId::wk_convergence;
  json params = json::object();
  std::size_t replications = 1;
  std::uint64_t base_seed = kDefaultSeed;
  std::vector<std::size_t> grid;
  std::string output_json;
  std::string output_csv;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;  // throws ConfigError
  json to_json() const;
  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig from_file(const std::string& path);
  std::string hash() const;  // FNV-1a 64 of the canonical JSON, hex
};

/// Mean and M2 with the pairwise (Chan et al.) merge.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept;
  void merge(const Moments& other) noexcept;
  double variance() const noexcept;  // unbiased, 0 when count < 2
  double standard_error() const noexcept;
};

/**
 * Streaming quantiles. Exact while at most `kExact` values have been added;
 * beyond that, full levels are sorted and halved (alternating offsets, no
 * randomness). Results depend on the order of add/merge calls only.
 */
class QuantileSketch {
 public:
  static constexpr std::size_t kExact = 4096;

  void add(double x);
  void merge(const QuantileSketch& other);
  /// Smallest retained value whose cumulative weight reaches p * count.
  double quantile(double p) const;
  std::uint64_t count() const noexcept { return count_; }
  bool exact() const noexcept { return levels_.size() <= 1; }

 private:
  void compress();

  std::vector<std::vector<double>> levels_;
  std::uint64_t count_ = 0;
  std::uint64_t compactions_ = 0;
};

struct PointAccumulator {
  Moments moments;
  QuantileSketch sketch;

  void add(double x) {
    moments.add(x);
    sketch.add(x);
  }
  void merge(const PointAccumulator& o) {
    moments.merge(o.moments);
    sketch.merge(o.sketch);
  }
};

struct GridStats {
  std::size_t index = 0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double se = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  std::optional<double> target;
  std::optional<double> z;  // (mean - target) / se

  bool operator==(const GridStats&) const = default;
};

struct RunResult {
  std::string experiment_id;
  std::string config_hash;
  std::uint64_t base_seed = 0;
  std::size_t replications = 0;
  std::vector<GridStats> rows;
  json details = json::object();  // reports / probe output of deterministic experiments
  // Excluded from the deterministic payload:
  double wall_time_s = 0.0;
  unsigned threads = 1;

  /// Everything except timing and thread count.
  json payload() const;
  json to_json() const;
  static RunResult from_json(const json& j);
  /// index,count,mean,se,q05,q50,q95,target,z
  std::string to_csv() const;
  static RunResult from_csv(const std::string& text);
};

/// Replications are cut into fixed chunks that are merged in chunk order, so
/// results are bitwise identical for every thread count.
RunResult run(const ExperimentConfig& config);

/**
 * Runs `replicate(seed, out)` for seeds base_seed + 0..R-1, where `out` has
 * one slot per grid point, and aggregates. Exposed for custom experiments.
 */
std::vector<GridStats> aggregate_replications(
    const std::function<void(std::uint64_t seed, std::vector<double>& out)>& replicate,
    const std::vector<std::size_t>& grid, std::size_t replications, std::uint64_t base_seed,
    unsigned threads);

struct DeviationRow {
  std::size_t index = 0;
  double mean = 0.0;
  double target = 0.0;
  double difference = 0.0;  // mean - target
  double z = 0.0;           // difference / se
};

struct DeviationTable {
  std::vector<DeviationRow> rows;
  double worst_abs_z = 0.0;
  std::size_t worst_index = 0;
};

/// Target given per grid index; throws ParameterError on a grid mismatch.
DeviationTable compare_to_target(const RunResult& result,
                                 const std::vector<std::pair<std::size_t, double>>& target);
DeviationTable compare_to_target(const RunResult& result,
                                 const std::function<double(std::size_t)>& target);

/// Covariance model from a JSON spec, e.g. {"kind":"stationary","rho":"power","exponent":2}.
CovarianceModel covariance_model_from_json(const json& spec, std::size_t max_index);
/// Generator from a JSON spec, e.g. {"kind":"gaussian","rho":"geometric","base":0.5}.
AssocGenerator generator_from_json(const json& spec);

}  // namespace slln
