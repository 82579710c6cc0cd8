#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specden/bounds.hpp"
#include "specden/core.hpp"
#include "specden/estimators.hpp"
#include "specden/markov.hpp"

namespace specden {

enum class Method { bartlett, welch };
enum class Algorithm { batch, online };
enum class WindowChoice { rectangular, hann };

/// Everything needed to reproduce one experiment. Unset optionals are
/// resolved from the method (see resolve_config).
struct ExperimentConfig {
  Method method = Method::bartlett;
  Algorithm algorithm = Algorithm::online;
  std::size_t M = 5;
  std::optional<std::size_t> K;
  std::optional<WindowChoice> window;
  /// Record length N; 10^6 when neither samples nor k_max is set.
  std::optional<std::size_t> samples;
  std::optional<std::size_t> k_max;
  std::vector<double> freqs{0.0, 0.125, 0.25, 0.375};
  std::size_t trials = 20;
  std::uint64_t seed = 20240101;
  double q = 1.0;
  double nu = 0.1;
  /// Transition matrix and observation map; the two-state reference chain when unset.
  std::optional<Eigen::MatrixXd> P;
  std::optional<Eigen::MatrixXd> g;
  /// Doeblin coefficient used in the bounds. Defaults to 0.72 for the
  /// reference chain and to the column-minimum value for a custom chain;
  /// required with external data.
  std::optional<double> delta;
  std::optional<std::string> data_path;
  /// Empty means powers of two up to k_max.
  std::vector<std::size_t> checkpoints;
  std::string out = "specden.csv";
  /// 0 uses the hardware concurrency.
  std::size_t threads = 1;
  std::size_t burn_in = 0;
};

inline constexpr double kReferenceDoeblin = 0.72;
inline constexpr std::size_t kDefaultSamples = 1'000'000;

/// A validated config with every default filled in.
struct ResolvedExperiment {
  ExperimentConfig config;
  SegmentationPlan plan;
  FrequencyGrid grid;
  std::optional<MarkovModel> model;
  std::optional<TimeSeries> data;
  std::size_t samples = 0;
  std::size_t k_max = 0;
  std::vector<std::size_t> checkpoints;
  double delta = 0.0;
  std::optional<double> delta_column_min;
  double g_max = 0.0;
};

/// Throws ConfigError listing every violated constraint.
ResolvedExperiment resolve_config(const ExperimentConfig& config);

/// Flat `key = value` text; `#` starts a comment. Unknown keys, malformed
/// values and duplicates are all reported together in one ConfigError.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// Applies one key/value pair with the same rules as the config file.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

std::string to_string(Method m);
std::string to_string(Algorithm a);
std::string to_string(WindowChoice w);

struct ErrorRecord {
  std::size_t trial = 0;
  std::size_t k = 0;
  double s = 0.0;
  double empirical_error = 0.0;
  double expected_bound = 0.0;
  double highprob_threshold = 0.0;

  bool operator==(const ErrorRecord&) const = default;
};

struct ExperimentResult {
  std::vector<ErrorRecord> records;
  nlohmann::json metadata;
};

/// Records are ordered by (trial, k, s) whatever the thread count.
ExperimentResult run_experiment(const ResolvedExperiment& experiment);
ExperimentResult run_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader = "trial,k,s,empirical_error,expected_bound,highprob_threshold";

std::string format_csv(const std::vector<ErrorRecord>& records);
std::vector<ErrorRecord> parse_csv(std::string_view text);
void emit_csv(const std::vector<ErrorRecord>& records, const std::string& path);
std::vector<ErrorRecord> read_csv(const std::string& path);
/// Writes `<csv_path>.meta`.
void emit_metadata(const nlohmann::json& metadata, const std::string& csv_path);

/// Numeric rows separated by commas or whitespace; `#` lines are skipped.
TimeSeries parse_series(std::string_view text, std::optional<std::size_t> dimension = std::nullopt);
TimeSeries load_series(const std::string& path, std::optional<std::size_t> dimension = std::nullopt);

/// Least-squares slope of log(median error over trials) against log k at
/// frequency s, over checkpoints with k >= min_k. Needs at least four such
/// checkpoints spanning two decades.
double fit_decay_rate(const std::vector<ErrorRecord>& records, double s, std::size_t min_k = 100);

/// Powers of two up to and including k_max.
std::vector<std::size_t> power_of_two_checkpoints(std::size_t k_max);

std::string library_version();

}  // namespace specden
