#include "specden/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef SPECDEN_VERSION
#define SPECDEN_VERSION "0.1.0+unknown"
#endif

namespace specden {

std::string library_version() { return SPECDEN_VERSION; }

namespace {

std::vector<ComplexMatrix> reference_spectrum(const ResolvedExperiment& ex) {
  std::vector<ComplexMatrix> ref;
  ref.reserve(ex.grid.size());
  if (ex.model) {
    for (double s : ex.grid) ref.push_back(windowed_expectation(*ex.model, ex.plan, s));
  } else {
    // No analytic target for external data: the full-record batch estimate stands in.
    ref = batch_estimate(*ex.data, ex.plan, ex.grid).estimate.matrices;
  }
  return ref;
}

std::vector<ErrorRecord> run_trial(const ResolvedExperiment& ex, const BoundReport& report,
                                   const std::vector<ComplexMatrix>& reference, std::size_t trial) {
  const bool online = ex.config.algorithm == Algorithm::online;
  const TimeSeries series =
      ex.data ? *ex.data
              : simulate(*ex.model, ex.samples, trial_seed(ex.config.seed, trial), SimulateOptions{ex.config.burn_in});

  std::vector<std::pair<std::size_t, SpectralEstimate>> snapshots;
  if (online) {
    for (auto& snap : online_run(series, ex.plan, ex.grid, ex.checkpoints)) {
      snapshots.emplace_back(snap.k, std::move(snap.estimate));
    }
  } else {
    for (std::size_t k : ex.checkpoints) {
      EstimatorOptions opts;
      opts.max_segments = k;
      snapshots.emplace_back(k, batch_estimate(series, ex.plan, ex.grid, opts).estimate);
    }
  }

  std::vector<ErrorRecord> out;
  out.reserve(snapshots.size() * ex.grid.size());
  const std::size_t M = ex.plan.length();
  for (const auto& [k, est] : snapshots) {
    const double expected = expected_error_bound(report, M, k, online);
    const double threshold = theorem4_threshold(bound_envelope(report, M, k), report.r, report.nu);
    for (std::size_t f = 0; f < ex.grid.size(); ++f) {
      const double err = (est.at(f) - reference[f]).norm();
      out.push_back(ErrorRecord{trial, k, ex.grid[f], err, expected, threshold});
    }
  }
  return out;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json build_metadata(const ResolvedExperiment& ex, const BoundReport& rep) {
  const auto& c = ex.config;
  nlohmann::json meta;
  meta["library_version"] = library_version();
  meta["generated_at"] = timestamp_utc();
  meta["rng"] = std::string(kRngIdentity);
  meta["config"] = {
      {"method", to_string(c.method)},
      {"algorithm", to_string(c.algorithm)},
      {"M", ex.plan.length()},
      {"K", ex.plan.hop()},
      {"window", to_string(*c.window)},
      {"samples", ex.samples},
      {"k_max", ex.k_max},
      {"freqs", ex.grid.values()},
      {"trials", c.trials},
      {"seed", c.seed},
      {"q", c.q},
      {"nu", c.nu},
      {"checkpoints", ex.checkpoints},
      {"burn_in", c.burn_in},
      {"out", c.out},
  };
  if (ex.model) {
    meta["config"]["P"] = matrix_json(ex.model->transition());
    meta["config"]["g"] = matrix_json(ex.model->observation());
  } else {
    meta["config"]["data"] = *c.data_path;
  }
  meta["data"] = {
      {"samples_used", ex.plan.samples_used(ex.k_max)},
      {"samples_dropped", ex.samples - ex.plan.samples_used(ex.k_max)},
      {"reference", ex.model ? "analytic windowed expectation" : "full-record batch estimate"},
  };
  meta["conventions"] = {
      {"hann", "symmetric, 0.5 (1 - cos(2 pi k / (M - 1)))"},
      {"online_centering", "pre-update mean: segment k is centered with the mean of segments 0..k-1"},
      {"error_norm", "frobenius"},
      {"frequency_units", "cycles per sample"},
  };
  meta["constants"] = {
      {"delta", ex.delta},
      {"g_max", ex.g_max},
      {"q", rep.q},
      {"c1q", rep.c1q},
      {"c2q", rep.c2q},
      {"c1_2q", rep.c1_2q},
      {"c2_2q", rep.c2_2q},
      {"moment_outer", rep.moment_outer},
      {"dependence_outer", rep.dependence_outer},
      {"cq", rep.cq},
      {"c_2q", rep.c_2q},
      {"batch_coefficient", rep.batch_coefficient},
      {"bq", rep.bq},
      {"transient_coefficient", rep.transient_coefficient},
      {"envelope_a1", rep.envelope_a1},
      {"envelope_a2", rep.envelope_a2},
      {"r", rep.r},
      {"r_fit", "smallest integer r with coefficient(q) <= coefficient(1) q^r for q = 1..8"},
      {"highprob_multiplier", rep.multiplier},
  };
  if (ex.delta_column_min) meta["constants"]["delta_column_min"] = *ex.delta_column_min;
  meta["notes"] = {"bounds at k = 1 are the formulas evaluated outside their proven range (k >= 2 online)"};
  return meta;
}

}  // namespace

ExperimentResult run_experiment(const ResolvedExperiment& ex) {
  const bool online = ex.config.algorithm == Algorithm::online;
  const MixingProfile profile = markov_mixing_profile(ex.g_max, ex.delta);
  const BoundReport report = bound_report(profile, ex.plan.length(), ex.plan.hop(), ex.config.q, ex.config.nu, online);
  const std::vector<ComplexMatrix> reference = reference_spectrum(ex);

  const std::size_t trials = ex.config.trials;
  std::vector<std::vector<ErrorRecord>> per_trial(trials);
  std::size_t workers = ex.config.threads == 0 ? std::thread::hardware_concurrency() : ex.config.threads;
  workers = std::clamp<std::size_t>(workers, 1, trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        per_trial[t] = run_trial(ex, report, reference, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (auto& recs : per_trial) {
    result.records.insert(result.records.end(), recs.begin(), recs.end());
  }
  result.metadata = build_metadata(ex, report);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(resolve_config(config));
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::string trim_copy(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* name) {
  const std::string f = trim_copy(field);
  T value{};
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw ParseError(line, std::string("malformed ") + name + " '" + f + "'");
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string format_csv(const std::vector<ErrorRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    append_double(out, r.s);
    out += ',';
    append_double(out, r.empirical_error);
    out += ',';
    append_double(out, r.expected_bound);
    out += ',';
    append_double(out, r.highprob_threshold);
    out += '\n';
  }
  return out;
}

std::vector<ErrorRecord> parse_csv(std::string_view text) {
  std::vector<ErrorRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++lineno;
  if (trim_copy(line) != kCsvHeader) throw ParseError(1, "unexpected header '" + trim_copy(line) + "'");
  while (std::getline(in, line)) {
    ++lineno;
    if (trim_copy(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 6) {
      throw ParseError(lineno, "expected 6 fields, found " + std::to_string(fields.size()));
    }
    ErrorRecord r;
    r.trial = parse_field<std::size_t>(fields[0], lineno, "trial");
    r.k = parse_field<std::size_t>(fields[1], lineno, "k");
    r.s = parse_field<double>(fields[2], lineno, "s");
    r.empirical_error = parse_field<double>(fields[3], lineno, "empirical_error");
    r.expected_bound = parse_field<double>(fields[4], lineno, "expected_bound");
    r.highprob_threshold = parse_field<double>(fields[5], lineno, "highprob_threshold");
    out.push_back(r);
  }
  return out;
}

void emit_csv(const std::vector<ErrorRecord>& records, const std::string& path) {
  write_file(path, format_csv(records));
}

std::vector<ErrorRecord> read_csv(const std::string& path) { return parse_csv(read_file(path)); }

void emit_metadata(const nlohmann::json& metadata, const std::string& csv_path) {
  write_file(csv_path + ".meta", metadata.dump(2) + "\n");
}

TimeSeries parse_series(std::string_view text, std::optional<std::size_t> dimension) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim_copy(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<double> row;
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && (body[i] == ',' || std::isspace(static_cast<unsigned char>(body[i])))) ++i;
      if (i >= body.size()) break;
      std::size_t j = i;
      while (j < body.size() && body[j] != ',' && !std::isspace(static_cast<unsigned char>(body[j]))) ++j;
      row.push_back(parse_field<double>(std::string_view(body).substr(i, j - i), lineno, "value"));
      i = j;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(lineno, "expected " + std::to_string(rows.front().size()) + " columns, found " +
                                   std::to_string(row.size()));
    }
    if (dimension && row.size() != *dimension) {
      throw ParseError(lineno, "expected dimension " + std::to_string(*dimension) + ", found " +
                                   std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(lineno, "no samples found");
  return TimeSeries::from_rows(rows);
}

TimeSeries load_series(const std::string& path, std::optional<std::size_t> dimension) {
  return parse_series(read_file(path), dimension);
}

double fit_decay_rate(const std::vector<ErrorRecord>& records, double s, std::size_t min_k) {
  std::vector<std::pair<std::size_t, std::vector<double>>> by_k;
  for (const auto& r : records) {
    if (std::abs(r.s - s) > 1e-12 || r.k < min_k) continue;
    auto it = std::find_if(by_k.begin(), by_k.end(), [&](const auto& e) { return e.first == r.k; });
    if (it == by_k.end()) {
      by_k.emplace_back(r.k, std::vector<double>{r.empirical_error});
    } else {
      it->second.push_back(r.empirical_error);
    }
  }
  if (by_k.size() < 4) {
    throw AnalysisError("decay fit needs at least 4 checkpoints with k >= " + std::to_string(min_k) + ", found " +
                        std::to_string(by_k.size()));
  }
  std::sort(by_k.begin(), by_k.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const double span = std::log10(static_cast<double>(by_k.back().first) / static_cast<double>(by_k.front().first));
  if (span < 2.0 - 1e-12) throw AnalysisError("decay fit checkpoints must span at least two decades");

  std::vector<double> xs, ys;
  for (auto& [k, errs] : by_k) {
    std::sort(errs.begin(), errs.end());
    const std::size_t n = errs.size();
    const double median = n % 2 == 1 ? errs[n / 2] : 0.5 * (errs[n / 2 - 1] + errs[n / 2]);
    if (!(median > 0.0)) throw AnalysisError("median error at k=" + std::to_string(k) + " is not positive");
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(median));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace specden
