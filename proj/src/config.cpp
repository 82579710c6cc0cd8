#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "specden/harness.hpp"

namespace specden {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    // Accept integral values written in scientific notation, e.g. 1e6.
    double d = 0.0;
    auto [p2, ec2] = std::from_chars(v.data(), end, d);
    if (ec2 == std::errc() && p2 == end && d >= 0.0 && d == std::floor(d) && d < 1.8e19) {
      return static_cast<std::uint64_t>(d);
    }
    throw ConfigError({key + ": expected a nonnegative integer, got '" + v + "'"});
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ConfigError({key + ": expected a number, got '" + v + "'"});
  }
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& key, const std::string& v) {
  const auto rows = split(v, ';');
  std::vector<std::vector<double>> cells;
  for (const auto& row : rows) {
    std::vector<double> r;
    for (const auto& cell : split(row, ',')) r.push_back(parse_double(key, cell));
    cells.push_back(std::move(r));
  }
  const std::size_t cols = cells.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].size() != cols) throw ConfigError({key + ": rows must have equal length"});
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cells[i][j];
  }
  return m;
}

}  // namespace

std::string to_string(Method m) { return m == Method::bartlett ? "bartlett" : "welch"; }
std::string to_string(Algorithm a) { return a == Algorithm::batch ? "batch" : "online"; }
std::string to_string(WindowChoice w) { return w == WindowChoice::rectangular ? "rectangular" : "hann"; }

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "method") {
    if (v == "bartlett") c.method = Method::bartlett;
    else if (v == "welch") c.method = Method::welch;
    else throw ConfigError({"method: expected bartlett or welch, got '" + v + "'"});
  } else if (key == "algorithm") {
    if (v == "batch") c.algorithm = Algorithm::batch;
    else if (v == "online") c.algorithm = Algorithm::online;
    else throw ConfigError({"algorithm: expected batch or online, got '" + v + "'"});
  } else if (key == "window") {
    if (v == "rectangular") c.window = WindowChoice::rectangular;
    else if (v == "hann") c.window = WindowChoice::hann;
    else throw ConfigError({"window: expected rectangular or hann, got '" + v + "'"});
  } else if (key == "M") {
    c.M = parse_unsigned(key, v);
  } else if (key == "K") {
    c.K = parse_unsigned(key, v);
  } else if (key == "samples") {
    c.samples = parse_unsigned(key, v);
  } else if (key == "k_max") {
    c.k_max = parse_unsigned(key, v);
  } else if (key == "freqs") {
    c.freqs.clear();
    for (const auto& f : split(v, ',')) c.freqs.push_back(parse_double(key, f));
  } else if (key == "trials") {
    c.trials = parse_unsigned(key, v);
  } else if (key == "seed") {
    c.seed = parse_unsigned(key, v);
  } else if (key == "q") {
    c.q = parse_double(key, v);
  } else if (key == "nu") {
    c.nu = parse_double(key, v);
  } else if (key == "P") {
    c.P = parse_matrix(key, v);
  } else if (key == "g") {
    c.g = parse_matrix(key, v);
  } else if (key == "delta") {
    c.delta = parse_double(key, v);
  } else if (key == "data") {
    c.data_path = v;
  } else if (key == "checkpoints") {
    c.checkpoints.clear();
    if (v != "pow2") {
      for (const auto& k : split(v, ',')) c.checkpoints.push_back(parse_unsigned(key, k));
    }
  } else if (key == "out") {
    c.out = v;
  } else if (key == "threads") {
    c.threads = parse_unsigned(key, v);
  } else if (key == "burn_in") {
    c.burn_in = parse_unsigned(key, v);
  } else {
    throw ConfigError({"unknown key '" + key + "'"});
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::vector<std::string> violations;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      violations.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (!seen.insert(key).second) {
      violations.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      continue;
    }
    try {
      apply_config_value(base, key, body.substr(eq + 1));
    } catch (const ConfigError& e) {
      for (const auto& v : e.violations()) violations.push_back("line " + std::to_string(lineno) + ": " + v);
    }
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::vector<std::size_t> power_of_two_checkpoints(std::size_t k_max) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= k_max; k *= 2) {
    out.push_back(k);
    if (k > k_max / 2) break;
  }
  return out;
}

ResolvedExperiment resolve_config(const ExperimentConfig& in) {
  std::vector<std::string> errors;
  ExperimentConfig c = in;

  if (c.M < 1) errors.push_back("M must be at least 1");
  if (c.method == Method::bartlett) {
    if (c.K && *c.K != c.M) errors.push_back("bartlett requires K = M");
    if (c.window && *c.window != WindowChoice::rectangular) errors.push_back("bartlett requires the rectangular window");
    c.K = c.M;
    c.window = WindowChoice::rectangular;
  } else {
    if (!c.K) c.K = c.M;
    if (!c.window) c.window = WindowChoice::hann;
  }
  if (*c.K < 1 || *c.K > c.M) errors.push_back("K must satisfy 1 <= K <= M");
  if (c.window == WindowChoice::hann && c.M < 3) errors.push_back("hann window needs M >= 3 (shorter windows are all zero)");
  if (c.trials < 1) errors.push_back("trials must be at least 1");
  if (!(c.nu > 0.0 && c.nu < 1.0)) errors.push_back("nu must lie in (0, 1)");
  if (!(c.q >= 1.0) || !std::isfinite(c.q)) errors.push_back("q must be >= 1");
  if (c.freqs.empty()) errors.push_back("freqs must list at least one frequency");
  for (double s : c.freqs) {
    if (!(s >= -0.5 && s <= 0.5)) errors.push_back("frequency " + std::to_string(s) + " outside [-1/2, 1/2]");
  }
  for (std::size_t i = 1; i < c.freqs.size(); ++i) {
    if (!(c.freqs[i] > c.freqs[i - 1])) {
      errors.push_back("freqs must be strictly increasing");
      break;
    }
  }
  if (c.delta && !(*c.delta > 0.0 && *c.delta <= 1.0)) errors.push_back("delta must lie in (0, 1]");

  std::optional<MarkovModel> model;
  std::optional<TimeSeries> data;
  std::optional<double> delta_colmin;
  double g_max = 0.0;
  if (c.data_path) {
    if (c.P || c.g) errors.push_back("data and a chain spec (P, g) are mutually exclusive");
    if (c.trials != 1) errors.push_back("external data supports exactly one trial");
    if (!c.delta) errors.push_back("external data requires an explicit delta");
    if (c.burn_in != 0) errors.push_back("burn_in applies only to simulated chains");
    try {
      data = load_series(*c.data_path);
      g_max = data->samples().colwise().norm().maxCoeff();
    } catch (const Error& e) {
      errors.push_back(std::string("data: ") + e.what());
    }
  } else {
    try {
      Eigen::MatrixXd P = c.P ? *c.P : MarkovModel::two_state_reference().transition();
      if (c.g) {
        model.emplace(P, *c.g);
      } else {
        model = MarkovModel::identity_observed(P);
      }
      delta_colmin = doeblin_coefficient(model->transition());
      g_max = model->g_max();
      if (!c.delta) c.delta = c.P ? *delta_colmin : kReferenceDoeblin;
      if (!(*c.delta > 0.0)) errors.push_back("chain has Doeblin coefficient 0; set delta explicitly");
    } catch (const Error& e) {
      errors.push_back(std::string("chain: ") + e.what());
    }
  }

  std::size_t samples = 0;
  std::size_t k_max = 0;
  if (errors.empty()) {
    const SegmentationPlan probe(c.M, *c.K, WindowSpec::bartlett());
    if (data) {
      samples = data->length();
      const std::size_t available = probe.segment_count(samples);
      if (available == 0) errors.push_back("data has fewer samples than M");
      if (c.samples && *c.samples != samples) errors.push_back("samples does not match the data length");
      k_max = c.k_max.value_or(available);
      if (k_max > available) errors.push_back("k_max exceeds the segments available in the data");
    } else if (c.k_max) {
      k_max = *c.k_max;
      samples = c.samples.value_or(probe.samples_used(k_max));
      if (k_max < 1) errors.push_back("k_max must be at least 1");
      if (k_max > probe.segment_count(samples)) errors.push_back("k_max exceeds the segments available in samples");
    } else {
      samples = c.samples.value_or(kDefaultSamples);
      k_max = probe.segment_count(samples);
      if (k_max == 0) errors.push_back("samples must be at least M");
    }
  }

  std::vector<std::size_t> checkpoints = c.checkpoints;
  if (errors.empty()) {
    if (checkpoints.empty()) checkpoints = power_of_two_checkpoints(k_max);
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      if (checkpoints[i] < 1 || checkpoints[i] > k_max) {
        errors.push_back("checkpoint " + std::to_string(checkpoints[i]) + " outside [1, " + std::to_string(k_max) + "]");
      }
      if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) errors.push_back("checkpoints must be strictly increasing");
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));

  WindowSpec window = *c.window == WindowChoice::hann ? WindowSpec::welch(hann_vector(c.M)) : WindowSpec::bartlett();
  if (c.method == Method::welch && *c.window == WindowChoice::rectangular) {
    window = WindowSpec::welch(std::vector<double>(c.M, 1.0));
  }
  SegmentationPlan plan(c.M, *c.K, std::move(window));
  FrequencyGrid grid(c.freqs);
  const double delta = *c.delta;
  return ResolvedExperiment{std::move(c), std::move(plan), std::move(grid), std::move(model), std::move(data),
                            samples, k_max, std::move(checkpoints), delta, delta_colmin, g_max};
}

}  // namespace specden
