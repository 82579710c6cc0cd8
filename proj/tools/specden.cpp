#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "specden/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bartlett/Welch spectral estimation with non-asymptotic error bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", specden::library_version());

  auto* run = app.add_subcommand("run", "Run a Markov-chain (or external data) experiment and write CSV + metadata");
  std::string config_path;
  run->add_option("--config", config_path, "flat key = value experiment file");

  // Flag overrides applied on top of the config file, in the same key space.
  std::map<std::string, std::string> overrides;
  const std::pair<const char*, const char*> keys[] = {
      {"method", "bartlett | welch"},
      {"algorithm", "batch | online"},
      {"M", "segment length"},
      {"K", "hop between segments"},
      {"window", "rectangular | hann"},
      {"samples", "record length N"},
      {"k_max", "number of segments"},
      {"trials", "independent trials"},
      {"seed", "master seed"},
      {"q", "moment order of the bound"},
      {"nu", "failure probability of the high-probability threshold"},
      {"freqs", "comma-separated frequencies in [-1/2, 1/2]"},
      {"checkpoints", "comma-separated k values or pow2"},
      {"delta", "Doeblin coefficient used by the bounds"},
      {"threads", "worker threads (0 = all cores)"},
      {"out", "CSV output path"},
  };
  for (const auto& [key, help] : keys) {
    run->add_option_function<std::string>(
        std::string("--") + key, [&overrides, k = std::string(key)](const std::string& v) { overrides[k] = v; }, help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    specden::ExperimentConfig config;
    if (!config_path.empty()) config = specden::load_config(config_path);
    std::vector<std::string> violations;
    for (const auto& [key, value] : overrides) {
      try {
        specden::apply_config_value(config, key, value);
      } catch (const specden::ConfigError& e) {
        for (const auto& v : e.violations()) violations.push_back("--" + v);
      }
    }
    if (!violations.empty()) throw specden::ConfigError(std::move(violations));

    const auto experiment = specden::resolve_config(config);
    const auto result = specden::run_experiment(experiment);
    specden::emit_csv(result.records, experiment.config.out);
    specden::emit_metadata(result.metadata, experiment.config.out);
    std::cerr << "wrote " << result.records.size() << " records to " << experiment.config.out << '\n';
    return 0;
  } catch (const specden::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
