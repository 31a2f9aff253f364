#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "poscomp/equilibrium.hpp"
#include "poscomp/policy.hpp"
#include "poscomp/population.hpp"

namespace poscomp::cli {

// Validation failure; the message starts with the offending field path,
// e.g. "game.t_obey: missing required field".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct OutputOptions {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "jsonl", "md"};
  int workers = 1;
};

struct GameConfig {
  TwoFamilySetup setup;
  int rounds = 20;
  UpdateScheme scheme = UpdateScheme::Simultaneous;
  std::optional<std::pair<double, double>> reference_profile;
};

struct Figure1Config {
  double gamma = 3.0;
  double p = 0.5;
  std::vector<double> s_cuts{0.0, 3.0};
  double t_max = 6.0;
  double step = 0.01;
};

struct Figure2Config {
  double gamma = 5.0;
  double mean_gamma = 3.0;
  double p = 0.5;
  double k = 1.645;
  double mean_t = 2.0;
  std::vector<double> sigmas{1.0, 3.0};
  double t_max = 6.0;
  double step = 0.01;
};

struct SimulateConfig {
  PopulationSpec population;
  SimConfig sim;
};

struct PolicyConfig {
  std::vector<PolicyScenario> scenarios;
};

struct RunConfig {
  OutputOptions output;
  std::optional<GameConfig> game;
  std::optional<Figure1Config> figure1;
  std::optional<Figure2Config> figure2;
  std::optional<SimulateConfig> simulate;
  std::optional<PolicyConfig> policy;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"game", "figure1", "figure2", "simulate", "policy"};
  return names;
}

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Fully resolved form (every default spelled out). parse_config of the
// result reproduces the same RunConfig.
nlohmann::json to_json(const RunConfig& cfg);

// Built-in defaults for one command's section ("all" for every section).
nlohmann::json defaults_json(const std::string& command);

// Forces every population seed in the config to `seed`.
void override_seed(RunConfig& cfg, std::uint64_t seed);

}  // namespace poscomp::cli
