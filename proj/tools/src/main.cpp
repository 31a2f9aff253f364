#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "poscomp/cli/commands.hpp"
#include "poscomp/cli/config.hpp"
#include "poscomp/errors.hpp"

namespace {

using namespace poscomp::cli;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> formats;
  std::optional<int> workers;
};

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file (built-in defaults when omitted)");
  sub->add_option("--seed", f.seed, "Override every population seed");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--format", f.formats, "Output formats: csv, jsonl, md (repeatable or comma list)")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "jsonl", "md"}));
  sub->add_option("--workers", f.workers, "Concurrent scenario workers")->check(CLI::PositiveNumber);
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig cfg = f.config.empty() ? parse_config(defaults_json(command)) : load_config(f.config);
  if (f.seed) override_seed(cfg, *f.seed);
  if (!f.out.empty()) cfg.output.dir = f.out;
  if (!f.formats.empty()) cfg.output.formats = f.formats;
  if (f.workers) cfg.output.workers = *f.workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positional education competition: games, escalation simulations and policy scenarios"};
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> run_cmds;
  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"game", "Two-family obey/disobey game, dominance report and best-response trace"},
      {"figure1", "Utility curves and optima for a family at several fixed thresholds"},
      {"figure2", "Thresholds and focal-student curves for several score dispersions"},
      {"simulate", "Population threshold-feedback simulation"},
      {"policy", "Policy scenario batch with welfare/equity trade-off table"}};
  for (const auto& [name, desc] : descriptions) {
    auto* sub = app.add_subcommand(name, desc);
    add_run_flags(sub, flags);
    run_cmds.emplace_back(name, sub);
  }

  std::string validate_path;
  auto* validate = app.add_subcommand("validate-config", "Check a config file against the schema");
  validate->add_option("--config", validate_path, "JSON config file")->required();

  std::string defaults_for = "all";
  auto* defaults = app.add_subcommand("defaults", "Print the built-in default config");
  defaults->add_option("command", defaults_for, "game, figure1, figure2, simulate, policy or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*validate) {
      const RunConfig cfg = load_config(validate_path);
      std::cout << "config ok; sections:";
      if (cfg.game) std::cout << " game";
      if (cfg.figure1) std::cout << " figure1";
      if (cfg.figure2) std::cout << " figure2";
      if (cfg.simulate) std::cout << " simulate";
      if (cfg.policy) std::cout << " policy";
      std::cout << "\n";
      return kExitOk;
    }
    if (*defaults) {
      std::cout << defaults_json(defaults_for).dump(2) << "\n";
      return kExitOk;
    }
    for (const auto& [name, sub] : run_cmds) {
      if (!*sub) continue;
      const RunConfig cfg = resolve(name, flags);
      const CommandResult res = run_command(name, cfg);
      write_files(cfg.output.dir, res.files);
      std::cout << res.message;
      if (!res.message.empty() && res.message.back() != '\n') std::cout << "\n";
      std::cout << "wrote " << res.files.size() << " files to " << cfg.output.dir << "\n";
      return res.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const poscomp::InvalidArgument& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kExitValidation;
  } catch (const poscomp::Error& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitDegenerate;
  }
  return kExitOk;
}
