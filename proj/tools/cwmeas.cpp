#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "app/config.hpp"
#include "app/scenario.hpp"

namespace {

unsigned threads_from_env() {
  const char* env = std::getenv("CWMEAS_THREADS");
  if (env == nullptr) return 1;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<unsigned>(v) : 1u;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cwmeas::app;

  CLI::App cli{"Curie-Weiss quantum measurement simulator"};
  cli.set_version_flag("--version", kVersion);
  std::string scenario_name;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  cli.add_option("scenario", scenario_name,
                 "free-energy | critical-coupling | dephase | register | "
                 "measure | oracle-check")
      ->required();
  cli.add_option("--config", config_path, "key = value configuration file")
      ->required();
  cli.add_option("--out", out_dir, "output directory (overrides output.dir)");
  cli.add_option("--seed", seed, "RNG seed (overrides sampling.seed)");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  ScenarioConfig config;
  try {
    config = load_config(config_path);
    const Scenario chosen = parse_scenario(scenario_name);
    if (config.scenario && *config.scenario != chosen) {
      throw cwmeas::ValidationError("config selects scenario '" +
                                    to_string(*config.scenario) +
                                    "' but the command line asks for '" +
                                    scenario_name + "'");
    }
    config.scenario = chosen;
  } catch (const cwmeas::IoError& e) {
    std::cerr << "cwmeas: " << e.what() << '\n';
    return kExitIo;
  } catch (const cwmeas::ValidationError& e) {
    std::cerr << "cwmeas: " << e.what() << '\n';
    return kExitValidation;
  }
  if (out_dir) config.output_dir = *out_dir;
  if (seed) config.seed = *seed;

  const auto result = run_scenario(config, RunOptions{threads_from_env()});
  if (result.exit_code != kExitOk) {
    std::cerr << "cwmeas: " << result.message << '\n';
    return result.exit_code;
  }
  for (const auto& [k, v] : result.summary) std::cout << k << " = " << v << '\n';
  return kExitOk;
}
