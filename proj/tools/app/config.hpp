#ifndef CWMEAS_APP_CONFIG_HPP
#define CWMEAS_APP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwmeas/errors.hpp"
#include "cwmeas/magnet_thermo.hpp"
#include "cwmeas/qm_core.hpp"
#include "cwmeas/registration.hpp"

namespace cwmeas::app {

enum class Scenario {
  FreeEnergy,
  CriticalCoupling,
  Dephase,
  Register,
  Measure,
  OracleCheck
};

std::string to_string(Scenario s);
/// Throws ValidationError for an unknown name.
Scenario parse_scenario(std::string_view name);

/// Malformed document: the message carries the line number and key.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct FreeEnergyOptions {
  std::vector<double> g_values{0.0, 0.02, 0.05};
  int grid_size = 401;
  Sector sector = Sector::Up;
};

struct DephaseOptions {
  std::optional<double> t_max;  ///< defaults to 1.25 t_1
  int points = 2001;
};

struct OracleOptions {
  int N = 8;
  std::optional<double> t_end;  ///< defaults to 10 / g
  double dt = 0.01;
  int sample_every = 100;
  std::vector<int> enumeration_N{1, 2, 5, 10, 16, 20};
  int time_points = 50;
};

/// Fully resolved run description; every field validated.
struct ScenarioConfig {
  std::optional<Scenario> scenario;
  ModelParams params;
  std::optional<double> theta;
  SpinDensityMatrix rho0 = pure_state({1.0, 0.0, 0.0});
  Schedule schedule;
  std::optional<double> snapshot_every;
  std::optional<double> m_threshold;
  std::uint64_t n_runs = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "cwmeas-out";
  FreeEnergyOptions free_energy;
  std::vector<double> critical_T;  ///< defaults to {params.T}
  DephaseOptions dephase;
  OracleOptions oracle;
};

/**
 * Parses the flat `section.key = value` format. `#` starts a comment,
 * blank lines are ignored, lists are comma separated. Unknown or repeated
 * keys are rejected. Unset fields take the documented defaults
 * (T = 0.2, g = 0.05, N = 100, gamma = 0.01, Gamma = 10, n = 1, b_x = 0,
 * seed = 1); the schedule defaults follow Schedule::defaults_for.
 *
 * Throws ParseError for syntax problems and ValidationError listing every
 * violated invariant.
 */
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Every key accepted by parse_config, in documentation order.
const std::vector<std::string>& known_keys();

}  // namespace cwmeas::app

#endif  // CWMEAS_APP_CONFIG_HPP
