#ifndef CWMEAS_APP_SCENARIO_HPP
#define CWMEAS_APP_SCENARIO_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace cwmeas::app {

inline constexpr const char* kVersion = "cwmeas 0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitGuard = 3;

struct RunOptions {
  unsigned threads = 1;
};

struct ScenarioResult {
  int exit_code = kExitOk;
  std::string message;  ///< error text when exit_code != 0
  /// key = value lines written to `summary.txt`, in order.
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::filesystem::path> files;

  /// Value of a summary key, or "" when absent.
  [[nodiscard]] std::string get(const std::string& key) const;
};

/// Runs one scenario into config.output_dir and writes `summary.txt`.
/// Errors are mapped to exit codes rather than thrown: 2 for invalid input,
/// 3 for numerical guards (and oracle mismatches), 1 for I/O.
ScenarioResult run_scenario(const ScenarioConfig& config,
                            const RunOptions& options = {});

}  // namespace cwmeas::app

#endif  // CWMEAS_APP_SCENARIO_HPP
