#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "echotdoa/experiment.hpp"

namespace echotdoa {

/// Malformed or inconsistent configuration input.  Parse errors carry
/// the offending file name and line number in the message.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<double> sigma;
  std::optional<double> pitch_m;
  std::optional<std::uint64_t> seed;
  std::optional<bool> heuristic_on;
  std::optional<ExperimentMode> mode;
  std::optional<int> threads;
};

/// The reference deployment: three anchors at x = -1, 0, 1 m facing +y.
ExperimentConfig default_experiment_config();

/// Resolves a full config from an optional file plus overrides:
/// defaults, then file values, then overrides; anchors not given
/// explicitly follow the final mode.  Validates before returning.
ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file,
                              const CliOverrides& overrides = {});

/// Same resolution from in-memory text (origin names the source in
/// error messages).
ExperimentConfig parse_config_text(std::string_view text,
                                   std::string_view origin,
                                   const CliOverrides& overrides = {});

/// Checks every cross-field invariant; throws ConfigError naming the
/// violated condition.
void validate_config(const ExperimentConfig& config);

}  // namespace echotdoa
