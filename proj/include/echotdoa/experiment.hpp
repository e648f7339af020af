#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "echotdoa/channel.hpp"
#include "echotdoa/geometry.hpp"
#include "echotdoa/signal.hpp"

namespace echotdoa {

/// What the sweep evaluates per trial: the corrected range difference
/// of an anchor pair, or the full position fix of a linear array.
enum class ExperimentMode { tdoa_2anchor, position_3anchor };

/// Axis-aligned rectangle swept by the grid.
struct Region {
  double x_min = -2.0;
  double x_max = 2.0;
  double y_min = -2.0;
  double y_max = 2.0;
};

/// Everything one Monte-Carlo sweep depends on.  Defaults reproduce the
/// reference deployment: a 4 m x 4 m area around a linear array,
/// 38-42 kHz chirps repeating every 15 ms, and one trial per 0.5 ms
/// acquisition latency step.
struct ExperimentConfig {
  Region area;
  double pitch_m = 0.02;
  std::vector<double> latencies_s;  // empty -> 0 : 0.5 ms : 15 ms
  double sigma = 0.01;
  bool heuristic_on = true;
  ExperimentMode mode = ExperimentMode::position_3anchor;
  double position_error_threshold_m = 0.01;
  double tdoa_error_threshold_s = 30e-6;
  std::uint64_t master_seed = 1;
  Scene scene;  // mobile position is overwritten per grid point
  ChirpSpec chirp;
  AttenuationModel attenuation;
  double sample_rate_hz = 250000.0;
  double margin_m = 0.1;
  double per_anchor_jitter_s = 0.0;
  int threads = 0;  // <= 0: use all available
};

/// Fraction of trials at one grid point whose error exceeded the
/// mode's threshold (solver failures count as errors).
struct GridPoint {
  double x_m = 0.0;
  double y_m = 0.0;
  double error_fraction = 0.0;
};

/// Error of one trial; +inf when the trial failed to produce a fix.
struct TrialRecord {
  double x_m = 0.0;
  double y_m = 0.0;
  double latency_s = 0.0;
  double error = 0.0;  // meters (position mode) or seconds (tdoa mode)
};

/// Full result of a sweep.  points is row-major with x varying fastest
/// and y ascending; per_trial_errors follows the same point order with
/// latencies ascending within each point.
struct GridResult {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<GridPoint> points;
  std::vector<TrialRecord> per_trial_errors;
  std::string metadata;  // config echo, re-parseable
};

/// Seed of one (grid point, latency) trial, derived so that results do
/// not depend on scheduling or thread count.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point_index,
                         std::size_t latency_index);

/// Runs one simulate -> detect -> correct -> solve trial and returns
/// its error (meters in position mode, seconds in tdoa mode).  Failures
/// to produce a fix yield +inf rather than propagating.
double run_trial(const ExperimentConfig& config, const Point3& mobile,
                 double latency_s, std::uint64_t seed);

/// Sweeps the grid in parallel (OpenMP).  Deterministic for a fixed
/// config: identical to grid_sweep_serial bit for bit.
GridResult grid_sweep(const ExperimentConfig& config);

/// Plain-loop reference implementation of the same sweep.
GridResult grid_sweep_serial(const ExperimentConfig& config);

/// Empirical CDF of a sample: sorted unique abscissas with
/// P(X <= x).  Throws std::invalid_argument on an empty sample.
std::vector<std::pair<double, double>> empirical_cdf(
    std::span<const double> errors);

/// Distance sound travels in one slot: the resolution floor of
/// slot-granularity time-difference schemes this system is measured
/// against.
double ble_slot_range_equivalent(double speed_of_sound, double slot_s);

/// Canonical textual form of a config, emitted in the grammar the
/// config parser accepts (the metadata echo and the manifest use it).
std::string describe_config(const ExperimentConfig& config);

}  // namespace echotdoa
