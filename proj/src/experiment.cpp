#include "echotdoa/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "echotdoa/detection.hpp"
#include "echotdoa/format.hpp"
#include "echotdoa/seeding.hpp"
#include "echotdoa/solver.hpp"
#include "echotdoa/tdoa.hpp"

namespace echotdoa {

namespace {

int anchors_used(ExperimentMode mode) {
  return mode == ExperimentMode::tdoa_2anchor ? 2 : 3;
}

std::vector<double> resolved_latencies(const ExperimentConfig& config) {
  if (!config.latencies_s.empty()) {
    return config.latencies_s;
  }
  // Default: one trial per 0.5 ms of acquisition latency across a full
  // chirp period, endpoints included.
  std::vector<double> out;
  const double step = 0.0005;
  auto n = static_cast<int>(std::floor(config.chirp.period_s / step + 0.5));
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    double t = i * step;
    if (t <= config.chirp.period_s + 1e-12) {
      out.push_back(t);
    }
  }
  return out;
}

struct GridLayout {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> latencies;
};

GridLayout make_layout(const ExperimentConfig& config) {
  if (!(config.pitch_m > 0.0)) {
    throw std::invalid_argument("grid pitch must be positive");
  }
  if (!(config.area.x_max >= config.area.x_min) ||
      !(config.area.y_max >= config.area.y_min)) {
    throw std::invalid_argument("sweep area is empty");
  }
  GridLayout g;
  g.nx = static_cast<std::size_t>(
      std::floor((config.area.x_max - config.area.x_min) / config.pitch_m +
                 1e-9)) +
      1;
  g.ny = static_cast<std::size_t>(
      std::floor((config.area.y_max - config.area.y_min) / config.pitch_m +
                 1e-9)) +
      1;
  g.latencies = resolved_latencies(config);
  return g;
}

// Per-thread state: the sampled template and its FFT workspace.
struct TrialWorkspace {
  SampledSignal tmpl;
  CorrelationEngine engine;

  explicit TrialWorkspace(const ExperimentConfig& config)
      : tmpl(synthesize_template(config.chirp, config.sample_rate_hz)),
        engine(tmpl.samples.size()) {
    engine.load_template(tmpl.samples);
  }
};

double run_trial_impl(const ExperimentConfig& config, TrialWorkspace& ws,
                      const Point3& mobile, double latency_s,
                      std::uint64_t seed) {
  try {
    Scene scene = config.scene;
    scene.mobile = mobile;
    int n = anchors_used(config.mode);
    if (static_cast<int>(scene.anchors.size()) < n) {
      throw std::invalid_argument("scene has too few anchors for the mode");
    }

    AcquisitionConfig acq;
    acq.window_s = config.chirp.period_s;
    acq.sample_rate_hz = config.sample_rate_hz;
    acq.latency_s = latency_s;
    acq.per_anchor_jitter_s = config.per_anchor_jitter_s;
    acq.noise_sigma = config.sigma;
    acq.seed = seed;

    std::vector<ToaEstimate> toas;
    toas.reserve(n);
    for (int i = 0; i < n; ++i) {
      SampledSignal window = simulate_reception(
          scene, scene.anchors[i].id, config.chirp, config.attenuation, acq);
      toas.push_back(detect_toa(ws.engine, window.samples,
                                config.sample_rate_hz, config.chirp.period_s,
                                scene.anchors[i].id));
    }

    CorrectionConfig corr{config.margin_m, config.chirp.period_s,
                          scene.speed_of_sound};
    RangeDiffSet set = form_corrected_set(toas, scene, corr,
                                          scene.anchors[0].id,
                                          config.heuristic_on);

    if (config.mode == ExperimentMode::tdoa_2anchor) {
      double d_true =
          true_range_diff(scene, scene.anchors[1].id, scene.anchors[0].id);
      return std::abs(set.diffs[0].diff_m - d_true) / scene.speed_of_sound;
    }
    PositionFix fix =
        solve_linear_array(std::span<const Anchor>(scene.anchors.data(), 3),
                           set.diffs[0].diff_m, set.diffs[1].diff_m);
    double ex = fix.position.x - mobile.x;
    double ey = fix.position.y - mobile.y;
    return std::sqrt(ex * ex + ey * ey);
  } catch (const std::exception&) {
    // A trial that cannot produce a fix (coincident geometry, solver
    // failure) counts as an error event, not a crash.
    return std::numeric_limits<double>::infinity();
  }
}

GridResult assemble(const ExperimentConfig& config, const GridLayout& g,
                    std::vector<double>&& errors) {
  GridResult result;
  result.nx = g.nx;
  result.ny = g.ny;
  double threshold = config.mode == ExperimentMode::tdoa_2anchor
                         ? config.tdoa_error_threshold_s
                         : config.position_error_threshold_m;
  std::size_t n_lat = g.latencies.size();
  std::size_t n_pts = g.nx * g.ny;
  result.points.resize(n_pts);
  result.per_trial_errors.reserve(n_pts * n_lat);
  for (std::size_t p = 0; p < n_pts; ++p) {
    double x = config.area.x_min + static_cast<double>(p % g.nx) * config.pitch_m;
    double y = config.area.y_min + static_cast<double>(p / g.nx) * config.pitch_m;
    std::size_t events = 0;
    for (std::size_t il = 0; il < n_lat; ++il) {
      double e = errors[p * n_lat + il];
      if (!(e <= threshold)) {  // +inf and NaN count as events
        ++events;
      }
      result.per_trial_errors.push_back({x, y, g.latencies[il], e});
    }
    result.points[p] = {x, y,
                        static_cast<double>(events) / static_cast<double>(n_lat)};
  }
  result.metadata = describe_config(config);
  return result;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point_index,
                         std::size_t latency_index) {
  return mix_seed(mix_seed(master_seed, point_index), latency_index);
}

double run_trial(const ExperimentConfig& config, const Point3& mobile,
                 double latency_s, std::uint64_t seed) {
  TrialWorkspace ws(config);
  return run_trial_impl(config, ws, mobile, latency_s, seed);
}

GridResult grid_sweep(const ExperimentConfig& config) {
  GridLayout g = make_layout(config);
  std::size_t n_pts = g.nx * g.ny;
  std::size_t n_lat = g.latencies.size();
  std::vector<double> errors(n_pts * n_lat);

  // Surface template/engine construction errors before entering the
  // parallel region (exceptions must not escape an OpenMP block).
  { TrialWorkspace probe(config); }

  int n_threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel num_threads(n_threads)
  {
    TrialWorkspace ws(config);
#pragma omp for schedule(dynamic)
    for (long long p = 0; p < static_cast<long long>(n_pts); ++p) {
      auto up = static_cast<std::size_t>(p);
      Point3 mobile{
          config.area.x_min + static_cast<double>(up % g.nx) * config.pitch_m,
          config.area.y_min + static_cast<double>(up / g.nx) * config.pitch_m,
          0.0};
      for (std::size_t il = 0; il < n_lat; ++il) {
        errors[up * n_lat + il] =
            run_trial_impl(config, ws, mobile, g.latencies[il],
                           trial_seed(config.master_seed, up, il));
      }
    }
  }
  return assemble(config, g, std::move(errors));
}

GridResult grid_sweep_serial(const ExperimentConfig& config) {
  GridLayout g = make_layout(config);
  std::size_t n_pts = g.nx * g.ny;
  std::size_t n_lat = g.latencies.size();
  std::vector<double> errors(n_pts * n_lat);
  TrialWorkspace ws(config);
  for (std::size_t p = 0; p < n_pts; ++p) {
    Point3 mobile{
        config.area.x_min + static_cast<double>(p % g.nx) * config.pitch_m,
        config.area.y_min + static_cast<double>(p / g.nx) * config.pitch_m,
        0.0};
    for (std::size_t il = 0; il < n_lat; ++il) {
      errors[p * n_lat + il] = run_trial_impl(
          config, ws, mobile, g.latencies[il],
          trial_seed(config.master_seed, p, il));
    }
  }
  return assemble(config, g, std::move(errors));
}

std::vector<std::pair<double, double>> empirical_cdf(
    std::span<const double> errors) {
  if (errors.empty()) {
    throw std::invalid_argument("cannot form a CDF from an empty sample");
  }
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  std::size_t n = sorted.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == n || sorted[i + 1] != sorted[i]) {
      out.emplace_back(sorted[i],
                       static_cast<double>(i + 1) / static_cast<double>(n));
    }
  }
  return out;
}

double ble_slot_range_equivalent(double speed_of_sound, double slot_s) {
  return speed_of_sound * slot_s;
}

namespace {

std::string format_latencies(const std::vector<double>& lats) {
  // Uniform progressions echo in start:step:stop form; anything else as
  // an explicit list.
  if (lats.size() >= 3) {
    double step = lats[1] - lats[0];
    bool uniform = step > 0.0;
    for (std::size_t i = 1; uniform && i < lats.size(); ++i) {
      if (std::abs((lats[i] - lats[i - 1]) - step) > 1e-12) {
        uniform = false;
      }
    }
    if (uniform) {
      return format_double(lats.front()) + ":" + format_double(step) + ":" +
             format_double(lats.back());
    }
  }
  std::string out;
  for (std::size_t i = 0; i < lats.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += format_double(lats[i]);
  }
  return out;
}

}  // namespace

std::string describe_config(const ExperimentConfig& config) {
  std::string s;
  s += "[scene]\n";
  s += "anchors = ";
  for (std::size_t i = 0; i < config.scene.anchors.size(); ++i) {
    const Anchor& a = config.scene.anchors[i];
    if (i > 0) {
      s += ", ";
    }
    s += format_double(a.position.x) + " " + format_double(a.position.y) +
         " " + format_double(a.boresight.x) + " " +
         format_double(a.boresight.y);
  }
  s += "\n";
  s += "v = " + format_double(config.scene.speed_of_sound) + "\n";
  s += "\n[signal]\n";
  s += "f0_hz = " + format_double(config.chirp.f0_hz) + "\n";
  s += "f1_hz = " + format_double(config.chirp.f1_hz) + "\n";
  s += "period_s = " + format_double(config.chirp.period_s) + "\n";
  s += "amplitude = " + format_double(config.chirp.amplitude) + "\n";
  s += "\n[channel]\n";
  s += "sample_rate_hz = " + format_double(config.sample_rate_hz) + "\n";
  s += "sigma = " + format_double(config.sigma) + "\n";
  s += "reference_gain_m = " + format_double(config.attenuation.reference_gain_m) +
       "\n";
  s += "absorption_db_per_m = " +
       format_double(config.attenuation.absorption_db_per_m) + "\n";
  s += "directivity_db = ";
  for (std::size_t i = 0; i < config.attenuation.directivity_db.size(); ++i) {
    const auto& [deg, db] = config.attenuation.directivity_db[i];
    if (i > 0) {
      s += ", ";
    }
    s += format_double(deg) + ":" + format_double(db);
  }
  s += "\n";
  s += "jitter_s = " + format_double(config.per_anchor_jitter_s) + "\n";
  s += "\n[experiment]\n";
  s += std::string("mode = ") +
       (config.mode == ExperimentMode::tdoa_2anchor ? "tdoa2" : "pos3") + "\n";
  s += "area = " + format_double(config.area.x_min) + " " +
       format_double(config.area.x_max) + " " + format_double(config.area.y_min) +
       " " + format_double(config.area.y_max) + "\n";
  s += "pitch_m = " + format_double(config.pitch_m) + "\n";
  s += "latencies_s = " + format_latencies(resolved_latencies(config)) + "\n";
  s += std::string("heuristic = ") + (config.heuristic_on ? "on" : "off") + "\n";
  s += "margin_m = " + format_double(config.margin_m) + "\n";
  s += "position_error_threshold_m = " +
       format_double(config.position_error_threshold_m) + "\n";
  s += "tdoa_error_threshold_s = " +
       format_double(config.tdoa_error_threshold_s) + "\n";
  s += "seed = " + std::to_string(config.master_seed) + "\n";
  s += "threads = " + std::to_string(config.threads) + "\n";
  return s;
}

}  // namespace echotdoa
