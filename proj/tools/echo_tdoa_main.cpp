// Command-line harness: grid sweeps, CDF runs, and single-trial dumps.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "echotdoa/config.hpp"
#include "echotdoa/detection.hpp"
#include "echotdoa/format.hpp"
#include "echotdoa/report.hpp"
#include "echotdoa/solver.hpp"
#include "echotdoa/tdoa.hpp"
#include "echotdoa/version.hpp"

namespace {

using namespace echotdoa;

// ECHO_TDOA_THREADS caps the worker count; 0 or unset leaves the
// configured value alone.
void apply_thread_cap(ExperimentConfig& config) {
  const char* env = std::getenv("ECHO_TDOA_THREADS");
  if (env == nullptr || *env == '\0') {
    return;
  }
  char* end = nullptr;
  long cap = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || cap < 0) {
    throw ConfigError("ECHO_TDOA_THREADS must be a non-negative integer");
  }
  if (cap > 0) {
    config.threads = config.threads > 0
                         ? std::min(config.threads, static_cast<int>(cap))
                         : static_cast<int>(cap);
  }
}

void run_sweep(const ExperimentConfig& config, const std::string& out_dir,
               bool heatmap) {
  RunManifest manifest = run_and_write(config, out_dir, {heatmap});
  std::cout << "wrote";
  for (const std::string& f : manifest.output_files) {
    std::cout << ' ' << f;
  }
  std::cout << " to " << out_dir << " in "
            << format_double(manifest.wall_seconds) << " s (seed "
            << manifest.master_seed << ")\n";
}

void run_single_trial(const ExperimentConfig& config, double x, double y,
                      double latency_s) {
  Scene scene = config.scene;
  scene.mobile = {x, y, 0.0};
  int n = config.mode == ExperimentMode::tdoa_2anchor ? 2 : 3;

  SampledSignal tmpl = synthesize_template(config.chirp, config.sample_rate_hz);
  CorrelationEngine engine(tmpl.samples.size());
  engine.load_template(tmpl.samples);

  AcquisitionConfig acq;
  acq.window_s = config.chirp.period_s;
  acq.sample_rate_hz = config.sample_rate_hz;
  acq.latency_s = latency_s;
  acq.per_anchor_jitter_s = config.per_anchor_jitter_s;
  acq.noise_sigma = config.sigma;
  acq.seed = trial_seed(config.master_seed, 0, 0);

  std::cout << "mobile (" << format_double(x) << ", " << format_double(y)
            << ") m, latency " << format_double(latency_s) << " s, sigma "
            << format_double(config.sigma) << ", seed " << acq.seed << "\n";

  std::vector<ToaEstimate> toas;
  for (int i = 0; i < n; ++i) {
    const Anchor& a = scene.anchors[i];
    double r = range(a.position, scene.mobile);
    double theta = incidence_angle(a, scene.mobile);
    double g = attenuation_gain(config.attenuation, r, theta);
    SampledSignal window =
        simulate_reception(scene, a.id, config.chirp, config.attenuation, acq);
    ToaEstimate toa = detect_toa(engine, window.samples, config.sample_rate_hz,
                                 config.chirp.period_s, a.id);
    toas.push_back(toa);
    std::cout << "anchor " << a.id << ": range " << format_double(r)
              << " m, angle " << format_double(theta * 180.0 / std::numbers::pi)
              << " deg, gain " << format_double(g);
    if (config.sigma > 0.0) {
      std::cout << ", snr "
                << format_double(snr_at(config.attenuation, r, theta,
                                        config.sigma))
                << " dB";
    }
    std::cout << ", toa_mod " << format_double(toa.toa_mod_s) << " s, peak "
              << format_double(toa.peak_value) << "\n";
  }

  CorrectionConfig corr{config.margin_m, config.chirp.period_s,
                        scene.speed_of_sound};
  RangeDiffSet raw = form_corrected_set(toas, scene, corr, scene.anchors[0].id,
                                        false);
  RangeDiffSet used = form_corrected_set(toas, scene, corr,
                                         scene.anchors[0].id,
                                         config.heuristic_on);
  for (std::size_t i = 0; i < used.diffs.size(); ++i) {
    double truth =
        true_range_diff(scene, used.diffs[i].anchor_id, used.reference_id);
    std::cout << "diff " << used.diffs[i].anchor_id << "-" << used.reference_id
              << ": raw " << format_double(raw.diffs[i].diff_m) << " m, used "
              << format_double(used.diffs[i].diff_m) << " m"
              << (used.diffs[i].corrected ? " (wrap corrected)" : "")
              << ", true " << format_double(truth) << " m\n";
  }

  if (config.mode == ExperimentMode::tdoa_2anchor) {
    double err = std::abs(used.diffs[0].diff_m -
                          true_range_diff(scene, scene.anchors[1].id,
                                          scene.anchors[0].id)) /
                 scene.speed_of_sound;
    std::cout << "tdoa error " << format_double(err) << " s ("
              << format_double(err * scene.speed_of_sound) << " m)\n";
    return;
  }
  try {
    PositionFix fix =
        solve_linear_array(std::span<const Anchor>(scene.anchors.data(), 3),
                           used.diffs[0].diff_m, used.diffs[1].diff_m);
    double ex = fix.position.x - x;
    double ey = fix.position.y - y;
    std::cout << "position (" << format_double(fix.position.x) << ", "
              << format_double(fix.position.y) << ") m, error "
              << format_double(std::sqrt(ex * ex + ey * ey)) << " m, residual "
              << format_double(fix.residual_norm) << " m"
              << (fix.near_singular ? ", near singular" : "") << "\n";
  } catch (const SolverError& e) {
    std::cout << "solve failed: " << e.what() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrasound TDoA positioning simulator"};
  app.set_version_flag("--version", echotdoa::kVersion);
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::optional<double> pitch;
  std::optional<std::string> heuristic;
  std::optional<std::string> mode;
  std::optional<int> threads;
  bool heatmap = false;
  double x = 0.0;
  double y = 0.0;
  double latency = 0.0;

  auto add_common = [&](CLI::App* sub, bool sweep) {
    sub->add_option("--config", config_path, "Config file (INI-style)");
    sub->add_option("--seed", seed, "Master seed for the experiment");
    sub->add_option("--sigma", sigma, "Noise sigma (linear amplitude)");
    sub->add_option("--heuristic", heuristic,
                    "Wrap-correction heuristic (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--mode", mode, "Experiment mode (tdoa2|pos3)")
        ->check(CLI::IsMember({"tdoa2", "pos3"}));
    sub->add_option("--threads", threads, "Worker threads (0 = all)");
    if (sweep) {
      sub->add_option("--out", out_dir, "Output directory");
      sub->add_option("--pitch", pitch, "Grid pitch in meters");
      sub->add_flag("--heatmap", heatmap, "Also write heatmap.pgm");
    }
  };

  CLI::App* grid = app.add_subcommand(
      "grid", "Sweep the area and write the error-fraction map");
  add_common(grid, true);
  CLI::App* cdf = app.add_subcommand(
      "cdf", "Sweep the area and write the empirical error CDF");
  add_common(cdf, true);
  CLI::App* trial = app.add_subcommand(
      "trial", "Run one trial at a given position and dump diagnostics");
  add_common(trial, false);
  trial->add_option("--x", x, "Mobile x in meters")->required();
  trial->add_option("--y", y, "Mobile y in meters")->required();
  trial->add_option("--latency", latency, "Acquisition latency in seconds");

  CLI11_PARSE(app, argc, argv);

  try {
    CliOverrides overrides;
    overrides.sigma = sigma;
    overrides.pitch_m = pitch;
    overrides.seed = seed;
    if (heuristic) {
      overrides.heuristic_on = *heuristic == "on";
    }
    if (mode) {
      overrides.mode = *mode == "tdoa2" ? ExperimentMode::tdoa_2anchor
                                        : ExperimentMode::position_3anchor;
    }
    overrides.threads = threads;

    std::optional<std::filesystem::path> file;
    if (config_path) {
      file = *config_path;
    }
    ExperimentConfig config = parse_config(file, overrides);
    apply_thread_cap(config);

    if (grid->parsed() || cdf->parsed()) {
      run_sweep(config, out_dir, heatmap);
    } else {
      run_single_trial(config, x, y, latency);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
