// Timing harness: the FFT correlation path against the direct sum, and
// the OpenMP grid sweep against its serial reference.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <iostream>
#include <random>

#include "echotdoa/config.hpp"
#include "echotdoa/detection.hpp"
#include "echotdoa/experiment.hpp"

namespace {

using namespace echotdoa;

template <typename F>
double best_seconds(int reps, F&& body) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
                   .count();
    best = std::min(best, s);
  }
  return best;
}

SampledSignal random_signal(std::size_t n, std::uint64_t seed) {
  SampledSignal s;
  s.sample_rate_hz = 250000.0;
  s.samples.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : s.samples) {
    v = u(rng);
  }
  return s;
}

void bench_correlation() {
  std::cout << "circular correlation (best of 5):\n";
  for (std::size_t n : {512UL, 1024UL, 3750UL}) {
    SampledSignal window = random_signal(n, 1);
    SampledSignal tmpl = random_signal(n, 2);

    std::vector<double> direct;
    double t_direct =
        best_seconds(5, [&] { direct = circular_xcorr_direct(window, tmpl); });

    CorrelationEngine engine(n);
    engine.load_template(tmpl.samples);
    double t_fft = best_seconds(5, [&] { engine.correlate(window.samples); });

    auto fft = engine.correlation();
    double max_dev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      max_dev = std::max(max_dev, std::abs(fft[k] - direct[k]));
    }
    std::cout << "  L = " << n << ": direct " << t_direct * 1e3 << " ms, fft "
              << t_fft * 1e6 << " us, speedup " << t_direct / t_fft
              << "x, max deviation " << max_dev << "\n";
  }
}

void bench_sweep() {
  ExperimentConfig config = default_experiment_config();
  config.pitch_m = 0.5;  // 9 x 9 grid, 31 latencies per point
  config.sigma = 0.01;

  std::cout << "grid sweep (" << omp_get_max_threads() << " threads available):\n";
  GridResult serial;
  double t_serial = best_seconds(1, [&] { serial = grid_sweep_serial(config); });
  GridResult parallel;
  double t_parallel = best_seconds(1, [&] { parallel = grid_sweep(config); });

  bool identical = serial.points.size() == parallel.points.size() &&
                   serial.per_trial_errors.size() ==
                       parallel.per_trial_errors.size();
  for (std::size_t i = 0; identical && i < serial.per_trial_errors.size();
       ++i) {
    identical = serial.per_trial_errors[i].error ==
                parallel.per_trial_errors[i].error;
  }
  std::cout << "  serial " << t_serial << " s, parallel " << t_parallel
            << " s, speedup " << t_serial / t_parallel << "x, results "
            << (identical ? "identical" : "DIFFER") << "\n";
}

}  // namespace

int main() {
  bench_correlation();
  bench_sweep();
  return 0;
}
