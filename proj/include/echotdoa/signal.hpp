#pragma once

#include <vector>

namespace echotdoa {

/// Parameters of one linear up-chirp and the period of its repetition.
struct ChirpSpec {
  double f0_hz = 38000.0;   // start frequency
  double f1_hz = 42000.0;   // end frequency
  double period_s = 0.015;  // chirp duration == repetition period
  double amplitude = 1.0;

  /// Throws std::invalid_argument when 0 < f0 < f1, period > 0 or
  /// amplitude > 0 is violated.
  void validate() const;
};

/// Uniformly sampled real signal.  start_time_s is the absolute time of
/// sample 0 on the receiver clock.
struct SampledSignal {
  double sample_rate_hz = 0.0;
  std::vector<double> samples;
  double start_time_s = 0.0;
};

/// Instantaneous value of a single chirp: A * sin(2*pi*f(t)*t) with
/// f(t) = f0 + (f1 - f0) * t / (2 * period) inside [0, period], zero
/// outside.  The sweep factor 1/2 makes the derivative of the phase
/// run from f0 to f1 across the chirp.
double chirp_value(const ChirpSpec& spec, double t_s);

/// Periodic chirp train: the single chirp evaluated at the local time
/// within the current period.  Zero for t < 0 (before transmission
/// starts).
double chirp_train_value(const ChirpSpec& spec, double t_s);

/// One chirp period sampled at sample_rate_hz; length is
/// round(period * fs).  Throws std::invalid_argument when the sample
/// rate is below the Nyquist rate 2 * f1.
SampledSignal synthesize_template(const ChirpSpec& spec, double sample_rate_hz);

}  // namespace echotdoa
