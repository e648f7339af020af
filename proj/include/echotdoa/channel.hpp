#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "echotdoa/geometry.hpp"
#include "echotdoa/signal.hpp"

namespace echotdoa {

/// Amplitude model for the air channel: spherical spreading referenced
/// to 1 m, frequency-flat absorption in dB/m, and a piecewise-linear
/// transducer directivity table in dB over incidence angle in degrees.
struct AttenuationModel {
  double reference_gain_m = 0.08;    // linear amplitude at 1 m, on boresight
  double absorption_db_per_m = 1.3;
  std::vector<std::pair<double, double>> directivity_db = default_directivity();

  /// 0 dB on boresight falling to -30 dB behind the transducer.
  static std::vector<std::pair<double, double>> default_directivity();

  /// Throws std::invalid_argument on non-positive reference gain,
  /// negative absorption, or a directivity table that is empty, does not
  /// start at 0 degrees, or has non-increasing angles.
  void validate() const;
};

/// Receiver-side acquisition parameters for one trial.
struct AcquisitionConfig {
  double window_s = 0.015;          // capture length, must be >= chirp period
  double sample_rate_hz = 250000.0;
  double latency_s = 0.0;           // unknown start offset of the window
  double per_anchor_jitter_s = 0.0; // std dev of a per-anchor clock offset
  double noise_sigma = 0.01;        // additive white Gaussian noise, linear
  std::uint64_t seed = 0;
};

/// Linear amplitude gain at a given range and incidence angle:
/// (A0 / r) * 10^(-alpha * r / 20) * 10^(D(theta) / 20).
/// Throws std::invalid_argument for r <= 0.
double attenuation_gain(const AttenuationModel& model, double range_m,
                        double theta_rad);

/// Per-sample SNR in dB for a unit-amplitude chirp: the mean power of
/// g * sin(...) is g^2 / 2 against noise power sigma^2.
/// Throws std::invalid_argument for sigma <= 0.
double snr_at(const AttenuationModel& model, double range_m, double theta_rad,
              double sigma);

/// Simulates the window captured from one anchor: the attenuated,
/// propagation-delayed chirp train observed through an unsynchronized
/// receiver clock, plus white Gaussian noise.  Noise and jitter draws
/// come from a stream derived from (seed, anchor id), so per-anchor
/// streams are independent and reproducible.
SampledSignal simulate_reception(const Scene& scene, int anchor_id,
                                 const ChirpSpec& chirp,
                                 const AttenuationModel& model,
                                 const AcquisitionConfig& acq);

}  // namespace echotdoa
