#include "echotdoa/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "echotdoa/seeding.hpp"

namespace echotdoa {

std::vector<std::pair<double, double>> AttenuationModel::default_directivity() {
  return {{0.0, 0.0}, {40.0, -6.0}, {90.0, -20.0}, {180.0, -30.0}};
}

void AttenuationModel::validate() const {
  if (!(reference_gain_m > 0.0)) {
    throw std::invalid_argument("reference gain must be positive");
  }
  if (absorption_db_per_m < 0.0) {
    throw std::invalid_argument("absorption must be non-negative");
  }
  if (directivity_db.empty()) {
    throw std::invalid_argument("directivity table must not be empty");
  }
  if (directivity_db.front().first != 0.0) {
    throw std::invalid_argument("directivity table must start at 0 degrees");
  }
  for (std::size_t i = 1; i < directivity_db.size(); ++i) {
    if (!(directivity_db[i].first > directivity_db[i - 1].first)) {
      throw std::invalid_argument(
          "directivity table angles must be strictly increasing");
    }
  }
}

namespace {

// Piecewise-linear interpolation of the directivity table in dB;
// clamped to the last entry beyond the table's end.
double directivity_db_at(const AttenuationModel& model, double theta_rad) {
  const auto& table = model.directivity_db;
  double deg = theta_rad * 180.0 / std::numbers::pi;
  if (deg <= table.front().first) {
    return table.front().second;
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (deg <= table[i].first) {
      double t = (deg - table[i - 1].first) /
                 (table[i].first - table[i - 1].first);
      return table[i - 1].second +
             t * (table[i].second - table[i - 1].second);
    }
  }
  return table.back().second;
}

}  // namespace

double attenuation_gain(const AttenuationModel& model, double range_m,
                        double theta_rad) {
  model.validate();
  if (!(range_m > 0.0)) {
    throw std::invalid_argument("range must be positive");
  }
  double spreading = model.reference_gain_m / range_m;
  double absorption =
      std::pow(10.0, -model.absorption_db_per_m * range_m / 20.0);
  double directivity = std::pow(10.0, directivity_db_at(model, theta_rad) / 20.0);
  return spreading * absorption * directivity;
}

double snr_at(const AttenuationModel& model, double range_m, double theta_rad,
              double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("noise sigma must be positive for an SNR");
  }
  double g = attenuation_gain(model, range_m, theta_rad);
  return 10.0 * std::log10(g * g / 2.0 / (sigma * sigma));
}

SampledSignal simulate_reception(const Scene& scene, int anchor_id,
                                 const ChirpSpec& chirp,
                                 const AttenuationModel& model,
                                 const AcquisitionConfig& acq) {
  chirp.validate();
  if (acq.window_s < chirp.period_s) {
    throw std::invalid_argument(
        "acquisition window must cover at least one chirp period");
  }
  if (!(acq.sample_rate_hz > 0.0)) {
    throw std::invalid_argument("sample rate must be positive");
  }
  if (acq.noise_sigma < 0.0) {
    throw std::invalid_argument("noise sigma must be non-negative");
  }
  if (acq.per_anchor_jitter_s < 0.0) {
    throw std::invalid_argument("jitter must be non-negative");
  }
  const Anchor& anchor = scene.anchor(anchor_id);
  double r = range(anchor.position, scene.mobile);
  double theta = incidence_angle(anchor, scene.mobile);
  double g = attenuation_gain(model, r, theta);
  double tau = r / scene.speed_of_sound;

  // One stream per (trial, anchor): jitter first, then the noise samples,
  // so the same seed always reproduces the same window.
  std::mt19937_64 rng(mix_seed(acq.seed, static_cast<std::uint64_t>(anchor_id)));
  double jitter = 0.0;
  if (acq.per_anchor_jitter_s > 0.0) {
    std::normal_distribution<double> d(0.0, acq.per_anchor_jitter_s);
    jitter = d(rng);
  }

  SampledSignal out;
  out.sample_rate_hz = acq.sample_rate_hz;
  out.start_time_s = acq.latency_s + jitter;
  auto n = static_cast<std::size_t>(
      std::llround(acq.window_s * acq.sample_rate_hz));
  out.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double t = out.start_time_s + static_cast<double>(k) / acq.sample_rate_hz -
               tau;
    out.samples[k] = g * chirp_train_value(chirp, t);
  }
  if (acq.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, acq.noise_sigma);
    for (std::size_t k = 0; k < n; ++k) {
      out.samples[k] += noise(rng);
    }
  }
  return out;
}

}  // namespace echotdoa
