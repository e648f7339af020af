#include "echotdoa/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace echotdoa {

void ChirpSpec::validate() const {
  if (!(f0_hz > 0.0)) {
    throw std::invalid_argument("chirp start frequency must be positive");
  }
  if (!(f1_hz > f0_hz)) {
    throw std::invalid_argument(
        "chirp end frequency must exceed the start frequency");
  }
  if (!(period_s > 0.0)) {
    throw std::invalid_argument("chirp period must be positive");
  }
  if (!(amplitude > 0.0)) {
    throw std::invalid_argument("chirp amplitude must be positive");
  }
}

double chirp_value(const ChirpSpec& spec, double t_s) {
  if (t_s < 0.0 || t_s > spec.period_s) {
    return 0.0;
  }
  double f = spec.f0_hz + (spec.f1_hz - spec.f0_hz) * t_s / (2.0 * spec.period_s);
  return spec.amplitude * std::sin(2.0 * std::numbers::pi * f * t_s);
}

double chirp_train_value(const ChirpSpec& spec, double t_s) {
  if (t_s < 0.0) {
    return 0.0;
  }
  double local = t_s - spec.period_s * std::floor(t_s / spec.period_s);
  return chirp_value(spec, local);
}

SampledSignal synthesize_template(const ChirpSpec& spec,
                                  double sample_rate_hz) {
  spec.validate();
  if (sample_rate_hz < 2.0 * spec.f1_hz) {
    throw std::invalid_argument(
        "sample rate is below the Nyquist rate of the chirp");
  }
  SampledSignal out;
  out.sample_rate_hz = sample_rate_hz;
  auto n = static_cast<std::size_t>(std::llround(spec.period_s * sample_rate_hz));
  out.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.samples[k] = chirp_value(spec, static_cast<double>(k) / sample_rate_hz);
  }
  return out;
}

}  // namespace echotdoa
