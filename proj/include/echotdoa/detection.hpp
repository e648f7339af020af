#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "echotdoa/signal.hpp"

namespace echotdoa {

/// Arrival time of one anchor's chirp, folded into [0, period).
struct ToaEstimate {
  int anchor_id = -1;
  double toa_mod_s = 0.0;   // modulo the chirp period
  double peak_value = 0.0;  // correlation value at the detected peak
  double sample_rate_hz = 0.0;
};

/// Reusable FFT workspace for circular correlation against one fixed
/// template.  Construction and destruction are serialized internally
/// (the FFT planner is not thread-safe); correlate() itself is safe to
/// call concurrently on distinct engines.
class CorrelationEngine {
 public:
  explicit CorrelationEngine(std::size_t length);
  ~CorrelationEngine();
  CorrelationEngine(CorrelationEngine&&) noexcept;
  CorrelationEngine& operator=(CorrelationEngine&&) noexcept;
  CorrelationEngine(const CorrelationEngine&) = delete;
  CorrelationEngine& operator=(const CorrelationEngine&) = delete;

  std::size_t length() const;

  /// Caches the template spectrum and the carrier search radius derived
  /// from its spectral centroid.  Throws std::invalid_argument on a
  /// length mismatch.
  void load_template(std::span<const double> tmpl);

  /// Computes the circular correlation of the window against the loaded
  /// template together with its analytic envelope.  Throws
  /// std::logic_error if no template is loaded and
  /// std::invalid_argument on a length mismatch.
  void correlate(std::span<const double> window);

  /// Views into the results of the last correlate() call.
  std::span<const double> correlation() const;
  std::span<const double> envelope() const;

  /// Half-width, in samples, of the window around the envelope maximum
  /// searched for the carrier peak (about half a carrier cycle).
  int carrier_search_radius() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Circular cross-correlation c[k] = sum_n w[(n + k) mod L] * t[n],
/// via FFT.  Signals must have equal length and sample rate; throws
/// std::invalid_argument otherwise.
std::vector<double> circular_xcorr(const SampledSignal& window,
                                   const SampledSignal& tmpl);

/// Direct O(L^2) evaluation of the same sum; reference for testing and
/// benchmarking the FFT path.
std::vector<double> circular_xcorr_direct(const SampledSignal& window,
                                          const SampledSignal& tmpl);

/// Sub-sample offset of a peak from its three-point neighborhood:
/// 0.5 * (c_prev - c_next) / (c_prev - 2 * c_peak + c_next), clamped to
/// [-0.5, 0.5]; returns 0 when the curvature is negligible relative to
/// the peak (flat-peak guard).
double parabolic_refine(double c_prev, double c_peak, double c_next);

/// Detects the chirp arrival in a one-period window: the correlation
/// peak is located by the analytic envelope, snapped to the nearest
/// carrier peak of the raw correlation, and refined to sub-sample
/// precision.  Returns the arrival time modulo period_s.
ToaEstimate detect_toa(const SampledSignal& window, const SampledSignal& tmpl,
                       double period_s, int anchor_id = -1);

/// Same detection against a preloaded engine (used by the hot loop).
ToaEstimate detect_toa(CorrelationEngine& engine,
                       std::span<const double> window, double sample_rate_hz,
                       double period_s, int anchor_id);

}  // namespace echotdoa
