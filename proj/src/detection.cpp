#include "echotdoa/detection.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace echotdoa {

namespace {

// FFTW's planner is not thread-safe; plan creation and destruction are
// serialized through this mutex.  Executing plans is safe concurrently.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct CorrelationEngine::Impl {
  std::size_t n = 0;
  std::size_t nf = 0;  // n / 2 + 1 spectrum bins
  bool has_template = false;
  int radius = 1;

  double* real_buf = nullptr;
  fftw_complex* spec_buf = nullptr;
  fftw_complex* tmpl_conj = nullptr;
  fftw_complex* analytic_in = nullptr;
  fftw_complex* analytic_out = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  fftw_plan analytic = nullptr;

  std::vector<double> corr;
  std::vector<double> env;

  explicit Impl(std::size_t length) : n(length), nf(length / 2 + 1) {
    real_buf = fftw_alloc_real(n);
    spec_buf = fftw_alloc_complex(nf);
    tmpl_conj = fftw_alloc_complex(nf);
    analytic_in = fftw_alloc_complex(n);
    analytic_out = fftw_alloc_complex(n);
    corr.resize(n);
    env.resize(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_buf, spec_buf,
                                   FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_buf, real_buf,
                                   FFTW_ESTIMATE);
    analytic = fftw_plan_dft_1d(static_cast<int>(n), analytic_in, analytic_out,
                                FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~Impl() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(inverse);
      fftw_destroy_plan(analytic);
    }
    fftw_free(real_buf);
    fftw_free(spec_buf);
    fftw_free(tmpl_conj);
    fftw_free(analytic_in);
    fftw_free(analytic_out);
  }
};

CorrelationEngine::CorrelationEngine(std::size_t length) {
  if (length < 4) {
    throw std::invalid_argument("correlation length must be at least 4");
  }
  impl_ = std::make_unique<Impl>(length);
}

CorrelationEngine::~CorrelationEngine() = default;
CorrelationEngine::CorrelationEngine(CorrelationEngine&&) noexcept = default;
CorrelationEngine& CorrelationEngine::operator=(CorrelationEngine&&) noexcept =
    default;

std::size_t CorrelationEngine::length() const { return impl_->n; }

void CorrelationEngine::load_template(std::span<const double> tmpl) {
  Impl& im = *impl_;
  if (tmpl.size() != im.n) {
    throw std::invalid_argument("template length does not match the engine");
  }
  std::memcpy(im.real_buf, tmpl.data(), im.n * sizeof(double));
  fftw_execute(im.forward);
  double wsum = 0.0;
  double wbin = 0.0;
  for (std::size_t f = 0; f < im.nf; ++f) {
    im.tmpl_conj[f][0] = im.spec_buf[f][0];
    im.tmpl_conj[f][1] = -im.spec_buf[f][1];
    double p = im.spec_buf[f][0] * im.spec_buf[f][0] +
               im.spec_buf[f][1] * im.spec_buf[f][1];
    wsum += p;
    wbin += p * static_cast<double>(f);
  }
  // Half a cycle of the template's centroid frequency, in samples: the
  // carrier peak nearest the envelope maximum lies within this radius.
  double centroid = wsum > 0.0 ? wbin / wsum : 0.0;
  if (centroid < 1.0) {
    im.radius = static_cast<int>(im.n / 2);
  } else {
    double half_cycle = static_cast<double>(im.n) / (2.0 * centroid);
    im.radius = std::clamp(static_cast<int>(std::ceil(half_cycle)), 1,
                           static_cast<int>(im.n / 2));
  }
  im.has_template = true;
}

void CorrelationEngine::correlate(std::span<const double> window) {
  Impl& im = *impl_;
  if (!im.has_template) {
    throw std::logic_error("no template loaded into the correlation engine");
  }
  if (window.size() != im.n) {
    throw std::invalid_argument("window length does not match the engine");
  }
  std::memcpy(im.real_buf, window.data(), im.n * sizeof(double));
  fftw_execute(im.forward);
  // c[k] = sum_n w[(n + k) mod L] t[n] is the inverse transform of
  // W[f] * conj(T[f]).
  for (std::size_t f = 0; f < im.nf; ++f) {
    double re = im.spec_buf[f][0] * im.tmpl_conj[f][0] -
                im.spec_buf[f][1] * im.tmpl_conj[f][1];
    double imag = im.spec_buf[f][0] * im.tmpl_conj[f][1] +
                  im.spec_buf[f][1] * im.tmpl_conj[f][0];
    im.spec_buf[f][0] = re;
    im.spec_buf[f][1] = imag;
  }
  // Analytic-signal spectrum of c: positive frequencies doubled, the
  // upper half zeroed (DC and, for even n, the Nyquist bin unscaled).
  for (std::size_t f = 0; f < im.n; ++f) {
    im.analytic_in[f][0] = 0.0;
    im.analytic_in[f][1] = 0.0;
  }
  im.analytic_in[0][0] = im.spec_buf[0][0];
  im.analytic_in[0][1] = im.spec_buf[0][1];
  for (std::size_t f = 1; f < im.nf; ++f) {
    double factor = (im.n % 2 == 0 && f == im.n / 2) ? 1.0 : 2.0;
    im.analytic_in[f][0] = factor * im.spec_buf[f][0];
    im.analytic_in[f][1] = factor * im.spec_buf[f][1];
  }
  fftw_execute(im.inverse);  // overwrites spec_buf; product already copied
  double scale = 1.0 / static_cast<double>(im.n);
  for (std::size_t k = 0; k < im.n; ++k) {
    im.corr[k] = im.real_buf[k] * scale;
  }
  fftw_execute(im.analytic);
  for (std::size_t k = 0; k < im.n; ++k) {
    double re = im.analytic_out[k][0] * scale;
    double imag = im.analytic_out[k][1] * scale;
    im.env[k] = std::sqrt(re * re + imag * imag);
  }
}

std::span<const double> CorrelationEngine::correlation() const {
  return impl_->corr;
}

std::span<const double> CorrelationEngine::envelope() const {
  return impl_->env;
}

int CorrelationEngine::carrier_search_radius() const { return impl_->radius; }

namespace {

void check_compatible(const SampledSignal& window, const SampledSignal& tmpl) {
  if (window.samples.size() != tmpl.samples.size()) {
    throw std::invalid_argument(
        "window and template lengths differ for circular correlation");
  }
  if (window.sample_rate_hz != tmpl.sample_rate_hz) {
    throw std::invalid_argument(
        "window and template sample rates differ for circular correlation");
  }
  if (window.samples.empty()) {
    throw std::invalid_argument("cannot correlate empty signals");
  }
}

}  // namespace

std::vector<double> circular_xcorr(const SampledSignal& window,
                                   const SampledSignal& tmpl) {
  check_compatible(window, tmpl);
  CorrelationEngine engine(window.samples.size());
  engine.load_template(tmpl.samples);
  engine.correlate(window.samples);
  auto c = engine.correlation();
  return std::vector<double>(c.begin(), c.end());
}

std::vector<double> circular_xcorr_direct(const SampledSignal& window,
                                          const SampledSignal& tmpl) {
  check_compatible(window, tmpl);
  std::size_t n = window.samples.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + k;
      if (j >= n) {
        j -= n;
      }
      acc += window.samples[j] * tmpl.samples[i];
    }
    out[k] = acc;
  }
  return out;
}

double parabolic_refine(double c_prev, double c_peak, double c_next) {
  double den = c_prev - 2.0 * c_peak + c_next;
  if (den == 0.0 || std::abs(den) < 1e-12 * std::abs(c_peak)) {
    return 0.0;  // flat peak: no curvature to interpolate
  }
  double delta = 0.5 * (c_prev - c_next) / den;
  return std::clamp(delta, -0.5, 0.5);
}

ToaEstimate detect_toa(CorrelationEngine& engine,
                       std::span<const double> window, double sample_rate_hz,
                       double period_s, int anchor_id) {
  if (!(sample_rate_hz > 0.0) || !(period_s > 0.0)) {
    throw std::invalid_argument(
        "sample rate and period must be positive for detection");
  }
  engine.correlate(window);
  auto corr = engine.correlation();
  auto env = engine.envelope();
  auto n = static_cast<std::ptrdiff_t>(engine.length());

  // Stage 1: the envelope maximum locates the arrival to within half a
  // carrier cycle (ties resolved toward the smallest index).
  std::ptrdiff_t k_env = 0;
  for (std::ptrdiff_t k = 1; k < n; ++k) {
    if (env[k] > env[k_env]) {
      k_env = k;
    }
  }
  // Stage 2: snap to the carrier peak of the raw correlation nearest
  // the envelope maximum.  The raw correlation oscillates at the
  // carrier frequency; its global maximum can sit one whole cycle off
  // whenever a neighboring crest falls closer to a sample instant, so
  // the search is confined to the envelope's half-cycle neighborhood.
  int radius = engine.carrier_search_radius();
  std::ptrdiff_t best = -1;
  for (int off = -radius; off <= radius; ++off) {
    std::ptrdiff_t k = (k_env + off) % n;
    if (k < 0) {
      k += n;
    }
    if (best < 0 || corr[k] > corr[best] || (corr[k] == corr[best] && k < best)) {
      best = k;
    }
  }
  // Stage 3: sub-sample refinement on the raw correlation.
  double c_prev = corr[(best - 1 + n) % n];
  double c_next = corr[(best + 1) % n];
  double delta = parabolic_refine(c_prev, corr[best], c_next);

  double t = (static_cast<double>(best) + delta) / sample_rate_hz;
  double toa = std::fmod(t, period_s);
  if (toa < 0.0) {
    toa += period_s;
  }
  if (toa >= period_s) {
    toa -= period_s;
  }
  ToaEstimate out;
  out.anchor_id = anchor_id;
  out.toa_mod_s = toa;
  out.peak_value = corr[best];
  out.sample_rate_hz = sample_rate_hz;
  return out;
}

ToaEstimate detect_toa(const SampledSignal& window, const SampledSignal& tmpl,
                       double period_s, int anchor_id) {
  check_compatible(window, tmpl);
  CorrelationEngine engine(window.samples.size());
  engine.load_template(tmpl.samples);
  return detect_toa(engine, window.samples, window.sample_rate_hz, period_s,
                    anchor_id);
}

}  // namespace echotdoa
