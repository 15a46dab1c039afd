#include "sqzcomb/trace_synth.hpp"

#include "sqzcomb/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqzcomb {

const char* to_string(AveragingMode m) { return m == AveragingMode::power ? "power" : "magnitude"; }

void TraceConfig::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw std::invalid_argument("TraceConfig: sample_rate must be > 0");
  }
  if (segment_length < 64) throw std::invalid_argument("TraceConfig: segment_length must be >= 64");
  if (!std::has_single_bit(segment_length)) {
    throw std::invalid_argument("TraceConfig: segment_length must be a power of two");
  }
  if (segment_count < 1) throw std::invalid_argument("TraceConfig: segment_count must be >= 1");
}

std::vector<double> TraceConfig::bin_frequencies() const {
  std::vector<double> f(bin_count());
  const auto n = static_cast<double>(segment_length);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) * sample_rate / n;
  return f;
}

namespace {

std::vector<double> variance_on_bins(const QuadratureSpectrum& target, const TraceConfig& cfg) {
  const auto& v = target.variance(cfg.quadrature);
  if (target.frequencies.empty() || v.size() != target.frequencies.size()) {
    throw std::invalid_argument("synthesize_trace: target spectrum is empty or inconsistent");
  }
  const auto bins = cfg.bin_frequencies();
  const double tol = 1e-9 * cfg.bin_spacing();

  bool exact = target.frequencies.size() == bins.size();
  for (std::size_t k = 0; exact && k < bins.size(); ++k) {
    exact = std::abs(target.frequencies[k] - bins[k]) <= tol;
  }
  if (exact) return v;

  if (target.frequencies.front() > tol || target.frequencies.back() < cfg.nyquist() - tol) {
    throw std::invalid_argument("synthesize_trace: target grid does not cover [0, Nyquist]");
  }
  std::vector<double> out(bins.size());
  const auto& f = target.frequencies;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const auto hi = std::lower_bound(f.begin(), f.end(), bins[k]);
    if (hi == f.begin()) {
      out[k] = v.front();
    } else if (hi == f.end()) {
      out[k] = v.back();
    } else {
      const auto j = static_cast<std::size_t>(hi - f.begin());
      const double t = (bins[k] - f[j - 1]) / (f[j] - f[j - 1]);
      out[k] = v[j - 1] + t * (v[j] - v[j - 1]);
    }
  }
  return out;
}

}  // namespace

Trace synthesize_trace(const QuadratureSpectrum& target, const TraceConfig& cfg) {
  cfg.validate();
  const auto variance = variance_on_bins(target, cfg);
  for (double v : variance) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("synthesize_trace: target variances must be finite and >= 0");
    }
  }
  Trace trace;
  trace.sample_rate = cfg.sample_rate;
  trace.quadrature = cfg.quadrature;
  trace.samples.resize(cfg.sample_count());
  kernels::parallel::synthesize_segments(variance, cfg.segment_length, cfg.rng_seed,
                                         trace.samples);
  return trace;
}

Trace synthesize_trace(const OpoParams& params, const TraceConfig& cfg) {
  cfg.validate();
  const auto bins = cfg.bin_frequencies();
  return synthesize_trace(comb_spectrum(params, bins), cfg);
}

Trace encode_fdm(Trace trace, std::span<const Tone> tones) {
  const double fs = trace.sample_rate;
  for (const auto& tone : tones) {
    if (!(tone.carrier_hz >= 0.0) || !(tone.carrier_hz < 0.5 * fs)) {
      throw std::invalid_argument("encode_fdm: carrier " + std::to_string(tone.carrier_hz) +
                                  " Hz is not below Nyquist");
    }
  }
  // The modulation lives in the phase quadrature; the other one is untouched.
  if (tones.empty() || trace.quadrature != Quadrature::phase) return trace;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto n = static_cast<std::ptrdiff_t>(trace.samples.size());
  double* x = trace.samples.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<double>(i);
    double sum = 0.0;
    for (const auto& tone : tones) {
      // Reduce f*n modulo fs first to keep the phase accurate for long records.
      const double cycles = std::fmod(tone.carrier_hz * idx, fs) / fs;
      sum += tone.amplitude * std::sin(two_pi * cycles + tone.phase);
    }
    x[i] += sum;
  }
  return trace;
}

namespace {

constexpr double kStopbandDb = 50.0;

double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0) {
    return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  }
  return 0.0;
}

std::vector<double> windowed_sinc(double cutoff, double fs, std::span<const double> window) {
  const std::size_t m = window.size();
  const double center = 0.5 * static_cast<double>(m - 1);
  const double wc = 2.0 * cutoff / fs;
  std::vector<double> h(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) - center;
    const double arg = std::numbers::pi * wc * t;
    const double sinc = t == 0.0 ? 1.0 : std::sin(arg) / arg;
    h[i] = wc * sinc * window[i];
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

double zero_phase_response(std::span<const double> taps, double f, double fs) {
  const double center = 0.5 * static_cast<double>(taps.size() - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    acc += taps[i] * std::cos(2.0 * std::numbers::pi * f * (static_cast<double>(i) - center) / fs);
  }
  return std::abs(acc);
}

}  // namespace

LowPassFir::LowPassFir(double sample_rate, double bandwidth)
    : sample_rate_(sample_rate), bandwidth_(bandwidth) {
  const double nyquist = 0.5 * sample_rate;
  if (!(sample_rate > 0.0)) throw std::invalid_argument("LowPassFir: sample_rate must be > 0");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("LowPassFir: bandwidth must be > 0");
  if (bandwidth > nyquist * (1.0 + 1e-12)) {
    throw std::invalid_argument("homodyne_detect: analogue bandwidth " + std::to_string(bandwidth) +
                                " Hz exceeds Nyquist " + std::to_string(nyquist) + " Hz");
  }
  if (bandwidth >= 0.999 * nyquist) {
    taps_ = {1.0};
    return;
  }

  const double transition = std::min(0.5 * bandwidth, nyquist - bandwidth);
  const double dw = 2.0 * std::numbers::pi * transition / sample_rate;
  auto taps = static_cast<std::size_t>(std::ceil((kStopbandDb - 8.0) / (2.285 * dw))) + 1;
  if (taps % 2 == 0) ++taps;

  const double beta = kaiser_beta(kStopbandDb);
  std::vector<double> window(taps);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  for (std::size_t i = 0; i < taps; ++i) {
    const double r = 2.0 * static_cast<double>(i) / static_cast<double>(taps - 1) - 1.0;
    window[i] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
  }

  // |H(bandwidth)| rises monotonically with the cutoff; bisect for -3 dB.
  const double target = std::sqrt(0.5);
  double lo = std::max(bandwidth - transition, 1e-6 * nyquist);
  double hi = std::min(bandwidth + transition, nyquist);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto h = windowed_sinc(mid, sample_rate, window);
    if (zero_phase_response(h, bandwidth, sample_rate) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  taps_ = windowed_sinc(0.5 * (lo + hi), sample_rate, window);
}

double LowPassFir::response(double f_hz) const {
  return zero_phase_response(taps_, f_hz, sample_rate_);
}

Trace homodyne_detect(const Trace& trace, double analogue_bandwidth) {
  const LowPassFir fir(trace.sample_rate, analogue_bandwidth);
  if (fir.taps().size() == 1) return trace;
  Trace out;
  out.sample_rate = trace.sample_rate;
  out.quadrature = trace.quadrature;
  out.samples.resize(trace.samples.size());
  kernels::parallel::fir_filter(fir.taps(), trace.samples, out.samples);
  return out;
}

SpectrumEstimate averaged_psd(const Trace& trace, std::size_t segment_length, AveragingMode mode) {
  if (segment_length < 2 || !std::has_single_bit(segment_length)) {
    throw std::invalid_argument("averaged_psd: segment_length must be a power of two >= 2");
  }
  if (trace.samples.empty() || trace.samples.size() % segment_length != 0) {
    throw std::invalid_argument("averaged_psd: trace length must be a positive multiple of segment_length");
  }
  if (!(trace.sample_rate > 0.0)) throw std::invalid_argument("averaged_psd: sample_rate must be > 0");

  const std::size_t segments = trace.samples.size() / segment_length;
  const std::size_t bins = segment_length / 2 + 1;
  SpectrumEstimate est;
  est.mode = mode;
  est.segments_averaged = segments;
  est.low_segment_count = segments < 2;
  est.frequencies.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    est.frequencies[k] =
        static_cast<double>(k) * trace.sample_rate / static_cast<double>(segment_length);
  }
  est.power.assign(bins, 0.0);
  kernels::parallel::accumulate_psd(trace.samples, segment_length, mode, est.power);

  const double inv_m = 1.0 / static_cast<double>(segments);
  for (double& p : est.power) {
    p *= inv_m;
    if (mode == AveragingMode::magnitude) p *= p;
  }
  return est;
}

SpectrumEstimate rayleigh_corrected(const SpectrumEstimate& magnitude_estimate) {
  if (magnitude_estimate.mode != AveragingMode::magnitude) {
    throw std::invalid_argument("rayleigh_corrected: expects a magnitude-mode estimate");
  }
  SpectrumEstimate out = magnitude_estimate;
  out.mode = AveragingMode::power;
  const std::size_t n = out.power.size();
  for (std::size_t k = 0; k < n; ++k) {
    const bool real_bin = k == 0 || k + 1 == n;
    out.power[k] *= real_bin ? std::numbers::pi / 2.0 : 4.0 / std::numbers::pi;
  }
  return out;
}

SpectrumEstimate calibrate_qnl(const SpectrumEstimate& signal,
                               const SpectrumEstimate& vacuum_reference) {
  if (signal.frequencies.size() != vacuum_reference.frequencies.size() ||
      signal.power.size() != vacuum_reference.power.size()) {
    throw std::invalid_argument("calibrate_qnl: spectra are on different grids");
  }
  if (signal.mode != vacuum_reference.mode) {
    throw std::invalid_argument("calibrate_qnl: averaging modes differ");
  }
  const double tol = 1e-9 * std::max(signal.bin_spacing(), 1.0);
  for (std::size_t k = 0; k < signal.frequencies.size(); ++k) {
    if (std::abs(signal.frequencies[k] - vacuum_reference.frequencies[k]) > tol) {
      throw std::invalid_argument("calibrate_qnl: spectra are on different grids");
    }
  }
  SpectrumEstimate out = signal;
  for (std::size_t k = 0; k < out.power.size(); ++k) {
    const double ref = vacuum_reference.power[k];
    if (!(ref > 0.0)) {
      throw std::invalid_argument("calibrate_qnl: vacuum reference has a non-positive bin at " +
                                  std::to_string(vacuum_reference.frequencies[k]) + " Hz");
    }
    out.power[k] /= ref;
  }
  out.segments_averaged = std::min(signal.segments_averaged, vacuum_reference.segments_averaged);
  out.low_segment_count = signal.low_segment_count || vacuum_reference.low_segment_count;
  return out;
}

}  // namespace sqzcomb
