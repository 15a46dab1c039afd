#pragma once

// Per-element bodies shared by the serial and parallel kernels, so the two
// differ only in how the iteration space is scheduled.

#include "fft.hpp"
#include "sqzcomb/opo_spectrum.hpp"
#include "sqzcomb/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace sqzcomb::kernels::detail {

inline void comb_bin(const OpoParams& params, double f_hz, double& v_plus, double& v_minus,
                     DelayTerm delay) {
  const auto v = quadrature_variances(params, 2.0 * std::numbers::pi * f_hz, delay);
  v_plus = v.v_plus;
  v_minus = v.v_minus;
}

// Independent substream per (seed, segment).
inline std::mt19937_64 segment_generator(std::uint64_t seed, std::uint64_t segment) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(segment),
                    static_cast<std::uint32_t>(segment >> 32), 0x5351u};
  return std::mt19937_64(seq);
}

// Hermitian spectrum with E|X_k|^2 = V_k / N (both halves), inverse
// transformed without normalisation: sample variance is the mean of V over
// the full two-sided spectrum.
inline void synthesize_segment(const sqzcomb::detail::RealFft& fft,
                               sqzcomb::detail::RealFft::Workspace& ws,
                               std::span<const double> bin_variance, std::uint64_t seed,
                               std::uint64_t segment, std::span<double> out) {
  const std::size_t n = fft.size();
  const std::size_t half = n / 2;
  const double inv_n = 1.0 / static_cast<double>(n);
  auto gen = segment_generator(seed, segment);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto spec = ws.spectrum();
  spec[0] = {normal(gen) * std::sqrt(bin_variance[0] * inv_n), 0.0};
  for (std::size_t k = 1; k < half; ++k) {
    const double scale = std::sqrt(0.5 * bin_variance[k] * inv_n);
    const double re = normal(gen);
    const double im = normal(gen);
    spec[k] = {re * scale, im * scale};
  }
  spec[half] = {normal(gen) * std::sqrt(bin_variance[half] * inv_n), 0.0};
  fft.inverse(ws);
  auto real = ws.real();
  std::copy(real.begin(), real.end(), out.begin());
}

inline void segment_periodogram(const sqzcomb::detail::RealFft& fft,
                                sqzcomb::detail::RealFft::Workspace& ws,
                                std::span<const double> segment, AveragingMode mode,
                                std::span<double> acc) {
  std::copy(segment.begin(), segment.end(), ws.real().begin());
  fft.forward(ws);
  const double n = static_cast<double>(fft.size());
  auto spec = ws.spectrum();
  if (mode == AveragingMode::power) {
    const double inv_n = 1.0 / n;
    for (std::size_t k = 0; k < spec.size(); ++k) acc[k] += std::norm(spec[k]) * inv_n;
  } else {
    const double inv_sqrt_n = 1.0 / std::sqrt(n);
    for (std::size_t k = 0; k < spec.size(); ++k) acc[k] += std::abs(spec[k]) * inv_sqrt_n;
  }
}

inline double fir_output(std::span<const double> taps, std::span<const double> in, std::size_t n) {
  const std::size_t m = taps.size();
  const std::size_t center = m / 2;
  const std::size_t len = in.size();
  double sum = 0.0;
  if (n >= center && n + center < len) {
    const double* x = in.data() + (n - center);
    for (std::size_t j = 0; j < m; ++j) sum += taps[j] * x[j];
    return sum;
  }
  const auto last = static_cast<std::ptrdiff_t>(len) - 1;
  for (std::size_t j = 0; j < m; ++j) {
    const auto idx = std::clamp(static_cast<std::ptrdiff_t>(n + j) - static_cast<std::ptrdiff_t>(center),
                                std::ptrdiff_t{0}, last);
    sum += taps[j] * in[static_cast<std::size_t>(idx)];
  }
  return sum;
}

}  // namespace sqzcomb::kernels::detail
