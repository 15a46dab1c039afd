#pragma once

#include "sqzcomb/opo_spectrum.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sqzcomb {

enum class AveragingMode { power, magnitude };

const char* to_string(AveragingMode m);

// Sampling and Monte Carlo layout of one homodyne record.
//
// Desk-scale defaults: 1.024 GS/s with 4096-sample segments puts every
// multiple of 250 kHz on a DFT bin, so the 199 MHz comb and the 192/392 MHz
// misaligned carriers are all bin-aligned.
struct TraceConfig {
  double sample_rate = 1.024e9;
  std::size_t segment_length = 4096;
  std::size_t segment_count = 2000;
  std::uint64_t rng_seed = 1;
  Quadrature quadrature = Quadrature::phase;

  // Throws std::invalid_argument on rate <= 0, segment_length < 64 or not a
  // power of two, or segment_count == 0.
  void validate() const;

  double nyquist() const { return 0.5 * sample_rate; }
  double bin_spacing() const { return sample_rate / static_cast<double>(segment_length); }
  std::size_t bin_count() const { return segment_length / 2 + 1; }
  std::size_t sample_count() const { return segment_length * segment_count; }
  // One-sided DFT bin centres k * fs / N, k = 0..N/2.
  std::vector<double> bin_frequencies() const;
};

// Uniformly sampled quadrature record in QNL-normalised units.
struct Trace {
  std::vector<double> samples;
  double sample_rate = 0.0;
  Quadrature quadrature = Quadrature::phase;
};

// Segment-averaged periodogram on the one-sided bin grid.
//
// Normalisation: power[k] = <|Y_k|^2> / N with Y the unnormalised DFT of a
// segment, so white noise of variance V reads V in every bin. A sinusoid of
// amplitude a on bin k reads a^2 N / 4 there. In magnitude mode the bins
// hold <|Y_k| / sqrt(N)>^2, which for Gaussian noise is pi/4 of the power
// estimate (2/pi at DC and Nyquist).
struct SpectrumEstimate {
  std::vector<double> frequencies;
  std::vector<double> power;
  AveragingMode mode = AveragingMode::power;
  std::size_t segments_averaged = 0;
  bool low_segment_count = false;  // fewer than 2 segments averaged

  double bin_spacing() const {
    return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0;
  }
};

}  // namespace sqzcomb
