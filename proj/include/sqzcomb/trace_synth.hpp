#pragma once

// Time-domain Monte Carlo: synthesize quadrature noise with a target
// spectrum, phase-encode FDM tones, pass the record through a band-limited
// homodyne detector, and estimate spectra by segment-averaged DFTs.

#include "sqzcomb/opo_spectrum.hpp"
#include "sqzcomb/trace.hpp"

#include <span>
#include <vector>

namespace sqzcomb {

// Per segment: complex Gaussian spectral coefficients with Hermitian
// symmetry, bin k scaled by sqrt(V(f_k)) for cfg.quadrature, inverse DFT.
// V == 1 gives unit sample variance. Segment s uses its own RNG substream
// keyed by (cfg.rng_seed, s); the output does not depend on thread count.
//
// `target` must cover [0, Nyquist]. If its grid is exactly the bin grid
// the values are used directly, otherwise they are linearly interpolated.
Trace synthesize_trace(const QuadratureSpectrum& target, const TraceConfig& cfg);

// Evaluates the OPO spectrum analytically on the bin grid and synthesizes.
Trace synthesize_trace(const OpoParams& params, const TraceConfig& cfg);

struct Tone {
  double carrier_hz = 0.0;
  double amplitude = 0.0;  // QNL^(1/2)
  double phase = 0.0;      // rad
};

// samples[n] += sum_i a_i sin(2 pi f_i n / fs + phi_i) on a phase-quadrature
// trace. An amplitude-quadrature trace is returned unchanged. Throws
// std::invalid_argument for a carrier at or above Nyquist.
Trace encode_fdm(Trace trace, std::span<const Tone> tones);

// Linear-phase Kaiser-windowed low-pass standing in for the detector's
// analogue bandwidth. The cutoff is tuned so the response is -3 dB at the
// requested bandwidth; unity DC gain.
class LowPassFir {
 public:
  LowPassFir(double sample_rate, double bandwidth);

  const std::vector<double>& taps() const { return taps_; }
  double sample_rate() const { return sample_rate_; }
  double bandwidth() const { return bandwidth_; }
  // Zero-phase amplitude response at f (Hz).
  double response(double f_hz) const;

 private:
  double sample_rate_;
  double bandwidth_;
  std::vector<double> taps_;
};

// Throws std::invalid_argument when bandwidth exceeds Nyquist. A bandwidth
// within 0.1% of Nyquist is treated as transparent.
Trace homodyne_detect(const Trace& trace, double analogue_bandwidth);

// Rectangular window, no overlap. The trace length must be a multiple of
// segment_length. See SpectrumEstimate for the normalisation.
SpectrumEstimate averaged_psd(const Trace& trace, std::size_t segment_length,
                              AveragingMode mode = AveragingMode::power);

// Scales a magnitude-mode estimate by 4/pi (2/pi-corrected at DC and
// Nyquist) so it is comparable with a power-mode estimate.
SpectrumEstimate rayleigh_corrected(const SpectrumEstimate& magnitude_estimate);

// Per-bin ratio signal / vacuum_reference. Grids and averaging modes must
// match; a non-positive reference bin is an error.
SpectrumEstimate calibrate_qnl(const SpectrumEstimate& signal,
                               const SpectrumEstimate& vacuum_reference);

}  // namespace sqzcomb
