#pragma once

// End-to-end FDM link over the squeezing comb.

#include "sqzcomb/capacity.hpp"
#include "sqzcomb/opo_spectrum.hpp"
#include "sqzcomb/trace.hpp"
#include "sqzcomb/trace_synth.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sqzcomb {

struct Subband {
  double center = 0.0;  // Hz
  double width = 0.0;   // Hz
};

// Carrier placement relative to the comb. No offsets means comb-aligned; a
// single offset applies to every channel, otherwise one offset per channel.
struct Alignment {
  std::vector<double> offsets_hz;

  static Alignment comb_aligned() { return {}; }
  static Alignment offset(std::vector<double> offsets) { return {std::move(offsets)}; }
  bool is_comb_aligned() const { return offsets_hz.empty(); }
  double offset_for(std::size_t channel) const;
};

struct ChannelPlan {
  std::vector<Subband> subbands;
  double guard_band = 0.0;  // Hz, on each side of every sub-band
  Alignment alignment;

  // Sub-bands inflated by the guard band must lie in (0, nyquist) and must
  // not overlap. Throws std::invalid_argument.
  void validate(double nyquist) const;
  std::vector<double> carriers() const;
  // Integrated signal bandwidth B_s.
  double signal_bandwidth() const;
};

// Carriers at n * FSR + offset_n, n = 1..n_channels. Besides
// ChannelPlan::validate, each guarded sub-band has to stay inside its own
// comb slot ((n - 1/2) FSR, (n + 1/2) FSR).
ChannelPlan design_plan(const OpoParams& params, std::size_t n_channels, double guard_band,
                        const Alignment& alignment, double subband_width, double nyquist);

// Budget whose signal comb is the plan's sub-band set.
FluxBudget flux_budget(const ChannelPlan& plan, double photon_flux, double analogue_bandwidth);

struct SubbandMeasurement {
  double center = 0.0;
  double signal_power = 0.0;  // QNL units
  double noise_floor = 0.0;   // QNL units
  double snr = 0.0;
  double capacity = 0.0;      // bits/use, 1/2 log2(1 + snr)
};

// Carrier bin = bin nearest `center`. Noise floor = median of the bins with
// width/2 < |f - center| <= width/2 + guard. Signal power is the carrier
// bin minus the floor, clamped at 0. Throws std::invalid_argument when the
// band or its guard bins fall outside the grid.
SubbandMeasurement measure_subband(const SpectrumEstimate& spectrum, double center, double width,
                                   double guard);

struct LinkOptions {
  double detector_bandwidth = 450e6;  // Hz; must not exceed Nyquist
  // Guard bins per side used for the noise floor: the floor is local to the
  // carrier, so only the part of the guard band nearest the sub-band counts.
  std::size_t noise_bins = 8;
};

struct LinkResult {
  SpectrumEstimate calibrated;  // signal / vacuum, power mode
  std::vector<SubbandMeasurement> bands;
};

// Runs the chain
//   synthesize (V- comb) -> encode_fdm -> homodyne_detect -> averaged_psd
//   -> calibrate_qnl against a chi = 0 run -> measure_subband per channel.
// The vacuum reference is synthesized from the same seed, so the
// calibrated noise floor is the detected squeezing spectrum itself rather
// than a ratio of two independent estimates.
//
// The simulator caches the noise record and vacuum reference so repeated
// runs (amplitude calibration, crosstalk rows) only redo encode/detect/PSD.
class LinkSimulator {
 public:
  LinkSimulator(const OpoParams& params, const TraceConfig& cfg, const LinkOptions& options = {});

  LinkResult run(const ChannelPlan& plan, std::span<const double> amplitudes) const;

  const SpectrumEstimate& vacuum_reference() const { return vacuum_; }
  const TraceConfig& config() const { return cfg_; }
  const LinkOptions& options() const { return options_; }
  const OpoParams& params() const { return params_; }

 private:
  OpoParams params_;
  TraceConfig cfg_;
  LinkOptions options_;
  Trace noise_;
  SpectrumEstimate vacuum_;
};

LinkResult run_link(const OpoParams& params, const ChannelPlan& plan,
                    std::span<const double> amplitudes, const TraceConfig& cfg,
                    const LinkOptions& options = {});

// Tone amplitudes that make every channel of `plan` measure `target_snr`
// (fixed-point iteration a <- a sqrt(target/snr) on one noise record).
std::vector<double> calibrate_amplitudes(const LinkSimulator& sim, const ChannelPlan& plan,
                                         double target_snr = 1.0, double tolerance = 1e-4);

// entries[i][j]: signal power measured in sub-band j with only tone i on.
struct CrosstalkMatrix {
  std::vector<std::vector<double>> entries;
  bool diagonally_dominant(double factor = 10.0) const;
};

CrosstalkMatrix crosstalk_matrix(const LinkSimulator& sim, const ChannelPlan& plan,
                                 std::span<const double> amplitudes);
CrosstalkMatrix crosstalk_matrix(const OpoParams& params, const ChannelPlan& plan,
                                 std::span<const double> amplitudes, const TraceConfig& cfg,
                                 const LinkOptions& options = {});

// Aligned versus misaligned comparison with amplitudes calibrated on the
// misaligned plan.
struct FdmDemoResult {
  ChannelPlan aligned_plan;
  ChannelPlan misaligned_plan;
  std::vector<double> amplitudes;
  LinkResult aligned;
  LinkResult misaligned;
};

struct FdmDemoOptions {
  std::size_t channels = 2;
  // Offsets of the misaligned carriers; channels beyond the list reuse the
  // last entry. Defaults reproduce 192 / 392 MHz on a 199 MHz comb.
  std::vector<double> misalignment_hz{-7e6, -6e6};
  double guard_fraction = 0.25;  // guard band as a fraction of the FSR
  std::size_t subband_bins = 4;
  double target_snr = 1.0;
};

FdmDemoResult fdm_demo(const OpoParams& params, const TraceConfig& cfg,
                       const LinkOptions& link_options = {}, const FdmDemoOptions& demo = {});

}  // namespace sqzcomb
