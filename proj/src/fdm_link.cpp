#include "sqzcomb/fdm_link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqzcomb {

double Alignment::offset_for(std::size_t channel) const {
  if (offsets_hz.empty()) return 0.0;
  return offsets_hz[std::min(channel, offsets_hz.size() - 1)];
}

void ChannelPlan::validate(double nyquist) const {
  if (subbands.empty()) throw std::invalid_argument("ChannelPlan: no sub-bands");
  if (!(guard_band >= 0.0)) throw std::invalid_argument("ChannelPlan: guard band must be >= 0");
  double previous_hi = 0.0;
  for (std::size_t i = 0; i < subbands.size(); ++i) {
    const auto& b = subbands[i];
    if (!(b.width > 0.0)) throw std::invalid_argument("ChannelPlan: sub-band width must be > 0");
    const double lo = b.center - 0.5 * b.width - guard_band;
    const double hi = b.center + 0.5 * b.width + guard_band;
    if (!(lo > 0.0) || !(hi < nyquist)) {
      throw std::invalid_argument("ChannelPlan: sub-band " + std::to_string(i) + " at " +
                                  std::to_string(b.center) + " Hz (with guard) leaves (0, Nyquist)");
    }
    if (i > 0 && lo < previous_hi) {
      throw std::invalid_argument("ChannelPlan: sub-bands " + std::to_string(i - 1) + " and " +
                                  std::to_string(i) + " overlap after guard-band inflation");
    }
    previous_hi = hi;
  }
}

std::vector<double> ChannelPlan::carriers() const {
  std::vector<double> c;
  c.reserve(subbands.size());
  for (const auto& b : subbands) c.push_back(b.center);
  return c;
}

double ChannelPlan::signal_bandwidth() const {
  double total = 0.0;
  for (const auto& b : subbands) total += b.width;
  return total;
}

ChannelPlan design_plan(const OpoParams& params, std::size_t n_channels, double guard_band,
                        const Alignment& alignment, double subband_width, double nyquist) {
  if (n_channels < 1) throw std::invalid_argument("design_plan: need at least one channel");
  if (!(subband_width > 0.0)) throw std::invalid_argument("design_plan: sub-band width must be > 0");
  if (!(guard_band >= 0.0)) throw std::invalid_argument("design_plan: guard band must be >= 0");
  const double fsr = params.fsr();
  if (!(static_cast<double>(n_channels) * fsr < nyquist)) {
    throw std::invalid_argument("design_plan: " + std::to_string(n_channels) +
                                " comb teeth do not fit below Nyquist");
  }

  ChannelPlan plan;
  plan.guard_band = guard_band;
  plan.alignment = alignment;
  for (std::size_t i = 0; i < n_channels; ++i) {
    const double tooth = static_cast<double>(i + 1) * fsr;
    const double center = tooth + alignment.offset_for(i);
    const double reach = 0.5 * subband_width + guard_band;
    if (!(center - reach > tooth - 0.5 * fsr) || !(center + reach < tooth + 0.5 * fsr)) {
      throw std::invalid_argument("design_plan: channel " + std::to_string(i + 1) +
                                  " with its guard band does not fit in its comb slot");
    }
    plan.subbands.push_back({center, subband_width});
  }
  plan.validate(nyquist);
  return plan;
}

FluxBudget flux_budget(const ChannelPlan& plan, double photon_flux, double analogue_bandwidth) {
  FluxBudget b{photon_flux, analogue_bandwidth, plan.signal_bandwidth()};
  b.validate();
  return b;
}

SubbandMeasurement measure_subband(const SpectrumEstimate& spectrum, double center, double width,
                                   double guard) {
  const auto& f = spectrum.frequencies;
  if (f.size() < 2 || spectrum.power.size() != f.size()) {
    throw std::invalid_argument("measure_subband: spectrum grid too small");
  }
  if (!(width > 0.0) || !(guard > 0.0)) {
    throw std::invalid_argument("measure_subband: width and guard must be > 0");
  }
  const double df = f[1] - f[0];
  const double tol = 1e-9 * df;
  const double reach = 0.5 * width + guard;
  if (center - reach < f.front() - tol || center + reach > f.back() + tol) {
    throw std::invalid_argument("measure_subband: band at " + std::to_string(center) +
                                " Hz lies outside the spectrum grid");
  }

  const auto carrier = static_cast<std::size_t>(std::llround((center - f.front()) / df));
  std::vector<double> guard_bins;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double d = std::abs(f[k] - center);
    if (d > 0.5 * width + tol && d <= reach + tol) guard_bins.push_back(spectrum.power[k]);
  }
  if (guard_bins.empty()) throw std::invalid_argument("measure_subband: no guard-band bins");

  const std::size_t mid = guard_bins.size() / 2;
  std::nth_element(guard_bins.begin(), guard_bins.begin() + static_cast<std::ptrdiff_t>(mid),
                   guard_bins.end());
  double floor = guard_bins[mid];
  if (guard_bins.size() % 2 == 0) {
    const double lower = *std::max_element(guard_bins.begin(),
                                           guard_bins.begin() + static_cast<std::ptrdiff_t>(mid));
    floor = 0.5 * (floor + lower);
  }
  if (!(floor > 0.0)) throw std::invalid_argument("measure_subband: non-positive noise floor");

  SubbandMeasurement m;
  m.center = center;
  m.noise_floor = floor;
  m.signal_power = std::max(0.0, spectrum.power[carrier] - floor);
  m.snr = m.signal_power / floor;
  m.capacity = 0.5 * std::log2(1.0 + m.snr);
  return m;
}

LinkSimulator::LinkSimulator(const OpoParams& params, const TraceConfig& cfg,
                             const LinkOptions& options)
    : params_(params), cfg_(cfg), options_(options) {
  cfg_.quadrature = Quadrature::phase;
  cfg_.validate();
  if (options_.noise_bins < 1) throw std::invalid_argument("LinkOptions: noise_bins must be >= 1");
  // Rejects a detector wider than Nyquist before any synthesis.
  (void)LowPassFir(cfg_.sample_rate, options_.detector_bandwidth);

  noise_ = synthesize_trace(params_, cfg_);
  const auto vacuum = synthesize_trace(params_.with_nonlinear_rate(0.0), cfg_);
  vacuum_ = averaged_psd(homodyne_detect(vacuum, options_.detector_bandwidth), cfg_.segment_length,
                         AveragingMode::power);
}

LinkResult LinkSimulator::run(const ChannelPlan& plan, std::span<const double> amplitudes) const {
  plan.validate(cfg_.nyquist());
  if (amplitudes.size() != plan.subbands.size()) {
    throw std::invalid_argument("run_link: need one tone amplitude per sub-band");
  }
  std::vector<Tone> tones;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (amplitudes[i] != 0.0) tones.push_back({plan.subbands[i].center, amplitudes[i], 0.0});
  }
  const auto detected = homodyne_detect(encode_fdm(noise_, tones), options_.detector_bandwidth);
  LinkResult result;
  result.calibrated =
      calibrate_qnl(averaged_psd(detected, cfg_.segment_length, AveragingMode::power), vacuum_);

  const double noise_window =
      std::min(plan.guard_band, static_cast<double>(options_.noise_bins) * cfg_.bin_spacing());
  for (const auto& band : plan.subbands) {
    result.bands.push_back(measure_subband(result.calibrated, band.center, band.width, noise_window));
  }
  return result;
}

LinkResult run_link(const OpoParams& params, const ChannelPlan& plan,
                    std::span<const double> amplitudes, const TraceConfig& cfg,
                    const LinkOptions& options) {
  return LinkSimulator(params, cfg, options).run(plan, amplitudes);
}

std::vector<double> calibrate_amplitudes(const LinkSimulator& sim, const ChannelPlan& plan,
                                         double target_snr, double tolerance) {
  if (!(target_snr > 0.0)) throw std::invalid_argument("calibrate_amplitudes: target snr must be > 0");
  const auto& cfg = sim.config();
  const auto n = static_cast<double>(cfg.segment_length);

  // A bin-aligned tone of amplitude a reads a^2 N / 4; start from the
  // analytic floor at each carrier.
  std::vector<double> amps;
  for (const auto& band : plan.subbands) {
    const double v = quadrature_variances(sim.params(), 2.0 * std::numbers::pi * band.center).v_minus;
    amps.push_back(std::sqrt(4.0 * target_snr * v / n));
  }

  double worst = 0.0;
  for (int it = 0; it < 60; ++it) {
    const auto result = sim.run(plan, amps);
    worst = 0.0;
    for (const auto& band : result.bands) worst = std::max(worst, std::abs(band.snr - target_snr));
    if (worst <= tolerance) return amps;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const double snr = result.bands[i].snr;
      amps[i] *= snr > 0.0 ? std::sqrt(target_snr / snr) : 2.0;
    }
  }
  throw std::runtime_error("calibrate_amplitudes: no convergence, worst snr error " +
                           std::to_string(worst));
}

bool CrosstalkMatrix::diagonally_dominant(double factor) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < entries[i].size(); ++j) {
      if (j != i) off += entries[i][j];
    }
    if (!(entries[i][i] >= factor * off)) return false;
  }
  return true;
}

CrosstalkMatrix crosstalk_matrix(const LinkSimulator& sim, const ChannelPlan& plan,
                                 std::span<const double> amplitudes) {
  if (amplitudes.size() != plan.subbands.size()) {
    throw std::invalid_argument("crosstalk_matrix: need one tone amplitude per sub-band");
  }
  CrosstalkMatrix m;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    std::vector<double> only(amplitudes.size(), 0.0);
    only[i] = amplitudes[i];
    const auto result = sim.run(plan, only);
    std::vector<double> row;
    for (const auto& band : result.bands) row.push_back(band.signal_power);
    m.entries.push_back(std::move(row));
  }
  return m;
}

CrosstalkMatrix crosstalk_matrix(const OpoParams& params, const ChannelPlan& plan,
                                 std::span<const double> amplitudes, const TraceConfig& cfg,
                                 const LinkOptions& options) {
  return crosstalk_matrix(LinkSimulator(params, cfg, options), plan, amplitudes);
}

FdmDemoResult fdm_demo(const OpoParams& params, const TraceConfig& cfg,
                       const LinkOptions& link_options, const FdmDemoOptions& demo) {
  const double nyquist = cfg.nyquist();
  const double width = static_cast<double>(demo.subband_bins) * cfg.bin_spacing();
  const double guard = demo.guard_fraction * params.fsr();

  std::vector<double> offsets;
  for (std::size_t i = 0; i < demo.channels; ++i) {
    offsets.push_back(demo.misalignment_hz.empty()
                          ? 0.0
                          : demo.misalignment_hz[std::min(i, demo.misalignment_hz.size() - 1)]);
  }

  FdmDemoResult out;
  out.aligned_plan =
      design_plan(params, demo.channels, guard, Alignment::comb_aligned(), width, nyquist);
  out.misaligned_plan =
      design_plan(params, demo.channels, guard, Alignment::offset(offsets), width, nyquist);

  const LinkSimulator sim(params, cfg, link_options);
  out.amplitudes = calibrate_amplitudes(sim, out.misaligned_plan, demo.target_snr);
  out.misaligned = sim.run(out.misaligned_plan, out.amplitudes);
  out.aligned = sim.run(out.aligned_plan, out.amplitudes);
  return out;
}

}  // namespace sqzcomb
