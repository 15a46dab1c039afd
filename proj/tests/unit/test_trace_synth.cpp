#include "sqzcomb/trace_synth.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace sqzcomb;
using namespace sqzcomb::test;

namespace {

QuadratureSpectrum flat(const TraceConfig& cfg, double v) {
  QuadratureSpectrum s;
  s.frequencies = cfg.bin_frequencies();
  s.v_plus.assign(s.frequencies.size(), v);
  s.v_minus.assign(s.frequencies.size(), v);
  return s;
}

double sample_variance(const std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size() - 1);
}

Trace zeros(std::size_t n, double fs) {
  Trace t;
  t.samples.assign(n, 0.0);
  t.sample_rate = fs;
  return t;
}

std::size_t bin_of(double f, const TraceConfig& cfg) {
  return static_cast<std::size_t>(std::llround(f / cfg.bin_spacing()));
}

}  // namespace

TEST_CASE("trace config validation") {
  TraceConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.bin_spacing() == 250e3);
  CHECK(c.bin_count() == 2049);
  c.segment_length = 4000;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.segment_length = 32;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.segment_count = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.sample_rate = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("synthesis variance follows the target level") {
  TraceConfig cfg;
  cfg.sample_rate = 1e9;
  SUBCASE("QNL") {
    const auto t = synthesize_trace(flat(cfg, 1.0), cfg);
    CHECK(t.samples.size() == 4096u * 2000u);
    CHECK(std::abs(sample_variance(t.samples) - 1.0) < 0.05);
  }
  SUBCASE("quarter QNL") {
    const auto t = synthesize_trace(flat(cfg, 0.25), cfg);
    CHECK(std::abs(sample_variance(t.samples) - 0.25) < 0.0125);
  }
}

TEST_CASE("synthesis preconditions") {
  TraceConfig cfg;
  cfg.segment_count = 2;
  auto short_grid = flat(cfg, 1.0);
  short_grid.frequencies.pop_back();
  short_grid.v_plus.pop_back();
  short_grid.v_minus.pop_back();
  CHECK_THROWS_AS(synthesize_trace(short_grid, cfg), std::invalid_argument);
  cfg.segment_length = 1000;
  CHECK_THROWS_AS(synthesize_trace(test::profile_params(), cfg), std::invalid_argument);
}

TEST_CASE("invariant: per-segment Parseval") {
  TraceConfig cfg;
  cfg.segment_count = 1;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.rng_seed = seed;
    const auto t = synthesize_trace(test::profile_params(), cfg);
    const auto p = averaged_psd(t, cfg.segment_length);
    double time_energy = 0.0;
    for (double x : t.samples) time_energy += x * x;
    double spec_energy = p.power.front() + p.power.back();
    for (std::size_t k = 1; k + 1 < p.power.size(); ++k) spec_energy += 2.0 * p.power[k];
    CHECK(rel_err(spec_energy, time_energy) < 1e-9);
    CHECK(p.low_segment_count);
  }
}

TEST_CASE("invariant: same seed gives the same trace, other seeds differ") {
  TraceConfig cfg;
  cfg.segment_count = 40;
  const auto a = synthesize_trace(test::profile_params(), cfg);
  const auto b = synthesize_trace(test::profile_params(), cfg);
  CHECK(a.samples == b.samples);
  cfg.rng_seed = 2;
  const auto c = synthesize_trace(test::profile_params(), cfg);
  CHECK(a.samples != c.samples);
}

TEST_CASE("Monte Carlo PSD converges to the comb") {
  TraceConfig cfg;
  const auto p = test::profile_params();
  const auto target = comb_spectrum(p, cfg.bin_frequencies());

  const auto full = averaged_psd(synthesize_trace(p, cfg), cfg.segment_length);
  const double rms_full = rms_rel(full.power, target.v_minus);
  CHECK(rms_full < 0.03);
  CHECK(full.segments_averaged == 2000);

  cfg.segment_count = 500;
  const auto quarter = averaged_psd(synthesize_trace(p, cfg), cfg.segment_length);
  const double ratio = rms_rel(quarter.power, target.v_minus) / rms_full;
  // 1/sqrt(segments): expect 2, accept within a factor 2.
  CHECK(ratio > 1.0);
  CHECK(ratio < 4.0);
}

TEST_CASE("target on a foreign grid is interpolated") {
  TraceConfig cfg;
  cfg.segment_count = 400;
  const auto p = test::profile_params();
  std::vector<double> grid;
  for (double f = 0.0; f <= 520e6; f += 0.05e6) grid.push_back(f);
  const auto fine = averaged_psd(synthesize_trace(comb_spectrum(p, grid), cfg), cfg.segment_length);
  const auto exact = averaged_psd(synthesize_trace(p, cfg), cfg.segment_length);
  CHECK(rms_rel(fine.power, exact.power) < 1e-3);
}

TEST_CASE("amplitude quadrature draws the V+ spectrum") {
  TraceConfig cfg;
  cfg.segment_count = 1000;
  cfg.quadrature = Quadrature::amplitude;
  const auto p = test::profile_params();
  const auto target = comb_spectrum(p, cfg.bin_frequencies());
  const auto est = averaged_psd(synthesize_trace(p, cfg), cfg.segment_length);
  CHECK(rms_rel(est.power, target.v_plus) < 0.05);
}

TEST_CASE("FDM encoding") {
  TraceConfig cfg;
  cfg.segment_count = 4;
  const double fs = cfg.sample_rate;

  SUBCASE("no tones is the identity") {
    const auto t = synthesize_trace(test::profile_params(), cfg);
    CHECK(encode_fdm(t, {}).samples == t.samples);
  }
  SUBCASE("one tone on a zero trace is a pure sinusoid") {
    const Tone tone{199e6, 0.3, 0.0};
    const auto t = encode_fdm(zeros(cfg.sample_count(), fs), std::span(&tone, 1));
    for (std::size_t n = 0; n < 64; ++n) {
      CHECK(t.samples[n] == doctest::Approx(0.3 * std::sin(two_pi * 199e6 * n / fs)).epsilon(1e-12));
    }
    const auto psd = averaged_psd(t, cfg.segment_length);
    const std::size_t k = bin_of(199e6, cfg);
    const double total = std::accumulate(psd.power.begin(), psd.power.end(), 0.0);
    CHECK(psd.power[k] / total > 1.0 - 1e-12);
    // bin-aligned tone reads a^2 N / 4
    CHECK(rel_err(psd.power[k], 0.09 * 4096 / 4.0) < 1e-12);
  }
  SUBCASE("tones at 199 and 398 MHz land on their bins") {
    const std::vector<Tone> tones{{199e6, 0.2, 0.0}, {398e6, 0.2, 1.0}};
    const auto psd = averaged_psd(encode_fdm(zeros(cfg.sample_count(), fs), tones), cfg.segment_length);
    std::vector<std::size_t> order(psd.power.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + 2, order.end(),
                      [&](auto a, auto b) { return psd.power[a] > psd.power[b]; });
    CHECK(std::min(order[0], order[1]) == bin_of(199e6, cfg));
    CHECK(std::max(order[0], order[1]) == bin_of(398e6, cfg));
  }
  SUBCASE("amplitude quadrature is untouched") {
    TraceConfig amp = cfg;
    amp.quadrature = Quadrature::amplitude;
    const auto t = synthesize_trace(test::profile_params(), amp);
    const Tone tone{199e6, 5.0, 0.0};
    CHECK(encode_fdm(t, std::span(&tone, 1)).samples == t.samples);
  }
  SUBCASE("carrier at Nyquist is rejected") {
    const Tone tone{0.5 * fs, 1.0, 0.0};
    CHECK_THROWS_AS(encode_fdm(zeros(64, fs), std::span(&tone, 1)), std::invalid_argument);
  }
}

TEST_CASE("homodyne detector response") {
  TraceConfig cfg;
  cfg.segment_count = 8;
  const double fs = cfg.sample_rate;
  const double bw = 200e6;

  auto tone_gain_db = [&](double f) {
    const Tone tone{f, 1.0, 0.0};
    const auto in = encode_fdm(zeros(cfg.sample_count(), fs), std::span(&tone, 1));
    const auto out = homodyne_detect(in, bw);
    const auto pin = averaged_psd(in, cfg.segment_length);
    const auto pout = averaged_psd(out, cfg.segment_length);
    const std::size_t k = bin_of(f, cfg);
    return 10.0 * std::log10(pout.power[k] / pin.power[k]);
  };

  CHECK(std::abs(tone_gain_db(0.5 * bw)) < 0.1);
  CHECK(tone_gain_db(2.0 * bw) <= -40.0);

  const LowPassFir fir(fs, bw);
  CHECK(20.0 * std::log10(fir.response(bw)) == doctest::Approx(-3.0103).epsilon(1e-3));
  CHECK(fir.response(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fir.taps().size() % 2 == 1);

  Trace dc = zeros(cfg.sample_count(), fs);
  std::fill(dc.samples.begin(), dc.samples.end(), 0.7);
  const auto out = homodyne_detect(dc, bw);
  for (double x : out.samples) CHECK(x == doctest::Approx(0.7).epsilon(1e-12));

  CHECK_THROWS_AS(homodyne_detect(dc, 0.6 * fs), std::invalid_argument);
  CHECK(homodyne_detect(dc, 0.5 * fs).samples == dc.samples);
}

TEST_CASE("averaging modes on white noise") {
  TraceConfig cfg;
  cfg.sample_rate = 1e9;
  const auto t = synthesize_trace(flat(cfg, 1.0), cfg);
  const auto power = averaged_psd(t, cfg.segment_length, AveragingMode::power);
  const auto mag = averaged_psd(t, cfg.segment_length, AveragingMode::magnitude);
  const std::vector<double> ones(power.power.size(), 1.0);
  CHECK(rms_rel(power.power, ones) < 0.03);

  // Interior bins: E|z| for complex Gaussian gives pi/4.
  const std::vector<double> interior(mag.power.begin() + 1, mag.power.end() - 1);
  const std::vector<double> quarter_pi(interior.size(), std::numbers::pi / 4.0);
  CHECK(rms_rel(interior, quarter_pi) < 0.03);

  const auto corrected = rayleigh_corrected(mag);
  CHECK(rms_rel(corrected.power, power.power) < 0.02);
  CHECK_THROWS_AS(rayleigh_corrected(power), std::invalid_argument);
  CHECK_THROWS_AS(averaged_psd(t, 3000), std::invalid_argument);
}

TEST_CASE("QNL calibration") {
  TraceConfig cfg;
  cfg.segment_count = 500;
  const auto p = test::profile_params();
  const auto sig = averaged_psd(synthesize_trace(p, cfg), cfg.segment_length);
  const auto vac = averaged_psd(synthesize_trace(p.with_nonlinear_rate(0.0), cfg), cfg.segment_length);

  const auto self = calibrate_qnl(vac, vac);
  for (double v : self.power) CHECK(v == 1.0);

  const auto cal = calibrate_qnl(sig, vac);
  for (double f : resonance_frequencies(p, cfg.nyquist())) {
    CHECK(cal.power[bin_of(f, cfg)] < 1.0);
  }

  TraceConfig other = cfg;
  other.segment_length = 2048;
  other.segment_count = 1000;
  const auto mismatch = averaged_psd(synthesize_trace(p, other), other.segment_length);
  CHECK_THROWS_AS(calibrate_qnl(mismatch, vac), std::invalid_argument);
  const auto mag = averaged_psd(synthesize_trace(p, cfg), cfg.segment_length, AveragingMode::magnitude);
  CHECK_THROWS_AS(calibrate_qnl(mag, vac), std::invalid_argument);
}
