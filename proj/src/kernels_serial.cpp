#include "kernels_common.hpp"
#include "sqzcomb/kernels.hpp"

namespace sqzcomb::kernels::serial {

void evaluate_comb(const OpoParams& params, std::span<const double> frequencies_hz,
                   std::span<double> v_plus, std::span<double> v_minus, DelayTerm delay) {
  for (std::size_t i = 0; i < frequencies_hz.size(); ++i) {
    detail::comb_bin(params, frequencies_hz[i], v_plus[i], v_minus[i], delay);
  }
}

void synthesize_segments(std::span<const double> bin_variance, std::size_t segment_length,
                         std::uint64_t seed, std::span<double> out) {
  const sqzcomb::detail::RealFft fft(segment_length);
  auto ws = fft.make_workspace();
  const std::size_t segments = out.size() / segment_length;
  for (std::size_t s = 0; s < segments; ++s) {
    detail::synthesize_segment(fft, ws, bin_variance, seed, s,
                               out.subspan(s * segment_length, segment_length));
  }
}

void fir_filter(std::span<const double> taps, std::span<const double> in, std::span<double> out) {
  for (std::size_t n = 0; n < in.size(); ++n) out[n] = detail::fir_output(taps, in, n);
}

void accumulate_psd(std::span<const double> samples, std::size_t segment_length,
                    AveragingMode mode, std::span<double> acc) {
  const sqzcomb::detail::RealFft fft(segment_length);
  auto ws = fft.make_workspace();
  const std::size_t segments = samples.size() / segment_length;
  for (std::size_t s = 0; s < segments; ++s) {
    detail::segment_periodogram(fft, ws, samples.subspan(s * segment_length, segment_length),
                                mode, acc);
  }
}

}  // namespace sqzcomb::kernels::serial
