#include "kernels_common.hpp"
#include "sqzcomb/kernels.hpp"

#include <vector>

namespace sqzcomb::kernels::parallel {

void evaluate_comb(const OpoParams& params, std::span<const double> frequencies_hz,
                   std::span<double> v_plus, std::span<double> v_minus, DelayTerm delay) {
  const auto n = static_cast<std::ptrdiff_t>(frequencies_hz.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    detail::comb_bin(params, frequencies_hz[i], v_plus[i], v_minus[i], delay);
  }
}

void synthesize_segments(std::span<const double> bin_variance, std::size_t segment_length,
                         std::uint64_t seed, std::span<double> out) {
  const sqzcomb::detail::RealFft fft(segment_length);
  const auto segments = static_cast<std::ptrdiff_t>(out.size() / segment_length);
#pragma omp parallel
  {
    auto ws = fft.make_workspace();
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < segments; ++s) {
      const auto seg = static_cast<std::size_t>(s);
      detail::synthesize_segment(fft, ws, bin_variance, seed, seg,
                                 out.subspan(seg * segment_length, segment_length));
    }
  }
}

void fir_filter(std::span<const double> taps, std::span<const double> in, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = detail::fir_output(taps, in, static_cast<std::size_t>(i));
  }
}

void accumulate_psd(std::span<const double> samples, std::size_t segment_length,
                    AveragingMode mode, std::span<double> acc) {
  const sqzcomb::detail::RealFft fft(segment_length);
  const std::size_t segments = samples.size() / segment_length;
  const std::size_t bins = segment_length / 2 + 1;
  const std::size_t blocks = (segments + psd_block_segments - 1) / psd_block_segments;
  std::vector<double> partial(blocks * bins, 0.0);

#pragma omp parallel
  {
    auto ws = fft.make_workspace();
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
      const auto block = static_cast<std::size_t>(b);
      std::span<double> out(partial.data() + block * bins, bins);
      const std::size_t first = block * psd_block_segments;
      const std::size_t last = std::min(segments, first + psd_block_segments);
      for (std::size_t s = first; s < last; ++s) {
        detail::segment_periodogram(fft, ws, samples.subspan(s * segment_length, segment_length),
                                    mode, out);
      }
    }
  }

  for (std::size_t block = 0; block < blocks; ++block) {
    const double* p = partial.data() + block * bins;
    for (std::size_t k = 0; k < bins; ++k) acc[k] += p[k];
  }
}

}  // namespace sqzcomb::kernels::parallel
