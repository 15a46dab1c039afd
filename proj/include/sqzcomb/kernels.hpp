#pragma once

// Data-parallel inner loops.
//
// Every kernel exists twice: `serial` is the straightforward reference kept
// for testing, `parallel` is the OpenMP version used by the library. The
// comb, synthesis and FIR kernels are element-independent and the two
// versions agree bit for bit. The periodogram accumulation sums fixed
// blocks of segments in a fixed order, so its result does not depend on the
// thread count, but it may differ from the serial running sum in the last
// few ulps.

#include "sqzcomb/opo_spectrum.hpp"
#include "sqzcomb/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace sqzcomb::kernels {

// Segments per partial sum in parallel::accumulate_psd.
inline constexpr std::size_t psd_block_segments = 16;

namespace serial {

void evaluate_comb(const OpoParams& params, std::span<const double> frequencies_hz,
                   std::span<double> v_plus, std::span<double> v_minus, DelayTerm delay);

// Fills `out` (segment_length * segment_count samples) with Gaussian noise
// whose per-bin variance is `bin_variance` (segment_length/2 + 1 entries).
// Segment s draws from its own generator keyed by (seed, s).
void synthesize_segments(std::span<const double> bin_variance, std::size_t segment_length,
                         std::uint64_t seed, std::span<double> out);

// Symmetric FIR with the group delay removed; edges are clamped.
void fir_filter(std::span<const double> taps, std::span<const double> in, std::span<double> out);

// Adds per-segment |Y_k|^2/N (power) or |Y_k|/sqrt(N) (magnitude) into acc.
void accumulate_psd(std::span<const double> samples, std::size_t segment_length,
                    AveragingMode mode, std::span<double> acc);

}  // namespace serial

namespace parallel {

void evaluate_comb(const OpoParams& params, std::span<const double> frequencies_hz,
                   std::span<double> v_plus, std::span<double> v_minus, DelayTerm delay);

void synthesize_segments(std::span<const double> bin_variance, std::size_t segment_length,
                         std::uint64_t seed, std::span<double> out);

void fir_filter(std::span<const double> taps, std::span<const double> in, std::span<double> out);

void accumulate_psd(std::span<const double> samples, std::size_t segment_length,
                    AveragingMode mode, std::span<double> acc);

}  // namespace parallel

}  // namespace sqzcomb::kernels
