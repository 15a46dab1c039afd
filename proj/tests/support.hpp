#pragma once

#include "sqzcomb/opo_spectrum.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace sqzcomb::test {

inline constexpr double eps = 2.220446049250313e-16;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// sqrt(mean((a/b - 1)^2))
inline double rms_rel(std::span<const double> got, std::span<const double> want) {
  double s = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double r = got[i] / want[i] - 1.0;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(got.size()));
}

// Interior strict local minima of v below `below_hz`.
inline std::vector<double> local_minima(std::span<const double> f, std::span<const double> v,
                                        double below_hz) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (f[i] < below_hz && v[i] < v[i - 1] && v[i] < v[i + 1]) out.push_back(f[i]);
  }
  return out;
}

// Parameters of the shipped profile: FSR 199 MHz, T = 0.02, (chi, L) fitted
// to 3.9 / 2.6 dB. Frozen from tests/oracles/opo_oracle.py.
inline constexpr double profile_pump_ratio = 0.8168853822302205842;
inline constexpr double profile_loss = 0.06510463722675204083;

inline OpoParams profile_params() {
  return OpoParams::from_fsr(199e6, 0.02, profile_loss, profile_pump_ratio);
}

}  // namespace sqzcomb::test
