#include "sqzcomb/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sqzcomb {

namespace {

void require_flux(double flux, const char* where) {
  if (!(flux >= 0.0) || !std::isfinite(flux)) {
    throw std::invalid_argument(std::string(where) + ": photon flux must be finite and >= 0");
  }
}

void require_signal_bandwidth(double bs, const char* where) {
  if (!(bs > 0.0) || !std::isfinite(bs)) {
    throw std::invalid_argument(std::string(where) + ": signal bandwidth must be > 0");
  }
}

// Signal level left over after the squeezing cost, for the comb budget.
double implied_signal(double v_minus, double flux_ratio) {
  return 4.0 * flux_ratio - (v_minus - 1.0) * (v_minus - 1.0) / v_minus;
}

double comb_capacity_at(double v_minus, double flux_ratio) {
  const double vs = implied_signal(v_minus, flux_ratio);
  if (vs < 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * std::log2(1.0 + vs / v_minus);
}

}  // namespace

double shannon_capacity(double v_signal, double v_noise) {
  if (!(v_noise > 0.0)) throw std::invalid_argument("shannon_capacity: noise variance must be > 0");
  if (!(v_signal >= 0.0)) throw std::invalid_argument("shannon_capacity: signal variance must be >= 0");
  return 0.5 * std::log2(1.0 + v_signal / v_noise);
}

double mean_photon_number(double v_plus, double v_minus) {
  if (!(v_plus > 0.0) || !(v_minus > 0.0)) {
    throw std::invalid_argument("mean_photon_number: variances must be > 0");
  }
  return 0.25 * (v_plus + v_minus - 2.0);
}

NoiseModel::NoiseModel(double v_minus_tilde, double v_signal_tilde)
    : v_minus_(v_minus_tilde), v_signal_(v_signal_tilde) {
  if (!(v_minus_ > 0.0 && v_minus_ <= 1.0)) {
    throw std::invalid_argument("NoiseModel: squeezed variance must be in (0, 1]");
  }
  if (!(v_signal_ >= 0.0)) throw std::invalid_argument("NoiseModel: signal variance must be >= 0");
}

void FluxBudget::validate() const {
  require_flux(photon_flux, "FluxBudget");
  require_signal_bandwidth(signal_bandwidth, "FluxBudget");
  if (!(signal_bandwidth <= analogue_bandwidth)) {
    throw std::invalid_argument("FluxBudget: signal bandwidth must not exceed analogue bandwidth");
  }
}

double flux_white(const FluxBudget& budget, const NoiseModel& noise) {
  budget.validate();
  const double v = noise.v_minus_tilde();
  return 0.25 * (budget.signal_bandwidth * noise.v_signal_tilde() +
                 budget.analogue_bandwidth * (v - 1.0) * (v - 1.0) / v);
}

double flux_comb(const FluxBudget& budget, const NoiseModel& noise) {
  budget.validate();
  const double v = noise.v_minus_tilde();
  return 0.25 * (noise.v_signal_tilde() + (v - 1.0) * (v - 1.0) / v) * budget.signal_bandwidth;
}

double c_white(double photon_flux, double analogue_bandwidth, double signal_bandwidth) {
  FluxBudget{photon_flux, analogue_bandwidth, signal_bandwidth}.validate();
  const double bbs = analogue_bandwidth * signal_bandwidth;
  const double phi = photon_flux;
  return 0.5 * std::log2((bbs + 4.0 * phi * phi + 4.0 * phi * analogue_bandwidth) / bbs);
}

double c_comb(double photon_flux, double signal_bandwidth) {
  require_flux(photon_flux, "c_comb");
  require_signal_bandwidth(signal_bandwidth, "c_comb");
  return std::log2(1.0 + 2.0 * photon_flux / signal_bandwidth);
}

double c_coherent(double photon_flux, double signal_bandwidth) {
  require_flux(photon_flux, "c_coherent");
  require_signal_bandwidth(signal_bandwidth, "c_coherent");
  return std::log2(std::sqrt(1.0 + 4.0 * photon_flux / signal_bandwidth));
}

SqueezingOptimum optimal_squeezing(double photon_flux, double signal_bandwidth) {
  require_flux(photon_flux, "optimal_squeezing");
  require_signal_bandwidth(signal_bandwidth, "optimal_squeezing");
  const double phi = photon_flux;
  const double bs = signal_bandwidth;
  return {bs / (bs + 2.0 * phi), 4.0 * (phi * phi + phi * bs) / (bs * bs)};
}

NumericOptimum optimize_comb_numeric(double photon_flux, double signal_bandwidth) {
  require_signal_bandwidth(signal_bandwidth, "optimize_comb_numeric");
  if (!(photon_flux > 0.0) || !std::isfinite(photon_flux)) {
    throw std::invalid_argument("optimize_comb_numeric: photon flux must be > 0");
  }
  const double ratio = photon_flux / signal_bandwidth;

  constexpr int grid = 4096;
  int best = -1;
  double best_c = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid; ++i) {
    const double v = static_cast<double>(i) / grid;
    const double c = comb_capacity_at(v, ratio);
    if (c > best_c) {
      best_c = c;
      best = i;
    }
  }
  if (best < 0) throw std::runtime_error("optimize_comb_numeric: flux budget infeasible on the whole grid");

  // Golden-section search on the bracketing grid cells.
  double a = static_cast<double>(std::max(best - 1, 0)) / grid;
  double b = static_cast<double>(std::min(best + 1, grid)) / grid;
  a = std::max(a, std::numeric_limits<double>::min());
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = comb_capacity_at(x1, ratio);
  double f2 = comb_capacity_at(x2, ratio);
  for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = comb_capacity_at(x2, ratio);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = comb_capacity_at(x1, ratio);
    }
  }
  double v = 0.5 * (a + b);
  double c = comb_capacity_at(v, ratio);
  const double grid_v = static_cast<double>(best) / grid;
  if (best_c > c) {
    v = grid_v;
    c = best_c;
  }
  return {v, implied_signal(v, ratio) / v, c};
}

CapacityReport capacity_report(double photon_flux, double analogue_bandwidth,
                               double signal_bandwidth) {
  const auto opt = optimal_squeezing(photon_flux, signal_bandwidth);
  CapacityReport r{};
  r.c_white = c_white(photon_flux, analogue_bandwidth, signal_bandwidth);
  r.c_comb = c_comb(photon_flux, signal_bandwidth);
  r.c_coherent = c_coherent(photon_flux, signal_bandwidth);
  r.v_opt = opt.v_opt;
  r.snr_opt = opt.snr_opt;
  r.bit_rate_comb = r.c_comb * signal_bandwidth;
  return r;
}

}  // namespace sqzcomb
