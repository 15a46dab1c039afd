#pragma once

// Photon-flux-constrained capacity of a homodyne-detected squeezed channel.
//
// Units: variances are QNL-normalised; photon flux is photons per second and
// bandwidths are in Hz, so every capacity depends only on Phi/B_s and B/B_s.
// Capacities are bits per channel use at the bandwidth limit; multiply by
// B_s for a bit rate.
//
// All functions throw std::invalid_argument on domain violations.

namespace sqzcomb {

// 1/2 log2(1 + v_signal / v_noise).
double shannon_capacity(double v_signal, double v_noise);

// Mean photon number per unit bandwidth per second, (V+ + V- - 2) / 4.
double mean_photon_number(double v_plus, double v_minus);

// Phase-quadrature encoding on a minimum-uncertainty squeezed floor.
class NoiseModel {
 public:
  // v_minus_tilde in (0, 1], v_signal_tilde >= 0.
  NoiseModel(double v_minus_tilde, double v_signal_tilde);

  double v_minus_tilde() const { return v_minus_; }
  double v_signal_tilde() const { return v_signal_; }
  double encoded_noise() const { return v_minus_ + v_signal_; }
  double unencoded_noise() const { return 1.0 / v_minus_; }

 private:
  double v_minus_;
  double v_signal_;
};

struct FluxBudget {
  double photon_flux = 0.0;         // Phi
  double analogue_bandwidth = 0.0;  // B
  double signal_bandwidth = 0.0;    // B_s, the integrated width of the signal comb

  // Phi >= 0 and 0 < B_s <= B.
  void validate() const;
};

// Flux for squeezing that is white over the analogue bandwidth B.
double flux_white(const FluxBudget& budget, const NoiseModel& noise);
// Flux when the squeezing is confined to the signal comb.
double flux_comb(const FluxBudget& budget, const NoiseModel& noise);

double c_white(double photon_flux, double analogue_bandwidth, double signal_bandwidth);
double c_comb(double photon_flux, double signal_bandwidth);
double c_coherent(double photon_flux, double signal_bandwidth);

struct SqueezingOptimum {
  double v_opt;    // B_s / (B_s + 2 Phi)
  double snr_opt;  // 4 (Phi^2 + Phi B_s) / B_s^2
};

SqueezingOptimum optimal_squeezing(double photon_flux, double signal_bandwidth);

struct NumericOptimum {
  double v_best;
  double snr_best;
  double c_best;
};

// Maximises 1/2 log2(1 + V_s/V-) over V- in (0, 1] with V_s fixed by the comb
// flux constraint, V_s = 4 Phi/B_s - (V- - 1)^2 / V-. A 4096-point grid
// locates the best bracket, golden-section search refines it. Requires
// Phi > 0.
NumericOptimum optimize_comb_numeric(double photon_flux, double signal_bandwidth);

struct CapacityReport {
  double c_comb;
  double c_white;
  double c_coherent;
  double v_opt;
  double snr_opt;
  double bit_rate_comb;  // c_comb * B_s, bits/s
};

CapacityReport capacity_report(double photon_flux, double analogue_bandwidth,
                               double signal_bandwidth);

}  // namespace sqzcomb
