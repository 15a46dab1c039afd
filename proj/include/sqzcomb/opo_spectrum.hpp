#pragma once

// Sub-threshold OPO output spectra: the squeezing comb.
//
// The cavity is described by its round-trip time tau, the input-coupler
// transmission T, the intracavity loss L and the nonlinear conversion rate
// chi. Decay rates are kappa_in = T/tau, kappa_l = L/tau, kappa = kappa_in +
// kappa_l. The output quadrature fluctuations obey
//
//   dX_out^(-/+) = [ (2 kappa_in - kappa -/+ chi + g) dX_in
//                    + 2 sqrt(kappa_in kappa_l) dX_l ] / (kappa +/- chi - g)
//
// where g is the round-trip delay term. Upper signs give the phase
// (squeezed) quadrature, lower signs the amplitude quadrature. Variances are
// normalised to the quantum noise limit: vacuum in both ports gives
// V = |input_coeff|^2 + |loss_coeff|^2.
//
// Frequencies at this boundary: functions taking `omega` expect rad/s;
// spectra and grids are in Hz (omega = 2 pi f).

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqzcomb {

enum class Quadrature : std::uint8_t { amplitude = 0, phase = 1 };

const char* to_string(Quadrature q);

// Form of the round-trip delay term g(omega).
//
// literal:   g = (1 - e^{i omega tau}) / tau, exactly as usually written. Its
//            real part breaks minimum uncertainty away from resonance.
// symmetric: g = -2i sin(omega tau / 2) / tau, the purely imaginary term with
//            the same modulus. Identical at every resonance and to first order
//            around it; lossless cavities stay minimum-uncertainty for all
//            omega and passive lossy cavities output exact vacuum.
enum class DelayTerm { symmetric, literal };

class OpoParams {
 public:
  // Throws std::invalid_argument unless tau > 0, 0 < T < 1, 0 <= L < 1 and
  // 0 <= chi < kappa.
  OpoParams(double round_trip_time, double input_transmission,
            double intracavity_loss, double nonlinear_rate);

  // Convenience constructor using FSR = 1/tau and chi given as chi/kappa.
  static OpoParams from_fsr(double fsr_hz, double input_transmission,
                            double intracavity_loss, double pump_ratio);

  double round_trip_time() const { return tau_; }
  double input_transmission() const { return transmission_; }
  double intracavity_loss() const { return loss_; }
  double nonlinear_rate() const { return chi_; }

  double kappa_in() const { return transmission_ / tau_; }
  double kappa_loss() const { return loss_ / tau_; }
  double kappa() const { return kappa_in() + kappa_loss(); }
  double fsr() const { return 1.0 / tau_; }
  double pump_ratio() const { return chi_ / kappa(); }

  // Same cavity, different pump. Used for the chi = 0 vacuum reference.
  OpoParams with_nonlinear_rate(double chi) const;

 private:
  double tau_;
  double transmission_;
  double loss_;
  double chi_;
};

struct TransferCoefficients {
  Quadrature quadrature;
  std::complex<double> input_coeff;
  std::complex<double> loss_coeff;
};

TransferCoefficients transfer_coefficients(const OpoParams& params, double omega,
                                           Quadrature quadrature,
                                           DelayTerm delay = DelayTerm::symmetric);

struct QuadratureVariances {
  double v_plus;
  double v_minus;
};

QuadratureVariances quadrature_variances(const OpoParams& params, double omega,
                                         DelayTerm delay = DelayTerm::symmetric);

struct QuadratureSpectrum {
  std::vector<double> frequencies;  // Hz, ascending
  std::vector<double> v_plus;
  std::vector<double> v_minus;

  const std::vector<double>& variance(Quadrature q) const {
    return q == Quadrature::amplitude ? v_plus : v_minus;
  }
  std::size_t size() const { return frequencies.size(); }
};

// Per-bin evaluation on an ascending, non-negative grid (Hz). Throws
// std::invalid_argument on an empty or malformed grid.
QuadratureSpectrum comb_spectrum(const OpoParams& params, std::span<const double> grid_hz,
                                 DelayTerm delay = DelayTerm::symmetric);

// n/tau for n >= 1 up to and including `band_hz`.
std::vector<double> resonance_frequencies(const OpoParams& params, double band_hz);

// Classical gains of a seed reflected off the cavity at omega = 0 (linear
// power ratios). amplification is the amplitude-quadrature gain,
// deamplification the phase-quadrature gain.
struct ParametricGains {
  double amplification;
  double deamplification;
};

ParametricGains parametric_gains(const OpoParams& params);

double to_db(double power_ratio);
double from_db(double db);

class GainFitError : public std::runtime_error {
 public:
  GainFitError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// No (chi, L) with chi < kappa and L in [0, 0.5] reproduces the gains.
class InfeasibleFitError : public GainFitError {
 public:
  using GainFitError::GainFitError;
};

struct GainFitOptions {
  double max_loss = 0.5;
  int max_iterations = 200;
  double tolerance = 1e-13;  // on the relative gain residuals
  // A start that stalls above tolerance still counts as a root below this.
  // Close to r = chi/kappa the residual floor from cancellation is ~1e-13.
  double accept_residual = 1e-10;
};

// Solves for (chi, L) such that parametric_gains() reproduces
// amp_gain_db and -deamp_gain_db, given T and tau. A 2.6 dB
// de-amplification is passed as 2.6. Strongly lossy cavities attenuate in
// both quadratures, so either value may have either sign.
//
// Damped Newton iteration on the relative gain residuals, box-constrained to
// chi/kappa in [0, 1) and L in [0, max_loss]. The first start is
// (chi/kappa, L) = (0.5, 0.01), followed by a fixed grid and the closed-form
// preimage of each sign branch. Every start is iterated and, when several
// roots converge, the one with the smallest loss is returned.
OpoParams fit_gains(double amp_gain_db, double deamp_gain_db, double input_transmission,
                    double round_trip_time, const GainFitOptions& options = {});

}  // namespace sqzcomb
