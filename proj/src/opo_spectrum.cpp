#include "sqzcomb/opo_spectrum.hpp"

#include "sqzcomb/kernels.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sqzcomb {

const char* to_string(Quadrature q) {
  return q == Quadrature::amplitude ? "amplitude" : "phase";
}

OpoParams::OpoParams(double round_trip_time, double input_transmission,
                     double intracavity_loss, double nonlinear_rate)
    : tau_(round_trip_time),
      transmission_(input_transmission),
      loss_(intracavity_loss),
      chi_(nonlinear_rate) {
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) {
    throw std::invalid_argument("OpoParams: round_trip_time must be > 0");
  }
  if (!(transmission_ > 0.0 && transmission_ < 1.0)) {
    throw std::invalid_argument("OpoParams: input_transmission must be in (0, 1)");
  }
  if (!(loss_ >= 0.0 && loss_ < 1.0)) {
    throw std::invalid_argument("OpoParams: intracavity_loss must be in [0, 1)");
  }
  if (!(chi_ >= 0.0)) {
    throw std::invalid_argument("OpoParams: nonlinear_rate must be >= 0");
  }
  if (!(chi_ < kappa())) {
    throw std::invalid_argument("OpoParams: nonlinear_rate must be below threshold (chi < kappa)");
  }
}

OpoParams OpoParams::from_fsr(double fsr_hz, double input_transmission,
                              double intracavity_loss, double pump_ratio) {
  if (!(fsr_hz > 0.0)) throw std::invalid_argument("OpoParams: fsr must be > 0");
  const double tau = 1.0 / fsr_hz;
  const double kappa = (input_transmission + intracavity_loss) / tau;
  return OpoParams(tau, input_transmission, intracavity_loss, pump_ratio * kappa);
}

OpoParams OpoParams::with_nonlinear_rate(double chi) const {
  return OpoParams(tau_, transmission_, loss_, chi);
}

namespace {

std::complex<double> delay_term(double omega, double tau, DelayTerm form) {
  const double theta = omega * tau;
  const double half = std::sin(0.5 * theta);
  if (form == DelayTerm::symmetric) {
    return {0.0, -2.0 * half / tau};
  }
  // 1 - e^{i theta} = 2 sin^2(theta/2) - i sin(theta)
  return {2.0 * half * half / tau, -std::sin(theta) / tau};
}

}  // namespace

TransferCoefficients transfer_coefficients(const OpoParams& p, double omega, Quadrature q,
                                           DelayTerm delay) {
  const std::complex<double> g = delay_term(omega, p.round_trip_time(), delay);
  // Upper sign (phase quadrature): -chi in the numerator, +chi below.
  const double s = q == Quadrature::phase ? 1.0 : -1.0;
  const double chi = p.nonlinear_rate();
  const std::complex<double> num = 2.0 * p.kappa_in() - p.kappa() - s * chi + g;
  const std::complex<double> den = p.kappa() + s * chi - g;
  assert(std::abs(den) > 0.0);
  const double coupling = 2.0 * std::sqrt(p.kappa_in() * p.kappa_loss());
  return {q, num / den, coupling / den};
}

QuadratureVariances quadrature_variances(const OpoParams& params, double omega, DelayTerm delay) {
  const auto amp = transfer_coefficients(params, omega, Quadrature::amplitude, delay);
  const auto ph = transfer_coefficients(params, omega, Quadrature::phase, delay);
  return {std::norm(amp.input_coeff) + std::norm(amp.loss_coeff),
          std::norm(ph.input_coeff) + std::norm(ph.loss_coeff)};
}

QuadratureSpectrum comb_spectrum(const OpoParams& params, std::span<const double> grid_hz,
                                 DelayTerm delay) {
  if (grid_hz.empty()) throw std::invalid_argument("comb_spectrum: empty frequency grid");
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    if (!(grid_hz[i] >= 0.0) || !std::isfinite(grid_hz[i])) {
      throw std::invalid_argument("comb_spectrum: grid frequencies must be finite and >= 0");
    }
    if (i > 0 && !(grid_hz[i] > grid_hz[i - 1])) {
      throw std::invalid_argument("comb_spectrum: grid must be strictly ascending");
    }
  }
  QuadratureSpectrum out;
  out.frequencies.assign(grid_hz.begin(), grid_hz.end());
  out.v_plus.resize(grid_hz.size());
  out.v_minus.resize(grid_hz.size());
  kernels::parallel::evaluate_comb(params, grid_hz, out.v_plus, out.v_minus, delay);
  return out;
}

std::vector<double> resonance_frequencies(const OpoParams& params, double band_hz) {
  if (!(band_hz > 0.0)) throw std::invalid_argument("resonance_frequencies: band must be > 0");
  const double fsr = params.fsr();
  std::vector<double> out;
  // Inclusive upper edge, with a few ulps of slack for band = n * fsr.
  const double limit = band_hz * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
  for (std::size_t n = 1;; ++n) {
    const double f = static_cast<double>(n) * fsr;
    if (f > limit) break;
    out.push_back(f);
  }
  return out;
}

namespace {

// Gains in terms of x = chi/kappa and r = (kappa_in - kappa_l)/kappa.
struct GainModel {
  double target_amp;
  double target_deamp;
  double transmission;

  double ratio(double loss) const { return (transmission - loss) / (transmission + loss); }

  // Relative residuals and their Jacobian with respect to (x, L).
  void evaluate(double x, double loss, std::array<double, 2>& f,
                std::array<std::array<double, 2>, 2>& jac) const {
    const double r = ratio(loss);
    const double dr_dl = -2.0 * transmission / ((transmission + loss) * (transmission + loss));
    const double qa = (r + x) / (1.0 - x);
    const double qd = (r - x) / (1.0 + x);
    f[0] = qa * qa / target_amp - 1.0;
    f[1] = qd * qd / target_deamp - 1.0;
    const double dqa_dx = (1.0 + r) / ((1.0 - x) * (1.0 - x));
    const double dqa_dr = 1.0 / (1.0 - x);
    const double dqd_dx = -(1.0 + r) / ((1.0 + x) * (1.0 + x));
    const double dqd_dr = 1.0 / (1.0 + x);
    jac[0][0] = 2.0 * qa * dqa_dx / target_amp;
    jac[0][1] = 2.0 * qa * dqa_dr * dr_dl / target_amp;
    jac[1][0] = 2.0 * qd * dqd_dx / target_deamp;
    jac[1][1] = 2.0 * qd * dqd_dr * dr_dl / target_deamp;
  }
};

double norm_inf(const std::array<double, 2>& f) { return std::max(std::abs(f[0]), std::abs(f[1])); }

struct NewtonResult {
  double x;
  double loss;
  double residual;
  bool converged;
};

NewtonResult damped_newton(const GainModel& model, double x, double loss,
                           const GainFitOptions& opt) {
  constexpr double x_max = 1.0 - 1e-9;
  auto clamp_x = [&](double v) { return std::clamp(v, 0.0, x_max); };
  auto clamp_l = [&](double v) { return std::clamp(v, 0.0, opt.max_loss); };

  std::array<double, 2> f{};
  std::array<std::array<double, 2>, 2> jac{};
  model.evaluate(x, loss, f, jac);
  double res = norm_inf(f);
  for (int it = 0; it < opt.max_iterations && res > opt.tolerance; ++it) {
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
    const double dx = -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
    const double dl = -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det;

    double step = 1.0;
    bool improved = false;
    std::array<double, 2> f_try{};
    std::array<std::array<double, 2>, 2> j_try{};
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      const double xt = clamp_x(x + step * dx);
      const double lt = clamp_l(loss + step * dl);
      model.evaluate(xt, lt, f_try, j_try);
      const double rt = norm_inf(f_try);
      if (std::isfinite(rt) && rt < res) {
        x = xt;
        loss = lt;
        f = f_try;
        jac = j_try;
        res = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return {x, loss, res, res <= opt.accept_residual};
}

}  // namespace

ParametricGains parametric_gains(const OpoParams& params) {
  const auto amp = transfer_coefficients(params, 0.0, Quadrature::amplitude);
  const auto ph = transfer_coefficients(params, 0.0, Quadrature::phase);
  return {std::norm(amp.input_coeff), std::norm(ph.input_coeff)};
}

double to_db(double power_ratio) { return 10.0 * std::log10(power_ratio); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

OpoParams fit_gains(double amp_gain_db, double deamp_gain_db, double input_transmission,
                    double round_trip_time, const GainFitOptions& options) {
  if (!std::isfinite(amp_gain_db) || !std::isfinite(deamp_gain_db)) {
    throw std::invalid_argument("fit_gains: gains must be finite");
  }
  if (!(input_transmission > 0.0 && input_transmission < 1.0)) {
    throw std::invalid_argument("fit_gains: input_transmission must be in (0, 1)");
  }
  if (!(round_trip_time > 0.0)) {
    throw std::invalid_argument("fit_gains: round_trip_time must be > 0");
  }

  const GainModel model{from_db(amp_gain_db), from_db(-deamp_gain_db), input_transmission};

  std::vector<std::pair<double, double>> starts{{0.5, 0.01}};
  for (double x0 : {0.1, 0.3, 0.5, 0.7, 0.85, 0.95}) {
    for (double l0 : {0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.45}) {
      starts.emplace_back(x0, std::min(l0, options.max_loss));
    }
  }
  // Near r = chi/kappa the de-amplified gain has a double zero and Newton from
  // the grid tends to fall into the neighbouring sign branch. Seed every
  // branch from its closed form too; Newton still has to confirm it.
  for (double sa : {1.0, -1.0}) {
    for (double sb : {1.0, -1.0}) {
      const double a = sa * std::sqrt(model.target_amp);
      const double b = sb * std::sqrt(model.target_deamp);
      const double x0 = (a - b) / (2.0 + a + b);
      const double r0 = a * (1.0 - x0) - x0;
      if (!(x0 >= 0.0 && x0 < 1.0 && r0 > -1.0 && r0 <= 1.0)) continue;
      const double l0 = input_transmission * (1.0 - r0) / (1.0 + r0);
      if (l0 >= 0.0 && l0 <= options.max_loss) starts.emplace_back(x0, l0);
    }
  }

  std::vector<NewtonResult> roots;
  NewtonResult best{0.5, 0.01, std::numeric_limits<double>::infinity(), false};
  for (const auto& [x0, l0] : starts) {
    const auto result = damped_newton(model, x0, l0, options);
    if (result.residual < best.residual) best = result;
    if (result.converged) roots.push_back(result);
  }

  if (roots.empty()) {
    std::ostringstream msg;
    msg.precision(6);
    const bool at_threshold = best.x > 1.0 - 1e-6;
    const bool at_loss_bound = best.loss <= 0.0 || best.loss >= options.max_loss;
    if (at_threshold || at_loss_bound) {
      msg << "fit_gains: no sub-threshold solution for amp " << amp_gain_db << " dB / deamp "
          << deamp_gain_db << " dB (best chi/kappa=" << best.x << ", L=" << best.loss
          << ", residual " << best.residual << ")";
      throw InfeasibleFitError(msg.str(), best.residual);
    }
    msg << "fit_gains: did not converge, residual " << best.residual;
    throw GainFitError(msg.str(), best.residual);
  }

  const auto chosen = std::min_element(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    return a.loss < b.loss;
  });
  const double kappa = (input_transmission + chosen->loss) / round_trip_time;
  return OpoParams(round_trip_time, input_transmission, chosen->loss, chosen->x * kappa);
}

}  // namespace sqzcomb
