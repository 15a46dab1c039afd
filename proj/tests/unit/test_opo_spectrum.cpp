#include "sqzcomb/opo_spectrum.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <random>

using namespace sqzcomb;
using namespace sqzcomb::test;

namespace {

constexpr double tau199 = 1.0 / 199e6;

OpoParams lossless(double pump_ratio, double T = 0.1) {
  return OpoParams(tau199, T, 0.0, pump_ratio * T / tau199);
}

}  // namespace

TEST_CASE("OpoParams rejects invalid construction") {
  CHECK_THROWS_AS(OpoParams(0.0, 0.1, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OpoParams(tau199, 0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OpoParams(tau199, 1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OpoParams(tau199, 0.1, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OpoParams(tau199, 0.1, -0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OpoParams(tau199, 0.1, 0.0, -1.0), std::invalid_argument);
  // at and above threshold
  CHECK_THROWS_AS(OpoParams(tau199, 0.1, 0.0, 0.1 / tau199), std::invalid_argument);
  CHECK_THROWS_AS(OpoParams::from_fsr(199e6, 0.1, 0.01, 1.2), std::invalid_argument);

  const auto p = OpoParams::from_fsr(199e6, 0.1, 0.02, 0.5);
  CHECK(p.kappa_in() == doctest::Approx(0.1 * 199e6));
  CHECK(p.kappa_loss() == doctest::Approx(0.02 * 199e6));
  CHECK(p.pump_ratio() == doctest::Approx(0.5));
  CHECK(p.fsr() == doctest::Approx(199e6));
}

TEST_CASE("transfer coefficients: worked examples") {
  SUBCASE("passive lossless cavity at resonance is the identity") {
    const OpoParams p(tau199, 0.1, 0.0, 0.0);
    for (auto q : {Quadrature::amplitude, Quadrature::phase}) {
      const auto t = transfer_coefficients(p, two_pi / tau199, q);
      CHECK(std::abs(std::norm(t.input_coeff) - 1.0) <= 4 * eps);
      // omega * tau is 2 pi only to rounding, which leaves a ~1e-15 phase.
      CHECK(std::abs(t.input_coeff - 1.0) <= 1e-13);
      CHECK(std::abs(t.loss_coeff) == 0.0);
    }
  }
  SUBCASE("chi = kappa/2, omega = 0, phase quadrature gives 1/3") {
    const auto t = transfer_coefficients(lossless(0.5), 0.0, Quadrature::phase);
    CHECK(t.input_coeff.real() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(t.input_coeff.imag() == 0.0);
    CHECK(t.loss_coeff == std::complex<double>(0.0, 0.0));
  }
  SUBCASE("lossy passive cavity at resonance keeps vacuum") {
    const OpoParams p(tau199, 0.1, 0.01, 0.0);
    for (int n = 0; n <= 12; ++n) {
      for (auto q : {Quadrature::amplitude, Quadrature::phase}) {
        for (auto d : {DelayTerm::symmetric, DelayTerm::literal}) {
          const auto t = transfer_coefficients(p, two_pi * n / tau199, q, d);
          CHECK(std::norm(t.input_coeff) + std::norm(t.loss_coeff) ==
                doctest::Approx(1.0).epsilon(4 * eps));
        }
      }
    }
  }
}

TEST_CASE("quadrature variances: worked examples") {
  SUBCASE("passive cavity at resonance is at the QNL") {
    for (double T : {0.01, 0.1, 0.5, 0.9}) {
      for (double L : {0.0, 0.001, 0.05, 0.3}) {
        const OpoParams p(tau199, T, L, 0.0);
        for (int n = 0; n <= 12; ++n) {
          for (auto d : {DelayTerm::symmetric, DelayTerm::literal}) {
            const auto v = quadrature_variances(p, two_pi * n / tau199, d);
            CHECK(std::abs(v.v_plus - 1.0) <= 4 * eps);
            CHECK(std::abs(v.v_minus - 1.0) <= 4 * eps);
          }
        }
      }
    }
  }
  SUBCASE("lossless chi = kappa/2 at omega = 0 gives (9, 1/9)") {
    const auto v = quadrature_variances(lossless(0.5), 0.0);
    CHECK(rel_err(v.v_plus, 9.0) < 1e-14);
    CHECK(rel_err(v.v_minus, 1.0 / 9.0) < 1e-14);
    CHECK(rel_err(v.v_plus * v.v_minus, 1.0) < 1e-14);
  }
  SUBCASE("T = 0.1, L = 0.005, chi from the 3.9/2.6 dB fit, at the 199 MHz tooth") {
    const double x = fit_gains(3.9, 2.6, 0.1, tau199).pump_ratio();
    const auto p = OpoParams::from_fsr(199e6, 0.1, 0.005, x);
    const auto v = quadrature_variances(p, two_pi * 199e6);
    CHECK(v.v_minus < 1.0);
    CHECK(v.v_plus > 1.0);
    // mpmath oracle
    CHECK(rel_err(v.v_minus, 0.05729294929237150782) < 1e-9);
    CHECK(rel_err(v.v_plus, 93.80807983038824017) < 1e-9);
  }
  SUBCASE("off resonance, both delay-term forms against the oracle") {
    const auto p = OpoParams::from_fsr(199e6, 0.1, 0.02, 0.6);
    const double w = two_pi * 37e6;
    const auto sym = quadrature_variances(p, w, DelayTerm::symmetric);
    CHECK(rel_err(sym.v_minus, 0.97702072405813207236) < 1e-12);
    CHECK(rel_err(sym.v_plus, 1.0236309011395158508) < 1e-12);
    const auto lit = quadrature_variances(p, w, DelayTerm::literal);
    CHECK(rel_err(lit.v_minus, 1.2103343932294995448) < 1e-12);
    CHECK(rel_err(lit.v_plus, 1.2344868999539480344) < 1e-12);
  }
  SUBCASE("shipped profile against the oracle") {
    const auto p = profile_params();
    CHECK(rel_err(quadrature_variances(p, 0.0).v_minus, 0.76738226364664886281) < 1e-12);
    CHECK(rel_err(quadrature_variances(p, 0.0).v_plus, 23.900863454071679941) < 1e-12);
    CHECK(rel_err(quadrature_variances(p, two_pi * 192e6).v_minus, 0.92334963822810641804) < 1e-12);
    CHECK(rel_err(quadrature_variances(p, two_pi * 392e6).v_minus, 0.90682485071036520239) < 1e-12);
  }
}

TEST_CASE("invariant: lossless cavities are minimum uncertainty at every frequency") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double T = 0.01 + 0.9 * u(rng);
    const double x = 0.99 * u(rng);
    const double f = 3e9 * u(rng);
    const auto v = quadrature_variances(lossless(x, T), two_pi * f);
    CHECK(std::abs(v.v_plus * v.v_minus - 1.0) <= 1e-12);
  }
}

TEST_CASE("invariant: a passive lossy cavity outputs vacuum between resonances too") {
  const OpoParams p(tau199, 0.1, 0.05, 0.0);
  for (double f = 0.0; f < 1e9; f += 7.3e6) {
    const auto v = quadrature_variances(p, two_pi * f);
    CHECK(v.v_plus == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.v_minus == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("invariant: loss degrades squeezing at a resonance") {
  const double chi = 0.5 * 0.1 / tau199;
  double previous = 0.0;
  for (double L = 0.0; L < 0.5; L += 0.01) {
    const OpoParams p(tau199, 0.1, L, chi);
    const double vm = quadrature_variances(p, two_pi * 199e6).v_minus;
    CHECK(vm >= previous);
    previous = vm;
  }
}

TEST_CASE("invariant: variances are periodic in the FSR") {
  const auto p = OpoParams::from_fsr(199e6, 0.1, 0.02, 0.7);
  for (double f = 0.0; f < 199e6; f += 3.1e6) {
    for (auto d : {DelayTerm::symmetric, DelayTerm::literal}) {
      const auto a = quadrature_variances(p, two_pi * f, d);
      const auto b = quadrature_variances(p, two_pi * (f + 199e6), d);
      CHECK(rel_err(b.v_minus, a.v_minus) < 1e-12);
      CHECK(rel_err(b.v_plus, a.v_plus) < 1e-12);
    }
  }
}

TEST_CASE("invariant: approach to threshold") {
  double last_plus = 0.0;
  double last_minus = 2.0;
  for (double x = 0.0; x < 0.999; x += 0.037) {
    const auto p = lossless(x);
    const auto v = quadrature_variances(p, two_pi * 398e6);
    const double bound = (1.0 - x) / (1.0 + x);
    CHECK(v.v_plus > last_plus);
    CHECK(v.v_minus < last_minus);
    CHECK(v.v_minus >= bound * bound * (1.0 - 1e-12));
    last_plus = v.v_plus;
    last_minus = v.v_minus;
  }
  CHECK(quadrature_variances(lossless(0.9999), 0.0).v_plus > 1e7);
}

TEST_CASE("comb spectrum") {
  SUBCASE("a dozen squeezing teeth below 2.4 GHz") {
    std::vector<double> grid;
    for (int i = 0; i <= 10000; ++i) grid.push_back(0.25e6 * i);
    const auto s = comb_spectrum(profile_params(), grid);
    REQUIRE(s.size() == grid.size());
    const auto minima = local_minima(s.frequencies, s.v_minus, 2.4e9);
    REQUIRE(minima.size() == 12);
    for (std::size_t n = 0; n < minima.size(); ++n) {
      CHECK(minima[n] == doctest::Approx(199e6 * static_cast<double>(n + 1)));
    }
  }
  SUBCASE("passive lossless cavity is flat vacuum") {
    std::vector<double> grid;
    for (int i = 0; i < 4000; ++i) grid.push_back(0.61e6 * i);
    const auto s = comb_spectrum(OpoParams(tau199, 0.1, 0.0, 0.0), grid);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(s.v_plus[i] * s.v_minus[i] - 1.0) <= 1e-12);
    }
  }
  SUBCASE("single point at DC matches quadrature_variances") {
    const auto p = profile_params();
    const std::vector<double> grid{0.0};
    const auto s = comb_spectrum(p, grid);
    const auto v = quadrature_variances(p, 0.0);
    CHECK(s.v_plus[0] == v.v_plus);
    CHECK(s.v_minus[0] == v.v_minus);
    CHECK(&s.variance(Quadrature::phase) == &s.v_minus);
  }
  SUBCASE("invalid grids") {
    const auto p = profile_params();
    CHECK_THROWS_AS(comb_spectrum(p, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(comb_spectrum(p, std::vector<double>{1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(comb_spectrum(p, std::vector<double>{-1.0}), std::invalid_argument);
  }
}

TEST_CASE("resonance frequencies") {
  const auto p = OpoParams::from_fsr(199e6, 0.1, 0.0, 0.0);
  const auto r = resonance_frequencies(p, 2.4e9);
  REQUIRE(r.size() == 12);
  CHECK(r.front() == doctest::Approx(199e6));
  CHECK(r.back() == doctest::Approx(2388e6));
  CHECK(resonance_frequencies(p, 150e6).empty());
  CHECK(resonance_frequencies(p, 2.0 * p.fsr()).size() == 2);
  CHECK_THROWS_AS(resonance_frequencies(p, 0.0), std::invalid_argument);
}

TEST_CASE("parametric gains and their inversion") {
  SUBCASE("forward gains of a lossless chi = kappa/2 cavity") {
    const auto g = parametric_gains(lossless(0.5));
    CHECK(rel_err(g.amplification, 9.0) < 1e-14);
    CHECK(rel_err(g.deamplification, 1.0 / 9.0) < 1e-14);
    CHECK(to_db(g.amplification) == doctest::Approx(9.5424250943932487));
  }
  SUBCASE("no pump, no loss is unity gain") {
    const auto g = parametric_gains(OpoParams(tau199, 0.1, 0.0, 0.0));
    CHECK(to_db(g.amplification) == doctest::Approx(0.0));
    CHECK(to_db(g.deamplification) == doctest::Approx(0.0));
  }
  SUBCASE("invert 9.54 dB both ways") {
    const double db = to_db(9.0);
    const auto p = fit_gains(db, db, 0.1, tau199);
    CHECK(std::abs(p.pump_ratio() - 0.5) < 1e-6);
    CHECK(p.intracavity_loss() < 1e-9);
  }
  SUBCASE("published gains at T = 0.1") {
    const auto p = fit_gains(3.9, 2.6, 0.1, tau199);
    CHECK(p.pump_ratio() > 0.0);
    CHECK(p.pump_ratio() < 1.0);
    const auto g = parametric_gains(p);
    CHECK(std::abs(to_db(g.amplification) - 3.9) < 1e-9);
    CHECK(std::abs(-to_db(g.deamplification) - 2.6) < 1e-9);
    CHECK(rel_err(p.pump_ratio(), 0.81688538223022058423) < 1e-9);
    CHECK(rel_err(p.intracavity_loss(), 0.32552318613376020415) < 1e-9);
  }
  SUBCASE("published gains at the profile transmission") {
    const auto p = fit_gains(3.9, 2.6, 0.02, tau199);
    CHECK(rel_err(p.pump_ratio(), profile_pump_ratio) < 1e-9);
    CHECK(rel_err(p.intracavity_loss(), profile_loss) < 1e-9);
  }
  SUBCASE("infeasible gains") {
    // L would have to exceed the 0.5 bound.
    CHECK_THROWS_AS(fit_gains(3.9, 2.6, 0.2, tau199), InfeasibleFitError);
    CHECK_THROWS_AS(fit_gains(std::nan(""), 2.6, 0.1, tau199), std::invalid_argument);
  }
}

TEST_CASE("invariant: fit_gains inverts the forward gains") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.05, 0.9);
  std::uniform_real_distribution<double> uL(0.0, 0.3);
  std::uniform_real_distribution<double> uT(0.01, 0.3);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const double T = uT(rng);
    const double L = uL(rng);
    const double x = ux(rng);
    const auto truth = OpoParams::from_fsr(199e6, T, L, x);
    const auto g = parametric_gains(truth);
    const auto fit = fit_gains(to_db(g.amplification), -to_db(g.deamplification), T, tau199);
    // The gain pair has a second, larger-loss preimage when the true point
    // is phase-flipped; the fit returns the smaller-loss root, so compare
    // forward gains always and parameters when the truth is that root.
    const auto gf = parametric_gains(fit);
    CHECK(rel_err(gf.amplification, g.amplification) < 1e-9);
    CHECK(rel_err(gf.deamplification, g.deamplification) < 1e-9);
    CHECK(fit.intracavity_loss() <= L + 1e-9);
    if (std::abs(fit.intracavity_loss() - L) < 1e-6 * std::max(L, 1e-3)) {
      CHECK(rel_err(fit.pump_ratio(), x) < 1e-6);
      ++checked;
    }
  }
  CHECK(checked > 100);
}
