// sqzcomb: batch front end for the squeezing-comb simulator.
//
// Exit codes: 0 success, 1 runtime or numeric failure, 2 config or usage
// error.

#include "sqzcomb/capacity.hpp"
#include "sqzcomb/config.hpp"
#include "sqzcomb/csv.hpp"
#include "sqzcomb/fdm_link.hpp"
#include "sqzcomb/opo_spectrum.hpp"
#include "sqzcomb/trace_io.hpp"
#include "sqzcomb/trace_synth.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace sqzcomb;

namespace {

constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> channels;
  bool monte_carlo = false;
  bool paper_defaults = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

RunConfig resolve_config(const Flags& flags) {
  if (flags.paper_defaults && !flags.config_path.empty()) {
    throw UsageError("--paper-defaults and --config are mutually exclusive");
  }
  RunConfig cfg = flags.config_path.empty() ? paper_profile() : load_config(flags.config_path);
  if (flags.seed) cfg.trace.rng_seed = *flags.seed;
  if (flags.out) cfg.output_dir = *flags.out;
  if (flags.channels) cfg.plan.channels = *flags.channels;
  cfg.validate();
  return cfg;
}

fs::path prepare_output(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::ofstream(dir / "run_config.json", std::ios::trunc) << serialize_config(cfg, false);
  return dir;
}

std::vector<double> linear_grid(double max_hz, double step_hz) {
  const auto n = static_cast<std::size_t>(std::floor(max_hz / step_hz + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * step_hz;
  return grid;
}

void write_psd(const fs::path& path, const SpectrumEstimate& est, const std::string& column) {
  CsvWriter csv(path, {"frequency_hz", column});
  for (std::size_t k = 0; k < est.frequencies.size(); ++k) csv.row({est.frequencies[k], est.power[k]});
  csv.close();
}

int cmd_spectrum(const RunConfig& cfg, bool monte_carlo) {
  const auto dir = prepare_output(cfg);
  const OpoParams params = resolve_opo(cfg.opo);
  const auto grid = linear_grid(cfg.spectrum.max_frequency_hz, cfg.spectrum.step_hz);
  const auto spec = comb_spectrum(params, grid);

  CsvWriter csv(dir / "spectrum.csv", {"frequency_hz", "v_plus", "v_minus"});
  for (std::size_t i = 0; i < spec.size(); ++i) {
    csv.row({spec.frequencies[i], spec.v_plus[i], spec.v_minus[i]});
  }
  csv.close();
  std::printf("spectrum: %zu points, chi/kappa = %.6f, L = %.6g\n", spec.size(), params.pump_ratio(),
              params.intracavity_loss());

  if (monte_carlo) {
    const double bw = cfg.detector.detector_bandwidth;
    const auto seg = cfg.trace.segment_length;
    const auto signal = averaged_psd(homodyne_detect(synthesize_trace(params, cfg.trace), bw), seg);
    const auto vacuum = averaged_psd(
        homodyne_detect(synthesize_trace(params.with_nonlinear_rate(0.0), cfg.trace), bw), seg);
    write_psd(dir / "spectrum_mc.csv", calibrate_qnl(signal, vacuum), "power_qnl");
    write_psd(dir / "vacuum_reference.csv", vacuum, "power");
    std::printf("monte carlo: %zu segments of %zu samples, %s quadrature\n", signal.segments_averaged,
                seg, to_string(cfg.trace.quadrature));
  }
  return 0;
}

int cmd_capacity(const RunConfig& cfg) {
  const auto dir = prepare_output(cfg);
  const auto& c = cfg.capacity;
  const auto r = capacity_report(c.photon_flux, c.analogue_bandwidth, c.signal_bandwidth);
  std::printf("c_comb = %.6f\nc_white = %.6f\nc_coherent = %.6f\nv_opt = %.6f\nsnr_opt = %.6f\n",
              r.c_comb, r.c_white, r.c_coherent, r.v_opt, r.snr_opt);

  CsvWriter csv(dir / "capacity.csv", {"photon_flux", "analogue_bandwidth", "signal_bandwidth", "c_comb",
                                       "c_white", "c_coherent", "v_opt", "snr_opt", "bit_rate_comb"});
  auto emit = [&](double flux) {
    const auto x = capacity_report(flux, c.analogue_bandwidth, c.signal_bandwidth);
    csv.row({flux, c.analogue_bandwidth, c.signal_bandwidth, x.c_comb, x.c_white, x.c_coherent, x.v_opt,
             x.snr_opt, x.bit_rate_comb});
  };
  if (c.sweep_points > 1) {
    for (std::size_t i = 0; i < c.sweep_points; ++i) {
      emit(c.sweep_max_flux * static_cast<double>(i) / static_cast<double>(c.sweep_points - 1));
    }
  } else {
    emit(c.photon_flux);
  }
  csv.close();
  return 0;
}

int cmd_synth(const RunConfig& cfg) {
  const auto dir = prepare_output(cfg);
  const OpoParams params = resolve_opo(cfg.opo);
  const auto detected =
      homodyne_detect(synthesize_trace(params, cfg.trace), cfg.detector.detector_bandwidth);
  write_trace(dir / "trace.sqzt", detected);
  write_psd(dir / "psd.csv", averaged_psd(detected, cfg.trace.segment_length), "power");
  std::printf("synth: %zu samples at %.6g S/s, %s quadrature\n", detected.samples.size(),
              detected.sample_rate, to_string(detected.quadrature));
  return 0;
}

void write_bands(const fs::path& path, const LinkResult& result) {
  CsvWriter csv(path, {"band_center_hz", "signal_power", "noise_floor", "snr", "capacity_bits"});
  for (const auto& b : result.bands) csv.row({b.center, b.signal_power, b.noise_floor, b.snr, b.capacity});
  csv.close();
}

double mean_capacity(const LinkResult& r) {
  double s = 0.0;
  for (const auto& b : r.bands) s += b.capacity;
  return s / static_cast<double>(r.bands.size());
}

int cmd_fdm_demo(const RunConfig& cfg) {
  const auto dir = prepare_output(cfg);
  const OpoParams params = resolve_opo(cfg.opo);
  const auto demo = fdm_demo(params, cfg.trace, cfg.detector, cfg.plan);
  write_bands(dir / "fdm_aligned.csv", demo.aligned);
  write_bands(dir / "fdm_misaligned.csv", demo.misaligned);

  if (cfg.crosstalk) {
    const auto m = crosstalk_matrix(params, demo.aligned_plan, demo.amplitudes, cfg.trace, cfg.detector);
    std::vector<std::string> header{"tone_hz"};
    for (const auto& b : demo.aligned_plan.subbands) {
      header.push_back("band_" + format_number(b.center));
    }
    CsvWriter csv(dir / "crosstalk.csv", header);
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      std::vector<double> row{demo.aligned_plan.subbands[i].center};
      row.insert(row.end(), m.entries[i].begin(), m.entries[i].end());
      csv.row(row);
    }
    csv.close();
  }

  for (std::size_t i = 0; i < demo.aligned.bands.size(); ++i) {
    const auto& a = demo.aligned.bands[i];
    const auto& m = demo.misaligned.bands[i];
    std::printf("channel %zu: aligned %.3f MHz snr %.4f C %.4f | misaligned %.3f MHz snr %.4f C %.4f\n",
                i + 1, a.center / 1e6, a.snr, a.capacity, m.center / 1e6, m.snr, m.capacity);
  }
  const double ca = mean_capacity(demo.aligned);
  const double cm = mean_capacity(demo.misaligned);
  std::printf("summary: aligned capacity %.4f %s misaligned capacity %.4f bits/use\n", ca,
              ca > cm ? ">" : "<=", cm);
  return 0;
}

int cmd_fit_gains(const RunConfig& cfg) {
  if (!cfg.opo.gains_db) throw ConfigError("opo.gains_db", "fit-gains needs measured gains");
  const auto dir = prepare_output(cfg);
  const auto& g = *cfg.opo.gains_db;
  const OpoParams p = resolve_opo(cfg.opo);
  const auto forward = parametric_gains(p);
  const auto at_tooth = quadrature_variances(p, 0.0);

  CsvWriter csv(dir / "fit_gains.csv",
                {"amp_gain_db", "deamp_gain_db", "input_transmission", "fsr_hz", "pump_ratio",
                 "intracavity_loss", "nonlinear_rate", "fit_amp_gain_db", "fit_deamp_gain_db",
                 "v_plus_resonance", "v_minus_resonance"});
  csv.row({g.amplification, g.deamplification, p.input_transmission(), p.fsr(), p.pump_ratio(),
           p.intracavity_loss(), p.nonlinear_rate(), to_db(forward.amplification),
           -to_db(forward.deamplification), at_tooth.v_plus, at_tooth.v_minus});
  csv.close();
  std::printf("chi/kappa = %.8f\nL = %.8g\nV- at resonance = %.6f\nV+ at resonance = %.6f\n",
              p.pump_ratio(), p.intracavity_loss(), at_tooth.v_minus, at_tooth.v_plus);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezing-comb spectra, capacities and FDM link simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "RNG seed (overrides trace.seed)");
  app.add_option("--out", flags.out, "output directory (overrides output_dir)");
  app.add_flag("--paper-defaults", flags.paper_defaults, "use the built-in paper profile");

  auto* spectrum = app.add_subcommand("spectrum", "analytic V+/V- comb, optionally Monte Carlo");
  spectrum->add_flag("--monte-carlo", flags.monte_carlo, "also estimate the spectrum from synthetic traces");
  auto* capacity = app.add_subcommand("capacity", "comb, white and coherent capacities");
  auto* synth = app.add_subcommand("synth", "synthesize and detect one homodyne record");
  auto* fdm = app.add_subcommand("fdm-demo", "aligned versus misaligned FDM link");
  fdm->add_option("--channels", flags.channels, "number of FDM channels")->check(CLI::PositiveNumber);
  auto* fit = app.add_subcommand("fit-gains", "fit chi and L to the parametric gains");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    const RunConfig cfg = resolve_config(flags);
    if (spectrum->parsed()) return cmd_spectrum(cfg, flags.monte_carlo);
    if (capacity->parsed()) return cmd_capacity(cfg);
    if (synth->parsed()) return cmd_synth(cfg);
    if (fdm->parsed()) return cmd_fdm_demo(cfg);
    if (fit->parsed()) return cmd_fit_gains(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_usage;
}
