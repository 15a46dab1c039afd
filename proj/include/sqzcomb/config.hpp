#pragma once

// Run configuration for the command-line tool.
//
// The file is a single JSON object. Every key is optional and falls back to
// the built-in profile; unknown keys are rejected. Schema (defaults):
//
//   opo.fsr_hz                   199e6
//   opo.input_transmission       0.02
//   opo.gains_db.amplification   3.9    } either gains_db, which are fitted
//   opo.gains_db.deamplification 2.6    } to (chi, L), or both of
//   opo.intracavity_loss                } intracavity_loss and pump_ratio
//   opo.pump_ratio                      } (chi / kappa)
//   trace.sample_rate            1.024e9
//   trace.segment_length         4096
//   trace.segment_count          2000
//   trace.seed                   1
//   trace.quadrature             "phase" | "amplitude"
//   detector.bandwidth_hz        450e6
//   detector.noise_bins          8
//   plan.channels                2
//   plan.misalignment_hz         [-7e6, -6e6]
//   plan.guard_fraction          0.25
//   plan.subband_bins            4
//   plan.target_snr              1
//   spectrum.max_frequency_hz    2.5e9
//   spectrum.step_hz             0.25e6
//   capacity.photon_flux         1
//   capacity.analogue_bandwidth  2
//   capacity.signal_bandwidth    1
//   capacity.sweep_points        0      (> 1 sweeps Phi linearly from 0)
//   capacity.sweep_max_flux      10
//   fdm.crosstalk                false
//   output_dir                   "out"
//
// Precedence: built-in profile < config file < command-line flags.

#include "sqzcomb/fdm_link.hpp"
#include "sqzcomb/opo_spectrum.hpp"
#include "sqzcomb/trace.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqzcomb {

// Invalid or unknown configuration entry. key() is the dotted path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct GainsDb {
  double amplification = 3.9;
  double deamplification = 2.6;
};

struct ExplicitOpo {
  double intracavity_loss = 0.0;
  double pump_ratio = 0.0;
};

struct OpoConfig {
  double fsr_hz = 199e6;
  double input_transmission = 0.02;
  // Exactly one of these is set.
  std::optional<GainsDb> gains_db = GainsDb{};
  std::optional<ExplicitOpo> explicit_params;
};

struct SpectrumConfig {
  double max_frequency_hz = 2.5e9;
  double step_hz = 0.25e6;
};

struct CapacityConfig {
  double photon_flux = 1.0;
  double analogue_bandwidth = 2.0;
  double signal_bandwidth = 1.0;
  std::size_t sweep_points = 0;
  double sweep_max_flux = 10.0;
};

struct RunConfig {
  OpoConfig opo;
  TraceConfig trace;
  LinkOptions detector;
  FdmDemoOptions plan;
  SpectrumConfig spectrum;
  CapacityConfig capacity;
  bool crosstalk = false;
  std::string output_dir = "out";

  // Re-checks every embedded invariant (OPO parameters, trace layout,
  // detector bandwidth, both channel plans, capacity budget). Throws
  // ConfigError naming the offending key.
  void validate() const;
};

RunConfig paper_profile();

// Throws ConfigError on malformed JSON, wrong types, unknown keys or any
// invariant violation.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical JSON: every key present, sorted, two-space indent. The run record
// written next to the outputs leaves output_dir out so it does not depend on
// where the run was written.
std::string serialize_config(const RunConfig& cfg, bool with_output_dir = true);

// Builds the cavity, fitting (chi, L) to the gains when they are given.
OpoParams resolve_opo(const OpoConfig& opo);

}  // namespace sqzcomb
