#include "sqzcomb/config.hpp"

#include "sqzcomb/capacity.hpp"
#include "sqzcomb/trace_synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sqzcomb {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// One JSON object. Reads typed keys and remembers which ones were used so
// the rest can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = child(key)) {
      if (!v->is_number()) throw ConfigError(join(path_, key), "expected a number");
      out = v->get<double>();
    }
  }

  void read(const std::string& key, std::size_t& out) {
    if (const json* v = child(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(join(path_, key), "expected a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = child(key)) {
      if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = child(key)) {
      if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (const json* v = child(key)) {
      if (!v->is_array()) throw ConfigError(join(path_, key), "expected an array of numbers");
      std::vector<double> values;
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) {
          throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "]", "expected a number");
        }
        values.push_back((*v)[i].get<double>());
      }
      out = std::move(values);
    }
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_opo(Section& s, OpoConfig& opo) {
  s.read("fsr_hz", opo.fsr_hz);
  s.read("input_transmission", opo.input_transmission);

  const bool has_gains = s.has("gains_db");
  const bool has_loss = s.has("intracavity_loss");
  const bool has_pump = s.has("pump_ratio");
  if (has_gains && (has_loss || has_pump)) {
    throw ConfigError(s.path("gains_db"), "give either gains_db or intracavity_loss/pump_ratio");
  }
  if (has_loss != has_pump) {
    throw ConfigError(s.path(has_loss ? "pump_ratio" : "intracavity_loss"),
                      "required together with " +
                          std::string(has_loss ? "intracavity_loss" : "pump_ratio"));
  }
  if (has_loss) {
    ExplicitOpo e;
    s.read("intracavity_loss", e.intracavity_loss);
    s.read("pump_ratio", e.pump_ratio);
    opo.explicit_params = e;
    opo.gains_db.reset();
  } else if (const json* g = s.child("gains_db")) {
    Section gs(*g, s.path("gains_db"));
    GainsDb gains;
    gs.read("amplification", gains.amplification);
    gs.read("deamplification", gains.deamplification);
    gs.finish();
    opo.gains_db = gains;
    opo.explicit_params.reset();
  }
  s.finish();
}

void parse_trace(Section& s, TraceConfig& t) {
  s.read("sample_rate", t.sample_rate);
  s.read("segment_length", t.segment_length);
  s.read("segment_count", t.segment_count);
  std::uint64_t seed = t.rng_seed;
  if (const json* v = s.child("seed")) {
    if (!v->is_number_unsigned()) throw ConfigError(s.path("seed"), "expected a non-negative integer");
    seed = v->get<std::uint64_t>();
  }
  t.rng_seed = seed;
  std::string q = to_string(t.quadrature);
  s.read("quadrature", q);
  if (q == "phase") {
    t.quadrature = Quadrature::phase;
  } else if (q == "amplitude") {
    t.quadrature = Quadrature::amplitude;
  } else {
    throw ConfigError(s.path("quadrature"), "expected \"phase\" or \"amplitude\", found \"" + q + "\"");
  }
  s.finish();
}

template <typename F>
void sub(Section& root, const std::string& key, F&& parse) {
  if (const json* v = root.child(key)) {
    Section s(*v, key);
    parse(s);
  }
}

template <typename F>
void rethrow_as(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

RunConfig paper_profile() { return RunConfig{}; }

OpoParams resolve_opo(const OpoConfig& opo) {
  if (!(opo.fsr_hz > 0.0)) throw ConfigError("opo.fsr_hz", "must be > 0");
  if (!(opo.input_transmission > 0.0 && opo.input_transmission < 1.0)) {
    throw ConfigError("opo.input_transmission", "must be in (0, 1)");
  }
  const double tau = 1.0 / opo.fsr_hz;
  if (opo.explicit_params) {
    const auto& e = *opo.explicit_params;
    if (!(e.intracavity_loss >= 0.0 && e.intracavity_loss < 1.0)) {
      throw ConfigError("opo.intracavity_loss", "must be in [0, 1)");
    }
    if (!(e.pump_ratio >= 0.0 && e.pump_ratio < 1.0)) {
      throw ConfigError("opo.pump_ratio", "must be in [0, 1)");
    }
    return OpoParams::from_fsr(opo.fsr_hz, opo.input_transmission, e.intracavity_loss, e.pump_ratio);
  }
  if (!opo.gains_db) throw ConfigError("opo", "needs gains_db or intracavity_loss/pump_ratio");
  const auto& g = *opo.gains_db;
  if (!(g.amplification > 0.0)) throw ConfigError("opo.gains_db.amplification", "must be > 0");
  if (!(g.deamplification > 0.0)) throw ConfigError("opo.gains_db.deamplification", "must be > 0");
  return fit_gains(g.amplification, g.deamplification, opo.input_transmission, tau);
}

void RunConfig::validate() const {
  const OpoParams params = resolve_opo(opo);
  rethrow_as("trace", [&] { trace.validate(); });
  if (!(detector.detector_bandwidth > 0.0)) throw ConfigError("detector.bandwidth_hz", "must be > 0");
  rethrow_as("detector.bandwidth_hz", [&] { LowPassFir(trace.sample_rate, detector.detector_bandwidth); });
  if (detector.noise_bins < 1) throw ConfigError("detector.noise_bins", "must be >= 1");

  if (plan.channels < 1) throw ConfigError("plan.channels", "must be >= 1");
  if (plan.subband_bins < 1) throw ConfigError("plan.subband_bins", "must be >= 1");
  if (!(plan.guard_fraction > 0.0 && plan.guard_fraction < 0.5)) {
    throw ConfigError("plan.guard_fraction", "must be in (0, 0.5)");
  }
  if (!(plan.target_snr > 0.0)) throw ConfigError("plan.target_snr", "must be > 0");
  for (std::size_t i = 0; i < plan.misalignment_hz.size(); ++i) {
    if (!std::isfinite(plan.misalignment_hz[i])) {
      throw ConfigError("plan.misalignment_hz[" + std::to_string(i) + "]", "must be finite");
    }
  }
  rethrow_as("plan", [&] {
    const double width = static_cast<double>(plan.subband_bins) * trace.bin_spacing();
    const double guard = plan.guard_fraction * params.fsr();
    design_plan(params, plan.channels, guard, Alignment::comb_aligned(), width, trace.nyquist());
    std::vector<double> offsets;
    for (std::size_t i = 0; i < plan.channels; ++i) {
      offsets.push_back(plan.misalignment_hz.empty()
                            ? 0.0
                            : plan.misalignment_hz[std::min(i, plan.misalignment_hz.size() - 1)]);
    }
    design_plan(params, plan.channels, guard, Alignment::offset(offsets), width, trace.nyquist());
  });

  if (!(spectrum.max_frequency_hz > 0.0)) throw ConfigError("spectrum.max_frequency_hz", "must be > 0");
  if (!(spectrum.step_hz > 0.0)) throw ConfigError("spectrum.step_hz", "must be > 0");
  if (spectrum.max_frequency_hz / spectrum.step_hz > 1e8) {
    throw ConfigError("spectrum.step_hz", "grid would exceed 1e8 points");
  }

  if (!(capacity.photon_flux >= 0.0)) throw ConfigError("capacity.photon_flux", "must be >= 0");
  if (!(capacity.signal_bandwidth > 0.0)) throw ConfigError("capacity.signal_bandwidth", "must be > 0");
  if (!(capacity.signal_bandwidth <= capacity.analogue_bandwidth)) {
    throw ConfigError("capacity.signal_bandwidth", "must not exceed capacity.analogue_bandwidth");
  }
  if (capacity.sweep_points == 1) throw ConfigError("capacity.sweep_points", "must be 0 or >= 2");
  if (capacity.sweep_points > 1 && !(capacity.sweep_max_flux > 0.0)) {
    throw ConfigError("capacity.sweep_max_flux", "must be > 0");
  }

  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }

  RunConfig cfg = paper_profile();
  Section root(doc, "");
  sub(root, "opo", [&](Section& s) { parse_opo(s, cfg.opo); });
  sub(root, "trace", [&](Section& s) { parse_trace(s, cfg.trace); });
  sub(root, "detector", [&](Section& s) {
    s.read("bandwidth_hz", cfg.detector.detector_bandwidth);
    s.read("noise_bins", cfg.detector.noise_bins);
    s.finish();
  });
  sub(root, "plan", [&](Section& s) {
    s.read("channels", cfg.plan.channels);
    s.read("misalignment_hz", cfg.plan.misalignment_hz);
    s.read("guard_fraction", cfg.plan.guard_fraction);
    s.read("subband_bins", cfg.plan.subband_bins);
    s.read("target_snr", cfg.plan.target_snr);
    s.finish();
  });
  sub(root, "spectrum", [&](Section& s) {
    s.read("max_frequency_hz", cfg.spectrum.max_frequency_hz);
    s.read("step_hz", cfg.spectrum.step_hz);
    s.finish();
  });
  sub(root, "capacity", [&](Section& s) {
    s.read("photon_flux", cfg.capacity.photon_flux);
    s.read("analogue_bandwidth", cfg.capacity.analogue_bandwidth);
    s.read("signal_bandwidth", cfg.capacity.signal_bandwidth);
    s.read("sweep_points", cfg.capacity.sweep_points);
    s.read("sweep_max_flux", cfg.capacity.sweep_max_flux);
    s.finish();
  });
  sub(root, "fdm", [&](Section& s) {
    s.read("crosstalk", cfg.crosstalk);
    s.finish();
  });
  root.read("output_dir", cfg.output_dir);
  root.finish();

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg, bool with_output_dir) {
  json opo = {{"fsr_hz", cfg.opo.fsr_hz}, {"input_transmission", cfg.opo.input_transmission}};
  if (cfg.opo.explicit_params) {
    opo["intracavity_loss"] = cfg.opo.explicit_params->intracavity_loss;
    opo["pump_ratio"] = cfg.opo.explicit_params->pump_ratio;
  } else if (cfg.opo.gains_db) {
    opo["gains_db"] = {{"amplification", cfg.opo.gains_db->amplification},
                       {"deamplification", cfg.opo.gains_db->deamplification}};
  }
  json doc = {
      {"opo", opo},
      {"trace",
       {{"sample_rate", cfg.trace.sample_rate},
        {"segment_length", cfg.trace.segment_length},
        {"segment_count", cfg.trace.segment_count},
        {"seed", cfg.trace.rng_seed},
        {"quadrature", to_string(cfg.trace.quadrature)}}},
      {"detector",
       {{"bandwidth_hz", cfg.detector.detector_bandwidth}, {"noise_bins", cfg.detector.noise_bins}}},
      {"plan",
       {{"channels", cfg.plan.channels},
        {"misalignment_hz", cfg.plan.misalignment_hz},
        {"guard_fraction", cfg.plan.guard_fraction},
        {"subband_bins", cfg.plan.subband_bins},
        {"target_snr", cfg.plan.target_snr}}},
      {"spectrum",
       {{"max_frequency_hz", cfg.spectrum.max_frequency_hz}, {"step_hz", cfg.spectrum.step_hz}}},
      {"capacity",
       {{"photon_flux", cfg.capacity.photon_flux},
        {"analogue_bandwidth", cfg.capacity.analogue_bandwidth},
        {"signal_bandwidth", cfg.capacity.signal_bandwidth},
        {"sweep_points", cfg.capacity.sweep_points},
        {"sweep_max_flux", cfg.capacity.sweep_max_flux}}},
      {"fdm", {{"crosstalk", cfg.crosstalk}}},
  };
  if (with_output_dir) doc["output_dir"] = cfg.output_dir;
  return doc.dump(2) + "\n";
}

}  // namespace sqzcomb
