#include "spadsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spadsim/errors.hpp"

namespace spadsim {

namespace {

using nlohmann::json;

/// Tracks which keys of a JSON object were consumed and rejects leftovers.
class StrictObject {
 public:
  StrictObject(const json& j, std::string context)
      : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) {
      throw ConfigError(context_ + ": expected a JSON object");
    }
  }

  const json* get(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const char* key) {
    const json* v = get(key);
    if (!v) throw ConfigError(context_ + ": missing required key '" + key + "'");
    return *v;
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (const json* v = get(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(context_ + "." + key + ": " + e.what());
      }
    }
  }

  void finish() {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!seen_.count(key)) {
        throw ConfigError(context_ + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

GateConfig parse_gate(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  GateConfig g;
  o.read("repetition_hz", g.repetition_hz);
  o.read("gate_amplitude_v", g.gate_amplitude_v);
  o.read("gate_width_s", g.gate_width_s);
  o.read("samples_per_gate", g.samples_per_gate);
  o.finish();
  return g;
}

std::vector<PolePair> parse_poles(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of poles");
  std::vector<PolePair> poles;
  int i = 0;
  for (const auto& pj : j) {
    StrictObject o(pj, ctx + "[" + std::to_string(i++) + "]");
    PolePair p;
    p.frequency_hz = o.require("frequency_hz").get<double>();
    p.damping = o.require("damping").get<double>();
    o.finish();
    poles.push_back(p);
  }
  return poles;
}

DeviceProfile parse_device(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  DeviceProfile d;
  o.read("responsivity_a_per_w", d.responsivity_a_per_w);
  o.read("feedthrough_gain", d.feedthrough_gain);
  if (const json* poles = o.get("transfer_poles")) {
    d.transfer_poles = parse_poles(*poles, ctx + ".transfer_poles");
  }
  o.read("variation_fraction", d.variation_fraction);
  o.read("avalanche_amp_mean_v", d.avalanche_amp_mean_v);
  o.read("avalanche_amp_sigma_v", d.avalanche_amp_sigma_v);
  o.read("avalanche_decay_s", d.avalanche_decay_s);
  o.read("efficiency_eta", d.efficiency_eta);
  o.read("dark_prob_per_gate", d.dark_prob_per_gate);
  o.read("afterpulse_prob", d.afterpulse_prob);
  o.read("afterpulse_tau_s", d.afterpulse_tau_s);
  o.read("crosstalk_chi", d.crosstalk_chi);
  o.finish();
  return d;
}

AdcConfig parse_adc(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  AdcConfig a;
  o.read("bits", a.bits);
  o.read("full_scale_v", a.full_scale_v);
  o.read("offset_v", a.offset_v);
  o.finish();
  return a;
}

Illumination parse_illumination(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  Illumination ill;
  if (const json* p = o.get("pattern")) {
    const std::string name = p->get<std::string>();
    if (name == "all_lit") {
      ill.pattern = IlluminationPattern::AllLit;
    } else if (name == "all_dark") {
      ill.pattern = IlluminationPattern::AllDark;
    } else if (name == "alternating") {
      ill.pattern = IlluminationPattern::Alternating;
    } else if (name == "poisson") {
      ill.pattern = IlluminationPattern::Poisson;
    } else {
      throw ConfigError(ctx + ".pattern: unknown pattern '" + name + "'");
    }
  }
  o.read("mu_gate", ill.mu_gate);
  o.finish();
  return ill;
}

Scenario parse_scenario(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  Scenario s;
  if (const json* g = o.get("gate")) s.gate = parse_gate(*g, ctx + ".gate");
  bool derive_second = false;
  o.read("derive_second_device", derive_second);
  if (const json* devs = o.get("devices")) {
    if (!devs->is_array() || devs->empty() || devs->size() > 2) {
      throw ConfigError(ctx + ".devices: expected an array of one or two devices");
    }
    s.devices.clear();
    int i = 0;
    for (const auto& dj : *devs) {
      s.devices.push_back(parse_device(dj, ctx + ".devices[" + std::to_string(i++) + "]"));
    }
  }
  o.read("noise_sigma_v", s.noise_sigma_v);
  o.read("n_gates", s.n_gates);
  o.read("seed", s.seed);
  if (const json* a = o.get("adc")) s.adc = parse_adc(*a, ctx + ".adc");
  if (const json* ill = o.get("illumination")) {
    s.illumination = parse_illumination(*ill, ctx + ".illumination");
  }
  o.finish();
  if (derive_second) {
    if (s.devices.size() != 1) {
      throw ConfigError(ctx + ": derive_second_device needs exactly one base device");
    }
    // Two physical chips from one nominal profile, perturbed independently.
    DeviceProfile base = s.devices[0];
    s.devices[0] = apply_device_variation(base, s.seed * 2 + 1);
    s.devices.push_back(apply_device_variation(base, s.seed * 2 + 2));
  }
  s.validate();
  return s;
}

CompensatorConfig parse_compensator(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  CompensatorConfig c;
  o.read("window_n", c.window_n);
  o.read("warmup_gates", c.warmup_gates);
  o.read("guard_multiplier", c.guard_multiplier);
  if (const json* w = o.get("timing_window")) {
    if (!w->is_array() || w->size() != 2) {
      throw ConfigError(ctx + ".timing_window: expected [start_fraction, end_fraction]");
    }
    c.timing_start = (*w)[0].get<double>();
    c.timing_end = (*w)[1].get<double>();
  }
  o.read("v_th", c.v_th);
  o.finish();
  c.validate();
  return c;
}

std::vector<double> parse_grid(const json& j, const std::string& ctx) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
  }
  StrictObject o(j, ctx);
  const double lo = o.require("min").get<double>();
  const double hi = o.require("max").get<double>();
  const int count = o.require("count").get<int>();
  std::string scale = "linear";
  o.read("scale", scale);
  o.finish();
  if (count < 1) throw ConfigError(ctx + ".count must be >= 1");
  if (count > 1 && !(hi > lo)) throw ConfigError(ctx + ": max must exceed min");
  std::vector<double> out;
  out.reserve(count);
  if (scale == "linear") {
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
  } else if (scale == "log") {
    if (!(lo > 0.0)) throw ConfigError(ctx + ": log scale requires min > 0");
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? lo : std::exp(llo + (lhi - llo) * i / (count - 1)));
    }
  } else {
    throw ConfigError(ctx + ".scale must be 'linear' or 'log'");
  }
  return out;
}

SweepSection parse_sweep(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  SweepSection s;
  s.thresholds = parse_grid(o.require("thresholds"), ctx + ".thresholds");
  o.read("channel", s.channel);
  o.read("target_p_pd", s.target_p_pd);
  if (const json* b = o.get("scenario_b")) {
    s.scenario_b = parse_scenario(*b, ctx + ".scenario_b");
  }
  o.finish();
  return s;
}

KeyRateSection parse_keyrate(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  KeyRateSection k;
  o.read("mu", k.params.mu);
  o.read("eta_det", k.params.eta_det);
  o.read("p_dk", k.params.p_dk);
  o.read("e_det", k.params.e_det);
  o.read("sift_q", k.params.sift_q);
  o.read("f_ec", k.params.f_ec);
  k.loss_db_grid = parse_grid(o.require("loss_db"), ctx + ".loss_db");
  o.read("reduction_factor", k.reduction_factor);
  if (const json* v = o.get("gain_target")) k.gain_target = v->get<double>();
  if (const json* v = o.get("gain_target_loss_db")) {
    k.gain_target_loss_db = v->get<double>();
  }
  o.finish();
  k.params.channel_loss_db = k.loss_db_grid.empty() ? 0.0 : k.loss_db_grid.front();
  k.params.validate();
  return k;
}

HwSection parse_hw(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  HwSection h;
  if (const json* rf = o.get("rf")) {
    StrictObject r(*rf, ctx + ".rf");
    r.read("z0_ohm", h.rf.z0_ohm);
    r.read("wire_inductance_per_mm", h.rf.wire_inductance_per_mm);
    r.read("wire_length_mm", h.rf.wire_length_mm);
    r.read("shunt_c_f", h.rf.shunt_c_f);
    r.read("f_max_hz", h.rf.f_max_hz);
    r.read("n_points", h.rf.n_points);
    r.finish();
    h.rf.validate();
  }
  o.read("rf_target_hz", h.rf_target_hz);
  if (const json* wires = o.get("wires")) {
    if (!wires->is_array()) throw ConfigError(ctx + ".wires: expected an array");
    int i = 0;
    for (const auto& wj : *wires) {
      StrictObject w(wj, ctx + ".wires[" + std::to_string(i++) + "]");
      WireSpec spec;
      w.read("count", spec.count);
      w.read("conductivity_k", spec.conductivity_k);
      w.read("cross_section_m2", spec.cross_section_m2);
      w.read("length_m", spec.length_m);
      w.read("material", spec.material);
      w.finish();
      spec.validate();
      h.wires.push_back(spec);
    }
  }
  o.read("delta_t_k", h.delta_t_k);
  o.read("budget_mw", h.budget_mw);
  o.finish();
  return h;
}

RunConfig parse_run_config(const json& j) {
  StrictObject o(j, "config");
  RunConfig cfg;
  if (const json* s = o.get("scenario")) cfg.scenario = parse_scenario(*s, "scenario");
  if (const json* c = o.get("compensator")) {
    cfg.compensator = parse_compensator(*c, "compensator");
  }
  if (const json* s = o.get("sweep")) cfg.sweep = parse_sweep(*s, "sweep");
  if (const json* k = o.get("keyrate")) cfg.keyrate = parse_keyrate(*k, "keyrate");
  if (const json* h = o.get("hw")) cfg.hw = parse_hw(*h, "hw");
  if (const json* b = o.get("bench")) {
    StrictObject bo(*b, "bench");
    bo.read("trials", cfg.bench.trials);
    bo.finish();
    if (cfg.bench.trials < 1) throw ConfigError("bench.trials must be >= 1");
  }
  if (const json* out = o.get("output")) {
    StrictObject oo(*out, "output");
    oo.read("dir", cfg.output.dir);
    oo.finish();
  }
  o.finish();
  return cfg;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
  return parse_run_config(parse_text(text));
}

RunConfig run_config_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

Scenario scenario_from_json(const std::string& text) {
  return parse_scenario(parse_text(text), "scenario");
}

}  // namespace spadsim
