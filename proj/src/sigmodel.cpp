#include "spadsim/sigmodel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "spadsim/errors.hpp"
#include "spadsim/parallel.hpp"
#include "spadsim/rng.hpp"

namespace spadsim {

void GateConfig::validate() const {
  if (!(repetition_hz > 0.0)) throw ConfigError("repetition_hz must be > 0");
  if (!(gate_width_s > 0.0) || !(gate_width_s < period_s())) {
    throw ConfigError("gate_width_s must lie in (0, 1/repetition_hz)");
  }
  if (samples_per_gate < 4) throw ConfigError("samples_per_gate must be >= 4");
  if (!(gate_amplitude_v >= 0.0)) throw ConfigError("gate_amplitude_v must be >= 0");
}

namespace {
void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(name) + " must be in [0, 1]");
  }
}
}  // namespace

void DeviceProfile::validate(double responsivity_lo, double responsivity_hi) const {
  if (!(responsivity_a_per_w >= responsivity_lo &&
        responsivity_a_per_w <= responsivity_hi)) {
    throw ConfigError("responsivity_a_per_w outside plausible band [" +
                      std::to_string(responsivity_lo) + ", " +
                      std::to_string(responsivity_hi) + "]");
  }
  check_probability(efficiency_eta, "efficiency_eta");
  check_probability(dark_prob_per_gate, "dark_prob_per_gate");
  check_probability(afterpulse_prob, "afterpulse_prob");
  check_probability(crosstalk_chi, "crosstalk_chi");
  if (!(avalanche_decay_s > 0.0)) throw ConfigError("avalanche_decay_s must be > 0");
  if (!(afterpulse_tau_s > 0.0)) throw ConfigError("afterpulse_tau_s must be > 0");
  if (!(avalanche_amp_mean_v >= 0.0)) throw ConfigError("avalanche_amp_mean_v must be >= 0");
  if (!(avalanche_amp_sigma_v >= 0.0)) throw ConfigError("avalanche_amp_sigma_v must be >= 0");
  if (!(variation_fraction >= 0.0)) throw ConfigError("variation_fraction must be >= 0");
  if (!(feedthrough_gain >= 0.0)) throw ConfigError("feedthrough_gain must be >= 0");
  // Constructing the response validates pole positivity and distinctness.
  LinearResponse probe{transfer_poles};
}

void AdcConfig::validate() const {
  if (bits < 2 || bits > 16) throw ConfigError("adc bits must be in [2, 16]");
  if (!(full_scale_v > 0.0)) throw ConfigError("adc full_scale_v must be > 0");
}

void Scenario::validate() const {
  gate.validate();
  adc.validate();
  if (devices.empty() || devices.size() > 2) {
    throw ConfigError("scenario requires one or two devices");
  }
  for (const auto& d : devices) d.validate();
  if (n_gates < 1) throw ConfigError("n_gates must be >= 1");
  if (!(noise_sigma_v >= 0.0)) throw ConfigError("noise_sigma_v must be >= 0");
  if (!(illumination.mu_gate >= 0.0)) throw ConfigError("mu_gate must be >= 0");
}

const char* to_string(AvalancheCause cause) {
  switch (cause) {
    case AvalancheCause::None: return "none";
    case AvalancheCause::Photon: return "photon";
    case AvalancheCause::Dark: return "dark";
    case AvalancheCause::Afterpulse: return "afterpulse";
    case AvalancheCause::Crosstalk: return "crosstalk";
  }
  return "none";
}

std::optional<AvalancheCause> cause_from_string(const std::string& name) {
  if (name == "none") return AvalancheCause::None;
  if (name == "photon") return AvalancheCause::Photon;
  if (name == "dark") return AvalancheCause::Dark;
  if (name == "afterpulse") return AvalancheCause::Afterpulse;
  if (name == "crosstalk") return AvalancheCause::Crosstalk;
  return std::nullopt;
}

std::uint64_t FrameStream::checksum() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (std::uint16_t c : codes) {
    h = (h ^ (c & 0xffu)) * 1099511628211ull;
    h = (h ^ (c >> 8)) * 1099511628211ull;
  }
  return h;
}

std::vector<double> gate_feedthrough_waveform(const GateConfig& gate,
                                              const DeviceProfile& device) {
  gate.validate();
  const int n = gate.samples_per_gate;
  const double period = gate.period_s();
  const double dt = gate.sample_dt_s();
  const double scale = device.feedthrough_gain * gate.gate_amplitude_v;
  std::vector<double> wave(n, 0.0);
  if (scale == 0.0) return wave;

  const double t_rise = gate.gate_start_s();
  const double t_fall = gate.gate_start_s() + gate.gate_width_s;
  const LinearResponse resp{device.transfer_poles};

  if (resp.identity()) {
    // Without band-limiting the coupled edges are single-sample impulses.
    const int rise_bin = static_cast<int>(t_rise / dt) % n;
    const int fall_bin = static_cast<int>(t_fall / dt) % n;
    wave[rise_bin] += scale;
    wave[fall_bin] -= scale;
  } else {
    // Periodic steady state of the edge train through the cascade, in closed
    // form: sum_{n>=0} h(age + nT) = Re sum_k r_k e^{p_k age} / (1 - e^{p_k T}).
    const auto modes = resp.impulse_modes();
    std::vector<std::complex<double>> geom(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) {
      geom[k] = modes[k].coeff / (1.0 - std::exp(modes[k].rate * period));
    }
    const double edge_norm = scale / resp.peak();
    auto periodic_edge = [&](double age) {
      std::complex<double> acc = 0.0;
      for (std::size_t k = 0; k < modes.size(); ++k) {
        acc += geom[k] * std::exp(modes[k].rate * age);
      }
      return acc.real();
    };
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) * dt;
      double age_r = std::fmod(t - t_rise, period);
      if (age_r < 0.0) age_r += period;
      double age_f = std::fmod(t - t_fall, period);
      if (age_f < 0.0) age_f += period;
      wave[i] = edge_norm * (periodic_edge(age_r) - periodic_edge(age_f));
    }
  }

  // AC coupling: the steady-state output of a series capacitor has zero mean
  // over one period. Removing the sample mean pins the discrete sum at zero.
  double mean = 0.0;
  for (double v : wave) mean += v;
  mean /= n;
  for (double& v : wave) v -= mean;
  return wave;
}

std::vector<double> avalanche_pulse_window(const GateConfig& gate,
                                           const DeviceProfile& device,
                                           double onset_fraction,
                                           double amplitude_v,
                                           std::int64_t first_sample,
                                           int n_samples) {
  gate.validate();
  if (!(onset_fraction >= 0.0 && onset_fraction < 1.0)) {
    throw ConfigError("avalanche onset_fraction must be in [0, 1)");
  }
  std::vector<double> out(n_samples, 0.0);
  if (amplitude_v == 0.0) return out;
  const LinearResponse resp{device.transfer_poles};
  const auto modes = resp.exp_pulse_modes(amplitude_v, device.avalanche_decay_s);
  const double dt = gate.sample_dt_s();
  const double t_on = onset_fraction * gate.period_s();
  for (int i = 0; i < n_samples; ++i) {
    const double t = (static_cast<double>(first_sample + i) + 0.5) * dt - t_on;
    out[i] = eval_modes(modes, t);
  }
  return out;
}

std::vector<double> avalanche_pulse(const GateConfig& gate,
                                    const DeviceProfile& device,
                                    double onset_fraction, double amplitude_v) {
  return avalanche_pulse_window(gate, device, onset_fraction, amplitude_v, 0,
                                gate.samples_per_gate);
}

DeviceProfile apply_device_variation(const DeviceProfile& base, std::uint64_t seed) {
  if (!(base.variation_fraction >= 0.0)) {
    throw ConfigError("variation_fraction must be >= 0");
  }
  DeviceProfile out = base;
  CounterRng rng(seed, 0, kTagVariation);
  auto perturb = [&](double value) {
    const double u = rng.next_uniform(-base.variation_fraction, base.variation_fraction);
    return value * (1.0 + u);
  };
  out.feedthrough_gain = perturb(out.feedthrough_gain);
  for (auto& pole : out.transfer_poles) {
    pole.frequency_hz = perturb(pole.frequency_hz);
    pole.damping = perturb(pole.damping);
  }
  return out;
}

std::uint16_t quantize_sample(double volts, const AdcConfig& adc) {
  const int max_code = adc.max_code();
  const double scaled = (volts - adc.offset_v) / adc.full_scale_v * max_code;
  const long long code = std::llround(scaled);
  if (code < 0) return 0;
  if (code > max_code) return static_cast<std::uint16_t>(max_code);
  return static_cast<std::uint16_t>(code);
}

std::vector<std::uint16_t> quantize(std::span<const double> analog, const AdcConfig& adc) {
  adc.validate();
  std::vector<std::uint16_t> out(analog.size());
  for (std::size_t i = 0; i < analog.size(); ++i) {
    out[i] = quantize_sample(analog[i], adc);
  }
  return out;
}

ChannelTimeline build_event_timeline(const Scenario& scenario, int channel) {
  const DeviceProfile& dev = scenario.devices[channel];
  const double period = scenario.gate.period_s();
  const double ap_decay = std::exp(-period / dev.afterpulse_tau_s);
  const double onset_lo = scenario.gate.gate_start_s() / period;
  const double onset_hi = onset_lo + scenario.gate.gate_width_s / period;

  ChannelTimeline tl;
  tl.truth.resize(scenario.n_gates);
  double ap_memory = 0.0;  // sum of exp(-dt/tau) over prior avalanches

  for (std::uint64_t g = 0; g < scenario.n_gates; ++g) {
    CounterRng rng(scenario.seed, g, kTagEvents + static_cast<std::uint32_t>(channel));
    const bool lit = scenario.illumination.lit(g);
    std::uint32_t photons = 0;
    if (lit) {
      photons = scenario.illumination.mu_gate > 0.0
                    ? rng.next_poisson(scenario.illumination.mu_gate)
                    : 1;
    }
    // Each photon triggers independently, so n photons fire the diode with
    // probability 1 - (1 - eta)^n.
    const double p_photon = photons == 0
                                ? 0.0
                                : 1.0 - std::pow(1.0 - dev.efficiency_eta,
                                                 static_cast<double>(photons));
    const double p_after = std::clamp(dev.afterpulse_prob * ap_memory, 0.0, 1.0);

    const bool fired_photon = rng.next_bernoulli(p_photon);
    const bool fired_dark = rng.next_bernoulli(dev.dark_prob_per_gate);
    const bool fired_after = rng.next_bernoulli(p_after);

    GateTruth& truth = tl.truth[g];
    truth.gate_index = g;
    truth.photon_present = photons > 0;
    truth.avalanche = fired_photon || fired_dark || fired_after;
    if (fired_photon) {
      truth.cause = AvalancheCause::Photon;
    } else if (fired_dark) {
      truth.cause = AvalancheCause::Dark;
    } else if (fired_after) {
      truth.cause = AvalancheCause::Afterpulse;
    }

    if (truth.avalanche) {
      const double amplitude =
          std::max(0.0, rng.next_normal(dev.avalanche_amp_mean_v, dev.avalanche_amp_sigma_v));
      const double onset = rng.next_uniform(onset_lo, onset_hi);
      tl.events.push_back({g, onset, amplitude, truth.cause});
    }
    ap_memory = (ap_memory + (truth.avalanche ? 1.0 : 0.0)) * ap_decay;
  }
  return tl;
}

FrameRenderer::FrameRenderer(const Scenario& scenario,
                             std::span<const ChannelTimeline> timelines)
    : scenario_(scenario), timelines_(timelines) {
  const int n_ch = scenario.n_channels();
  const double period = scenario.gate.period_s();
  responses_.reserve(n_ch);
  for (int c = 0; c < n_ch; ++c) {
    const DeviceProfile& dev = scenario.devices[c];
    responses_.emplace_back(dev.transfer_poles);
    unit_pulse_modes_.push_back(
        responses_[c].exp_pulse_modes(1.0, dev.avalanche_decay_s));
    feedthrough_.push_back(gate_feedthrough_waveform(scenario.gate, dev));

    double slowest = dev.avalanche_decay_s;
    if (!responses_[c].identity()) {
      slowest = std::max(slowest, responses_[c].slowest_decay_s());
    }
    // ln(1e12) decay lengths keeps truncated tails below 1e-12 relative.
    horizons_.push_back(
        static_cast<std::uint64_t>(std::ceil(27.7 * slowest / period)) + 1);

    // Index of the first event at or after each gate, for tail scans.
    const auto& events = timelines[c].events;
    std::vector<std::size_t> start(scenario.n_gates + 2, events.size());
    std::size_t e = 0;
    for (std::uint64_t g = 0; g <= scenario.n_gates; ++g) {
      while (e < events.size() && events[e].gate_index < g) ++e;
      start[g] = e;
    }
    start[scenario.n_gates + 1] = events.size();
    event_start_.push_back(std::move(start));
  }
}

void FrameRenderer::add_events(int source_channel, std::uint64_t gate_index,
                               double scale, std::span<double> out) const {
  const auto& events = timelines_[source_channel].events;
  const auto& start = event_start_[source_channel];
  const std::uint64_t horizon = horizons_[source_channel];
  const std::uint64_t first_gate = gate_index > horizon ? gate_index - horizon : 0;
  const std::size_t e_lo = start[first_gate];
  const std::size_t e_hi = start[gate_index + 1];

  const double period = scenario_.gate.period_s();
  const double dt = scenario_.gate.sample_dt_s();
  const int n = scenario_.gate.samples_per_gate;
  const auto& modes = unit_pulse_modes_[source_channel];

  for (std::size_t e = e_lo; e < e_hi; ++e) {
    const GateEvent& ev = events[e];
    const double amp = ev.amplitude_v * scale;
    if (amp == 0.0) continue;
    const double frame_offset =
        static_cast<double>(gate_index - ev.gate_index) * period;
    const double t0 = frame_offset + 0.5 * dt - ev.onset_fraction * period;
    // t0 may be negative only within the event's own gate.
    int i = 0;
    if (t0 < 0.0) {
      i = static_cast<int>(std::ceil(-t0 / dt));
      if (i >= n) continue;
    }
    for (const auto& m : modes) {
      const std::complex<double> step = std::exp(m.rate * dt);
      std::complex<double> term =
          amp * m.coeff * std::exp(m.rate * (t0 + i * dt));
      for (int j = i; j < n; ++j) {
        out[j] += term.real();
        term *= step;
      }
    }
  }
}

void FrameRenderer::render(int channel, std::uint64_t gate_index,
                           std::span<double> out) const {
  const auto& ft = feedthrough_[channel];
  std::copy(ft.begin(), ft.end(), out.begin());
  add_events(channel, gate_index, 1.0, out);
  // Electrical crosstalk: the receiving device picks up a scaled copy of the
  // other channel's avalanche waveform.
  const double chi = scenario_.devices[channel].crosstalk_chi;
  if (chi > 0.0 && scenario_.n_channels() == 2) {
    add_events(1 - channel, gate_index, chi, out);
  }
  if (scenario_.noise_sigma_v > 0.0) {
    CounterRng rng(scenario_.seed, gate_index,
                   kTagNoise + static_cast<std::uint32_t>(channel));
    for (auto& v : out) v += rng.next_normal(0.0, scenario_.noise_sigma_v);
  }
}

SimulationResult simulate_gate_train(const Scenario& scenario, int threads) {
  scenario.validate();
  const int n_ch = scenario.n_channels();
  const int spg = scenario.gate.samples_per_gate;

  std::vector<ChannelTimeline> timelines;
  timelines.reserve(n_ch);
  for (int c = 0; c < n_ch; ++c) {
    timelines.push_back(build_event_timeline(scenario, c));
  }
  FrameRenderer renderer(scenario, timelines);

  SimulationResult result;
  result.frames.resize(n_ch);
  for (int c = 0; c < n_ch; ++c) {
    result.frames[c].samples_per_gate = spg;
    result.frames[c].bits = scenario.adc.bits;
    result.frames[c].codes.resize(scenario.n_gates * spg);
  }

  parallel_for(scenario.n_gates, threads, [&](std::uint64_t g) {
    thread_local std::vector<double> scratch;
    scratch.resize(spg);
    for (int c = 0; c < n_ch; ++c) {
      renderer.render(c, g, scratch);
      std::uint16_t* codes = result.frames[c].codes.data() + g * spg;
      for (int i = 0; i < spg; ++i) {
        codes[i] = quantize_sample(scratch[i], scenario.adc);
      }
    }
  });

  for (int c = 0; c < n_ch; ++c) {
    result.truth.push_back(std::move(timelines[c].truth));
  }
  return result;
}

}  // namespace spadsim
