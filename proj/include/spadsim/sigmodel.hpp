#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spadsim/response.hpp"

namespace spadsim {

/// Gate-pulse timing. One gate period is the unit of streaming work.
struct GateConfig {
  double repetition_hz = 1e9;
  double gate_amplitude_v = 2.0;
  double gate_width_s = 0.5e-9;
  int samples_per_gate = 16;

  double period_s() const { return 1.0 / repetition_hz; }
  double sample_dt_s() const { return period_s() / samples_per_gate; }
  /// The gate-open window is centered in the period so that avalanche peaks
  /// fall inside the default discrimination timing window.
  double gate_start_s() const { return 0.5 * (period_s() - gate_width_s); }
  void validate() const;
};

/// Per-APD physical parameters. Defaults describe the simulated dual-APD
/// module: ~1 A/W responsivity, -3 dB near 3 GHz, gated avalanche statistics.
struct DeviceProfile {
  double responsivity_a_per_w = 1.03;
  double feedthrough_gain = 0.05;  // gate-edge peak coupled into the output, per unit gate amplitude
  std::vector<PolePair> transfer_poles = {{3e9, 0.7}};
  double variation_fraction = 0.0;
  double avalanche_amp_mean_v = 0.5;
  double avalanche_amp_sigma_v = 0.1;
  // Short enough that a late-onset tail decays below typical thresholds
  // before the next gate's timing window opens.
  double avalanche_decay_s = 0.15e-9;
  double efficiency_eta = 0.1;
  double dark_prob_per_gate = 1e-3;
  double afterpulse_prob = 0.0;
  double afterpulse_tau_s = 5e-9;
  double crosstalk_chi = 0.0;

  void validate(double responsivity_lo = 0.5, double responsivity_hi = 2.0) const;
};

/// Uniform quantizer: codes span [offset_v, offset_v + full_scale_v].
struct AdcConfig {
  int bits = 8;
  double full_scale_v = 2.0;
  double offset_v = -1.0;

  int max_code() const { return (1 << bits) - 1; }
  double lsb_v() const { return full_scale_v / max_code(); }
  double to_volts(std::uint16_t code) const {
    return offset_v + full_scale_v * static_cast<double>(code) / max_code();
  }
  void validate() const;
};

enum class IlluminationPattern { AllLit, AllDark, Alternating, Poisson };

/// Which gates carry light, and with what photon statistics. Lit gates carry
/// exactly one photon unless mu_gate > 0, in which case the photon number is
/// Poisson(mu_gate). The Poisson pattern illuminates every gate.
struct Illumination {
  IlluminationPattern pattern = IlluminationPattern::Alternating;
  double mu_gate = 0.0;

  bool lit(std::uint64_t gate_index) const {
    switch (pattern) {
      case IlluminationPattern::AllLit:
      case IlluminationPattern::Poisson:
        return true;
      case IlluminationPattern::AllDark:
        return false;
      case IlluminationPattern::Alternating:
        return (gate_index % 2) == 0;
    }
    return false;
  }
};

/// Full experiment description; the unit of reproducibility. Identical
/// scenarios (including seed) produce bit-identical streams.
struct Scenario {
  GateConfig gate;
  std::vector<DeviceProfile> devices = {DeviceProfile{}};
  AdcConfig adc;
  Illumination illumination;
  double noise_sigma_v = 0.005;
  std::uint64_t n_gates = 1;
  std::uint64_t seed = 1;

  int n_channels() const { return static_cast<int>(devices.size()); }
  void validate() const;
};

enum class AvalancheCause : std::uint8_t { None = 0, Photon, Dark, Afterpulse, Crosstalk };

const char* to_string(AvalancheCause cause);
std::optional<AvalancheCause> cause_from_string(const std::string& name);

/// Oracle labels for one gate of one channel.
struct GateTruth {
  std::uint64_t gate_index = 0;
  bool photon_present = false;
  bool avalanche = false;
  AvalancheCause cause = AvalancheCause::None;
};

/// One realized avalanche. onset_fraction is measured from the gate start in
/// units of the gate period.
struct GateEvent {
  std::uint64_t gate_index = 0;
  double onset_fraction = 0.0;
  double amplitude_v = 0.0;
  AvalancheCause cause = AvalancheCause::None;
};

/// One gate period of quantized ADC codes.
struct SampledFrame {
  std::uint64_t gate_index = 0;
  int channel = 0;
  std::vector<std::uint16_t> samples;
};

/// Flat storage for a per-channel stream of frames.
struct FrameStream {
  int samples_per_gate = 0;
  int bits = 0;
  std::vector<std::uint16_t> codes;

  std::uint64_t n_gates() const {
    return samples_per_gate == 0 ? 0 : codes.size() / samples_per_gate;
  }
  std::span<const std::uint16_t> frame(std::uint64_t gate_index) const {
    return {codes.data() + gate_index * samples_per_gate,
            static_cast<std::size_t>(samples_per_gate)};
  }
  SampledFrame at(std::uint64_t gate_index, int channel = 0) const {
    auto f = frame(gate_index);
    return {gate_index, channel, {f.begin(), f.end()}};
  }
  /// FNV-1a over the raw codes; used to assert stream reuse across sweeps.
  std::uint64_t checksum() const;
};

/// Event draws and truth labels for one channel (pass one of the synthesis).
struct ChannelTimeline {
  std::vector<GateTruth> truth;
  std::vector<GateEvent> events;  // sorted by gate_index
};

struct SimulationResult {
  std::vector<FrameStream> frames;           // per channel
  std::vector<std::vector<GateTruth>> truth;  // per channel
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Deterministic charge-pulse (feedthrough) shape for one gate period, in
/// volts at the ADC sampling instants (bin centers). The gate edges are
/// capacitively coupled through the device's band-limiting response and the
/// periodic steady state is taken, so the shape is identical in every frame
/// and has exactly zero net area (AC coupling).
std::vector<double> gate_feedthrough_waveform(const GateConfig& gate,
                                              const DeviceProfile& device);

/// Band-limited fast-rise / exponential-decay avalanche waveform sampled at
/// bin centers, for `n_samples` starting `first_sample` periods*samples after
/// the owning gate's start. The tail beyond one gate period is obtained by
/// asking for later sample windows.
std::vector<double> avalanche_pulse_window(const GateConfig& gate,
                                           const DeviceProfile& device,
                                           double onset_fraction,
                                           double amplitude_v,
                                           std::int64_t first_sample,
                                           int n_samples);

/// In-frame part of the avalanche pulse (first gate period).
std::vector<double> avalanche_pulse(const GateConfig& gate,
                                    const DeviceProfile& device,
                                    double onset_fraction, double amplitude_v);

/// Returns a copy of `base` with each transfer parameter (pole frequency and
/// damping) and feedthrough_gain multiplied by (1 + u), u uniform in
/// [-variation_fraction, +variation_fraction], deterministic in `seed`.
DeviceProfile apply_device_variation(const DeviceProfile& base, std::uint64_t seed);

/// Round-to-nearest quantization with clamping to the code range.
std::uint16_t quantize_sample(double volts, const AdcConfig& adc);
std::vector<std::uint16_t> quantize(std::span<const double> analog, const AdcConfig& adc);

/// Pass one: realize photon/dark/afterpulse draws per gate for one channel.
/// Sequential in gate order (afterpulse memory), deterministic in the seed.
ChannelTimeline build_event_timeline(const Scenario& scenario, int channel);

/// Analog frame for one gate of one channel given the realized timelines of
/// all channels: feedthrough + avalanche pulses (with carried-over tails) +
/// crosstalk + white noise. Pure in (scenario, gate_index), so frames may be
/// rendered in any order or in parallel.
class FrameRenderer {
 public:
  FrameRenderer(const Scenario& scenario, std::span<const ChannelTimeline> timelines);

  void render(int channel, std::uint64_t gate_index, std::span<double> out) const;

  /// Gates a pulse tail can reach before falling below 1e-12 of its amplitude.
  std::uint64_t tail_horizon_gates(int channel) const { return horizons_[channel]; }

  const std::vector<double>& feedthrough(int channel) const {
    return feedthrough_[channel];
  }

 private:
  void add_events(int source_channel, std::uint64_t gate_index, double scale,
                  std::span<double> out) const;

  const Scenario& scenario_;
  std::span<const ChannelTimeline> timelines_;
  std::vector<LinearResponse> responses_;
  std::vector<std::vector<ExpMode>> unit_pulse_modes_;  // amplitude 1 V
  std::vector<std::vector<double>> feedthrough_;
  std::vector<std::uint64_t> horizons_;
  std::vector<std::vector<std::size_t>> event_start_;  // per channel, per gate
};

/// Full synthesis: timelines, rendering, quantization. Deterministic for a
/// fixed scenario regardless of `threads`.
SimulationResult simulate_gate_train(const Scenario& scenario, int threads = 1);

}  // namespace spadsim
