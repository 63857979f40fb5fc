#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spadsim/sigmodel.hpp"

namespace spadsim {

/// Self-training charge-pulse compensator settings. One untouched config is
/// meant to serve any device instance; nothing here is per-device.
struct CompensatorConfig {
  int window_n = 64;       // past cycles averaged into the template
  int warmup_gates = -1;   // decisions withheld during warm-up; -1 = window_n
  double guard_multiplier = 6.0;
  double timing_start = 0.2;  // fraction of the gate period
  double timing_end = 0.9;
  double v_th = 0.05;  // volts on the residual

  int effective_warmup() const { return warmup_gates < 0 ? window_n : warmup_gates; }
  void validate() const;
};

/// Detector output for one gate.
struct Decision {
  std::uint64_t gate_index = 0;
  int channel = 0;
  bool click = false;
  double peak_v = 0.0;
  int peak_sample = 0;
  bool withheld = false;
};

/// Running state of the compensator for one channel: the template (running
/// average of accepted past frames, in volts), the acceptance ring, and the
/// robust noise estimate that drives the update guard.
///
/// Training is continuous: every frame is compensated against the template
/// as it stood *before* that frame, then considered for acceptance. During
/// warm-up every frame is accepted; afterwards frames whose residual peak
/// exceeds guard_multiplier * noise_sigma_est are excluded so avalanches do
/// not contaminate the average. The guard is one-sided on the positive
/// (avalanche) polarity, which lets the template recover even when events
/// were absorbed during warm-up: clean frames then sit *below* the polluted
/// template and keep being accepted, washing the events back out.
class Compensator {
 public:
  Compensator(const CompensatorConfig& config, const AdcConfig& adc,
              int samples_per_gate);

  /// residual = de-quantized frame - template (volts).
  void compensate(std::span<const std::uint16_t> frame, std::span<double> residual) const;

  /// Peak search over the timing window; click iff peak_v > v_th (strict).
  Decision discriminate(std::span<const double> residual, std::uint64_t gate_index,
                        int channel) const;

  /// Acceptance-guarded template update. Counts the frame toward warm-up.
  void update_template(std::span<const std::uint16_t> frame);

  /// compensate -> discriminate -> update_template, in that order, so the
  /// decision for a gate never depends on that gate's own frame.
  Decision process_frame(std::span<const std::uint16_t> frame,
                         std::uint64_t gate_index, int channel);

  const std::vector<double>& tmpl() const { return template_; }
  double noise_sigma_est() const { return noise_sigma_est_; }
  std::uint64_t accepted_count() const { return accepted_count_; }
  std::uint64_t frames_seen() const { return frames_seen_; }
  bool in_warmup() const {
    return frames_seen_ < static_cast<std::uint64_t>(config_.effective_warmup());
  }
  int window_fill() const { return ring_fill_; }
  const CompensatorConfig& config() const { return config_; }

  /// Exact ring mean, recomputed from scratch (drift control and testing).
  std::vector<double> ring_mean() const;

 private:
  double dequantize(std::uint16_t code) const { return adc_.to_volts(code); }
  void recompute_sum();

  CompensatorConfig config_;
  AdcConfig adc_;
  int samples_per_gate_;
  int window_lo_;  // first sample index of the timing window
  int window_hi_;  // last sample index (inclusive)

  std::vector<double> template_;
  std::vector<double> ring_;  // window_n frames, volts
  int ring_fill_ = 0;
  int ring_next_ = 0;
  std::vector<double> ring_sum_;
  std::uint64_t accepted_count_ = 0;
  std::uint64_t frames_seen_ = 0;
  double noise_sigma_est_ = 0.0;
  bool have_sigma_ = false;

  mutable std::vector<double> scratch_;
  std::vector<double> dev_scratch_;
};

/// Convenience constructor matching the operation surface.
Compensator init_compensator(const CompensatorConfig& config, const AdcConfig& adc,
                             int samples_per_gate);

/// Sequential pass over one channel's frames. Decisions come back in gate
/// order; warm-up decisions are flagged withheld. If `final_state` is given
/// the compensator is copied out after the last frame.
std::vector<Decision> process_stream(const FrameStream& frames,
                                     const CompensatorConfig& config,
                                     const AdcConfig& adc, int channel = 0,
                                     Compensator* final_state = nullptr);

}  // namespace spadsim
