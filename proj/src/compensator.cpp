#include "spadsim/compensator.hpp"

#include <algorithm>
#include <cmath>

#include "spadsim/errors.hpp"

namespace spadsim {

namespace {
// EMA weight for the noise estimate; smooths the 16-sample MAD without
// letting a stale estimate linger much past a window.
constexpr double kSigmaEmaAlpha = 1.0 / 16.0;
constexpr double kMadToSigma = 1.4826;  // normal-consistent MAD scale

double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const auto lower = std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + *lower);
  }
  return m;
}
}  // namespace

void CompensatorConfig::validate() const {
  if (window_n < 1) throw ConfigError("window_n must be >= 1");
  if (!(timing_start >= 0.0 && timing_start < timing_end && timing_end <= 1.0)) {
    throw ConfigError("timing_window must satisfy 0 <= start < end <= 1");
  }
  if (!(v_th >= 0.0)) throw ConfigError("v_th must be >= 0");
  if (!(guard_multiplier >= 0.0)) throw ConfigError("guard_multiplier must be >= 0");
}

Compensator::Compensator(const CompensatorConfig& config, const AdcConfig& adc,
                         int samples_per_gate)
    : config_(config), adc_(adc), samples_per_gate_(samples_per_gate) {
  config_.validate();
  adc_.validate();
  if (samples_per_gate < 1) throw ConfigError("samples_per_gate must be >= 1");
  // Samples sit at bin centers (i + 0.5)/n of the period.
  window_lo_ = static_cast<int>(std::ceil(config.timing_start * samples_per_gate - 0.5));
  window_hi_ = static_cast<int>(std::floor(config.timing_end * samples_per_gate - 0.5));
  window_lo_ = std::max(window_lo_, 0);
  window_hi_ = std::min(window_hi_, samples_per_gate - 1);
  if (window_lo_ > window_hi_) {
    throw ConfigError("timing_window selects no samples at this samples_per_gate");
  }
  template_.assign(samples_per_gate, 0.0);
  ring_.assign(static_cast<std::size_t>(config_.window_n) * samples_per_gate, 0.0);
  ring_sum_.assign(samples_per_gate, 0.0);
  scratch_.resize(samples_per_gate);
}

void Compensator::compensate(std::span<const std::uint16_t> frame,
                             std::span<double> residual) const {
  if (frame.size() != static_cast<std::size_t>(samples_per_gate_) ||
      residual.size() != frame.size()) {
    throw std::invalid_argument("frame length does not match template length");
  }
  for (int i = 0; i < samples_per_gate_; ++i) {
    residual[i] = dequantize(frame[i]) - template_[i];
  }
}

Decision Compensator::discriminate(std::span<const double> residual,
                                   std::uint64_t gate_index, int channel) const {
  if (residual.size() != static_cast<std::size_t>(samples_per_gate_)) {
    throw std::invalid_argument("residual length does not match template length");
  }
  Decision d;
  d.gate_index = gate_index;
  d.channel = channel;
  d.peak_sample = window_lo_;
  d.peak_v = residual[window_lo_];
  for (int i = window_lo_ + 1; i <= window_hi_; ++i) {
    if (residual[i] > d.peak_v) {
      d.peak_v = residual[i];
      d.peak_sample = i;
    }
  }
  d.click = d.peak_v > config_.v_th;
  d.withheld = in_warmup();
  return d;
}

void Compensator::update_template(std::span<const std::uint16_t> frame) {
  if (frame.size() != static_cast<std::size_t>(samples_per_gate_)) {
    throw std::invalid_argument("frame length does not match template length");
  }
  const bool warmup = in_warmup();
  ++frames_seen_;

  auto& volts = scratch_;
  double peak = -1e300;
  for (int i = 0; i < samples_per_gate_; ++i) {
    volts[i] = dequantize(frame[i]);
    peak = std::max(peak, volts[i] - template_[i]);
  }
  if (!warmup && have_sigma_ &&
      peak > config_.guard_multiplier * noise_sigma_est_) {
    return;  // avalanche-bearing frame; keep it out of the average
  }

  // Robust per-frame noise scale from the residual's MAD, EMA-smoothed.
  auto& dev = dev_scratch_;
  dev.resize(static_cast<std::size_t>(samples_per_gate_));
  for (int i = 0; i < samples_per_gate_; ++i) dev[i] = volts[i] - template_[i];
  const double med = median_inplace(dev);
  for (double& x : dev) x = std::abs(x - med);
  const double sigma_frame = kMadToSigma * median_inplace(dev);
  if (!have_sigma_) {
    noise_sigma_est_ = sigma_frame;
    have_sigma_ = true;
  } else {
    noise_sigma_est_ += kSigmaEmaAlpha * (sigma_frame - noise_sigma_est_);
  }

  double* slot = ring_.data() + static_cast<std::size_t>(ring_next_) * samples_per_gate_;
  if (ring_fill_ < config_.window_n) {
    for (int i = 0; i < samples_per_gate_; ++i) {
      ring_sum_[i] += volts[i];
      slot[i] = volts[i];
    }
    ++ring_fill_;
  } else {
    for (int i = 0; i < samples_per_gate_; ++i) {
      ring_sum_[i] += volts[i] - slot[i];
      slot[i] = volts[i];
    }
  }
  ring_next_ = (ring_next_ + 1) % config_.window_n;
  ++accepted_count_;
  // Periodic exact recomputation bounds running-sum drift.
  if (accepted_count_ % static_cast<std::uint64_t>(config_.window_n) == 0) {
    recompute_sum();
  }
  const double inv = 1.0 / ring_fill_;
  for (int i = 0; i < samples_per_gate_; ++i) template_[i] = ring_sum_[i] * inv;
}

void Compensator::recompute_sum() {
  std::fill(ring_sum_.begin(), ring_sum_.end(), 0.0);
  for (int r = 0; r < ring_fill_; ++r) {
    const double* row = ring_.data() + static_cast<std::size_t>(r) * samples_per_gate_;
    for (int i = 0; i < samples_per_gate_; ++i) ring_sum_[i] += row[i];
  }
}

std::vector<double> Compensator::ring_mean() const {
  std::vector<double> mean(samples_per_gate_, 0.0);
  if (ring_fill_ == 0) return mean;
  for (int r = 0; r < ring_fill_; ++r) {
    const double* row = ring_.data() + static_cast<std::size_t>(r) * samples_per_gate_;
    for (int i = 0; i < samples_per_gate_; ++i) mean[i] += row[i];
  }
  for (double& v : mean) v /= ring_fill_;
  return mean;
}

Decision Compensator::process_frame(std::span<const std::uint16_t> frame,
                                    std::uint64_t gate_index, int channel) {
  thread_local std::vector<double> residual;
  residual.resize(samples_per_gate_);
  compensate(frame, residual);
  Decision d = discriminate(residual, gate_index, channel);
  update_template(frame);
  return d;
}

Compensator init_compensator(const CompensatorConfig& config, const AdcConfig& adc,
                             int samples_per_gate) {
  return Compensator(config, adc, samples_per_gate);
}

std::vector<Decision> process_stream(const FrameStream& frames,
                                     const CompensatorConfig& config,
                                     const AdcConfig& adc, int channel,
                                     Compensator* final_state) {
  Compensator comp(config, adc, frames.samples_per_gate);
  std::vector<Decision> decisions;
  decisions.reserve(frames.n_gates());
  for (std::uint64_t g = 0; g < frames.n_gates(); ++g) {
    decisions.push_back(comp.process_frame(frames.frame(g), g, channel));
  }
  if (final_state) *final_state = comp;
  return decisions;
}

}  // namespace spadsim
