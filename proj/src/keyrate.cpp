#include "spadsim/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spadsim/errors.hpp"

namespace spadsim {

void KeyRateParams::validate() const {
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  if (!(channel_loss_db >= 0.0)) throw ConfigError("channel_loss_db must be >= 0");
  if (!(eta_det >= 0.0 && eta_det <= 1.0)) throw ConfigError("eta_det must be in [0, 1]");
  if (!(p_dk >= 0.0 && p_dk <= 1.0)) throw ConfigError("p_dk must be in [0, 1]");
  if (!(e_det >= 0.0 && e_det <= 1.0)) throw ConfigError("e_det must be in [0, 1]");
  if (!(sift_q > 0.0 && sift_q <= 1.0)) throw ConfigError("sift_q must be in (0, 1]");
  if (!(f_ec >= 1.0)) throw ConfigError("f_ec must be >= 1");
}

double binary_entropy(double e) {
  if (!(e >= 0.0 && e <= 1.0)) {
    throw std::domain_error("binary_entropy argument must be in [0, 1]");
  }
  if (e == 0.0 || e == 1.0) return 0.0;
  return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

GainQber gain_and_qber(const KeyRateParams& p) {
  p.validate();
  const double t = p.eta_det * std::pow(10.0, -p.channel_loss_db / 10.0);
  const double p_sig = 1.0 - std::exp(-p.mu * t);
  const double dark_pair = std::min(1.0, 2.0 * p.p_dk);
  GainQber r;
  r.gain = std::clamp(1.0 - (1.0 - p_sig) * (1.0 - dark_pair), 0.0, 1.0);
  if (r.gain <= 0.0) {
    throw ConfigError("gain is zero; QBER undefined for these parameters");
  }
  r.qber = (p.e_det * p_sig + 0.5 * (r.gain - p_sig)) / r.gain;
  r.qber = std::clamp(r.qber, 0.0, 0.5);
  return r;
}

double shor_preskill_rate(double gain, double qber, double sift_q, double f_ec) {
  if (!(gain >= 0.0 && gain <= 1.0)) throw ConfigError("gain must be in [0, 1]");
  if (!(qber >= 0.0 && qber <= 1.0)) throw ConfigError("qber must be in [0, 1]");
  if (!(f_ec >= 1.0)) throw ConfigError("f_ec must be >= 1");
  const double h = binary_entropy(qber);
  return std::max(0.0, sift_q * gain * (1.0 - f_ec * h - h));
}

double shor_preskill_rate(const KeyRateParams& p) {
  const GainQber gq = gain_and_qber(p);
  return shor_preskill_rate(gq.gain, gq.qber, p.sift_q, p.f_ec);
}

double dark_count_gain(const KeyRateParams& p, double reduction_factor) {
  if (!(reduction_factor >= 1.0)) {
    throw ConfigError("reduction_factor must be >= 1");
  }
  const double baseline = shor_preskill_rate(p);
  if (!(baseline > 0.0)) {
    throw ConfigError("baseline regime produces no key");
  }
  KeyRateParams improved = p;
  improved.p_dk = p.p_dk / reduction_factor;
  return shor_preskill_rate(improved) / baseline;
}

}  // namespace spadsim
