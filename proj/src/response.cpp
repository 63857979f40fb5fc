#include "spadsim/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spadsim/errors.hpp"

namespace spadsim {

double eval_modes(std::span<const ExpMode> modes, double t_s) {
  if (t_s < 0.0) return 0.0;
  std::complex<double> acc = 0.0;
  for (const auto& m : modes) acc += m.coeff * std::exp(m.rate * t_s);
  return acc.real();
}

LinearResponse::LinearResponse(std::span<const PolePair> poles) {
  if (poles.empty()) return;

  for (const auto& pp : poles) {
    if (!(pp.frequency_hz > 0.0)) {
      throw ConfigError("transfer pole frequency must be > 0");
    }
    if (!(pp.damping > 0.0)) {
      throw ConfigError("transfer pole damping must be > 0");
    }
    const double w0 = 2.0 * 3.14159265358979323846 * pp.frequency_hz;
    numerator_ *= w0 * w0;
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(pp.damping * pp.damping - 1.0, 0.0));
    poles_.push_back(w0 * (-pp.damping + disc));
    poles_.push_back(w0 * (-pp.damping - disc));
  }

  // Partial fractions need simple poles; coincident sections would require
  // polynomial residues instead.
  double w_scale = 0.0;
  for (const auto& p : poles_) w_scale = std::max(w_scale, std::abs(p));
  for (std::size_t i = 0; i < poles_.size(); ++i) {
    for (std::size_t j = i + 1; j < poles_.size(); ++j) {
      if (std::abs(poles_[i] - poles_[j]) < 1e-9 * w_scale) {
        throw ConfigError(
            "transfer_poles must be distinct (repeated or critically damped "
            "poles are not supported); perturb frequency or damping");
      }
    }
  }

  modes_.reserve(poles_.size());
  double slowest_rate = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poles_.size(); ++k) {
    std::complex<double> denom = 1.0;
    for (std::size_t j = 0; j < poles_.size(); ++j) {
      if (j != k) denom *= poles_[k] - poles_[j];
    }
    modes_.push_back({numerator_ / denom, poles_[k]});
    slowest_rate = std::min(slowest_rate, -poles_[k].real());
  }
  slowest_decay_s_ = 1.0 / slowest_rate;

  // Dense scan for the impulse-response peak, refined parabolically. The
  // peak sits within a few time constants of the fastest section.
  const double t_end = 12.0 * slowest_decay_s_;
  const int n = 8192;
  const double dt = t_end / n;
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = impulse(i * dt);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i > 0 && best_i < n) {
    const double ym = impulse((best_i - 1) * dt);
    const double y0 = best;
    const double yp = impulse((best_i + 1) * dt);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) {
      const double frac = 0.5 * (ym - yp) / denom;
      best = impulse((best_i + frac) * dt);
    }
  }
  peak_ = best;
}

std::vector<ExpMode> LinearResponse::exp_pulse_modes(double amplitude,
                                                     double tau_s) const {
  if (!(tau_s > 0.0)) throw ConfigError("pulse decay tau must be > 0");
  const std::complex<double> a(-1.0 / tau_s, 0.0);
  if (identity()) {
    return {{std::complex<double>(amplitude, 0.0), a}};
  }
  for (const auto& p : poles_) {
    if (std::abs(p - a) < 1e-9 * std::abs(p)) {
      throw ConfigError(
          "avalanche decay coincides with a transfer pole; choose a distinct "
          "avalanche_decay_s");
    }
  }
  std::vector<ExpMode> out;
  out.reserve(poles_.size() + 1);
  // Residue of the input pole: H(-1/tau).
  std::complex<double> h_at_a = numerator_;
  for (const auto& p : poles_) h_at_a /= (a - p);
  out.push_back({amplitude * h_at_a, a});
  for (std::size_t k = 0; k < poles_.size(); ++k) {
    std::complex<double> denom = poles_[k] - a;
    for (std::size_t j = 0; j < poles_.size(); ++j) {
      if (j != k) denom *= poles_[k] - poles_[j];
    }
    out.push_back({amplitude * numerator_ / denom, poles_[k]});
  }
  return out;
}

}  // namespace spadsim
