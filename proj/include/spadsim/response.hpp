#pragma once

#include <complex>
#include <span>
#include <vector>

namespace spadsim {

/// One second-order low-pass section: natural frequency and damping ratio.
struct PolePair {
  double frequency_hz = 3e9;
  double damping = 0.7;
};

/// A term of a modal expansion: contributes Re(coeff * exp(rate * t)).
struct ExpMode {
  std::complex<double> coeff;
  std::complex<double> rate;
};

/// Evaluates Re(sum coeff_k exp(rate_k t)) for t >= 0, else 0.
double eval_modes(std::span<const ExpMode> modes, double t_s);

/// Cascade of unit-DC-gain two-pole low-pass sections, represented in closed
/// form by partial fractions over its (distinct) complex poles. An empty
/// cascade is the identity (no band-limiting).
class LinearResponse {
 public:
  explicit LinearResponse(std::span<const PolePair> poles);

  bool identity() const { return modes_.empty(); }

  /// Impulse response h(t); unit DC gain (integral of h over [0,inf) is 1).
  double impulse(double t_s) const { return eval_modes(modes_, t_s); }

  /// max_t h(t), used to normalize edge responses. 0 for the identity.
  double peak() const { return peak_; }

  /// Time constant of the slowest decaying mode, for tail-horizon bounds.
  double slowest_decay_s() const { return slowest_decay_s_; }

  /// Modal form of the response to amplitude * exp(-t/tau_s) * u(t).
  /// For the identity cascade this is the single input mode itself.
  std::vector<ExpMode> exp_pulse_modes(double amplitude, double tau_s) const;

  std::span<const ExpMode> impulse_modes() const { return modes_; }

 private:
  std::vector<ExpMode> modes_;          // partial fractions of H(s)
  std::vector<std::complex<double>> poles_;
  double numerator_ = 1.0;              // prod omega0^2
  double peak_ = 0.0;
  double slowest_decay_s_ = 0.0;
};

}  // namespace spadsim
