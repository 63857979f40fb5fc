#pragma once

namespace spadsim {

/// Source/channel/detector parameters feeding the BB84 gain/QBER model.
struct KeyRateParams {
  double mu = 0.1;              // mean photon number per pulse
  double channel_loss_db = 10;  // total link loss including receiver
  double eta_det = 0.1;         // detector efficiency
  double p_dk = 1e-5;           // dark count probability per gate per detector
  double e_det = 0.01;          // intrinsic misalignment error
  double sift_q = 0.5;          // sifting factor
  double f_ec = 1.0;            // error-correction inefficiency (1 = ideal)

  void validate() const;
};

struct GainQber {
  double gain = 0.0;  // Q: detection probability per transmitted pulse
  double qber = 0.0;  // E: error rate of detected pulses
};

/// H2(e) = -e log2 e - (1-e) log2(1-e); H2(0) = H2(1) = 0.
/// Throws std::domain_error outside [0, 1].
double binary_entropy(double e);

/// Weak-coherent two-detector receiver model:
///   t = eta_det 10^(-loss/10), p_sig = 1 - exp(-mu t),
///   Q = 1 - (1 - p_sig)(1 - 2 p_dk),
///   E = (e_det p_sig + 0.5 (Q - p_sig)) / Q.
/// Signal clicks err with probability e_det; the dark-driven remainder errs
/// half the time. Throws ConfigError when Q = 0 (E undefined).
GainQber gain_and_qber(const KeyRateParams& p);

/// Shor-Preskill secret fraction: R = max(0, sift_q Q (1 - f_ec H2(E) - H2(E))).
double shor_preskill_rate(double gain, double qber, double sift_q = 0.5,
                          double f_ec = 1.0);

double shor_preskill_rate(const KeyRateParams& p);

/// R(p_dk / reduction_factor) / R(p_dk), all else fixed. Throws ConfigError
/// when the baseline produces no key.
double dark_count_gain(const KeyRateParams& p, double reduction_factor = 10.0);

}  // namespace spadsim
