#pragma once

#include <string>
#include <vector>

namespace spadsim {

/// Bond-wire link: source z0 -- series L -- shunt C -- load z0.
struct RfLinkSpec {
  double z0_ohm = 50.0;
  double wire_inductance_per_mm = 1.0e-9;  // henries per mm
  double wire_length_mm = 5.0;
  double shunt_c_f = 0.0;
  double f_max_hz = 20e9;
  int n_points = 2048;

  double total_inductance_h() const { return wire_inductance_per_mm * wire_length_mm; }
  void validate() const;
};

struct BandwidthResult {
  double f_3db_hz = 0.0;
  bool at_ceiling = false;  // no crossing found up to f_max_hz
};

struct LengthResult {
  double length_mm = 0.0;
  bool at_bound = false;  // bisection hit the bracketing bound
};

/// |S21| of the link at frequency f, via cascaded ABCD matrices.
double s21_magnitude(const RfLinkSpec& spec, double f_hz);

/// First frequency where |S21| drops 3 dB below its DC value, located on the
/// evaluation grid and refined by bisection. Returns f_max_hz with
/// at_ceiling set when the response never crosses.
BandwidthResult rf_bandwidth(const RfLinkSpec& spec);

/// Largest wire length whose bandwidth still reaches target_hz (bisection on
/// length, holding everything else in `spec` fixed). Throws ConfigError when
/// the target is unattainable even at zero length; returns the bracketing
/// bound with at_bound set for degenerate (very low) targets.
LengthResult min_length_for_bandwidth(const RfLinkSpec& spec, double target_hz);

/// One class of cryostat wiring, for Fourier-conduction bookkeeping.
struct WireSpec {
  int count = 1;
  double conductivity_k = 315.0;  // W/(m K)
  double cross_section_m2 = 1e-9;
  double length_m = 0.01;
  std::string material = "Au";

  void validate() const;
};

struct ThermalResult {
  double total_mw = 0.0;
  std::vector<double> per_wire_mw;
};

/// q = count k A dT / L per wire class, summed, in milliwatts.
ThermalResult thermal_flux(const std::vector<WireSpec>& wires, double delta_t_k);

struct BudgetResult {
  bool pass = false;
  double margin_mw = 0.0;
};

/// pass iff flux <= budget (inclusive); margin = budget - flux.
BudgetResult budget_check(double flux_mw, double budget_mw = 250.0);

}  // namespace spadsim
