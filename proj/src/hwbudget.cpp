#include "spadsim/hwbudget.hpp"

#include <cmath>
#include <complex>

#include "spadsim/errors.hpp"

namespace spadsim {

void RfLinkSpec::validate() const {
  if (!(z0_ohm > 0.0)) throw ConfigError("z0_ohm must be > 0");
  if (!(wire_length_mm >= 0.0)) throw ConfigError("wire_length_mm must be >= 0");
  if (!(wire_inductance_per_mm >= 0.0)) {
    throw ConfigError("wire_inductance_per_mm must be >= 0");
  }
  if (!(shunt_c_f >= 0.0)) throw ConfigError("shunt_c_f must be >= 0");
  if (!(f_max_hz > 0.0)) throw ConfigError("f_max_hz must be > 0");
  if (n_points < 16) throw ConfigError("n_points must be >= 16");
}

double s21_magnitude(const RfLinkSpec& spec, double f_hz) {
  using cd = std::complex<double>;
  const double w = 2.0 * 3.14159265358979323846 * f_hz;
  // ABCD cascade of series L then shunt C.
  const cd zl(0.0, w * spec.total_inductance_h());
  const cd yc(0.0, w * spec.shunt_c_f);
  const cd a = 1.0 + zl * yc;
  const cd b = zl;
  const cd c = yc;
  const cd d = 1.0;
  const cd denom = a + b / spec.z0_ohm + c * spec.z0_ohm + d;
  return std::abs(2.0 / denom);
}

BandwidthResult rf_bandwidth(const RfLinkSpec& spec) {
  spec.validate();
  const double dc = s21_magnitude(spec, 0.0);  // == 1 for this network
  // Half-power convention: |S21| down to 1/sqrt(2) of its DC value, which for
  // the bare series-L link lands exactly at 2 z0 / (2 pi L).
  const double target = dc / std::sqrt(2.0);

  const double df = spec.f_max_hz / spec.n_points;
  double prev_f = 0.0;
  for (int i = 1; i <= spec.n_points; ++i) {
    const double f = i * df;
    if (s21_magnitude(spec, f) <= target) {
      // Bisect the bracketing grid interval.
      double lo = prev_f, hi = f;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (s21_magnitude(spec, mid) <= target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return {0.5 * (lo + hi), false};
    }
    prev_f = f;
  }
  return {spec.f_max_hz, true};
}

LengthResult min_length_for_bandwidth(const RfLinkSpec& spec, double target_hz) {
  spec.validate();
  if (!(target_hz > 0.0)) throw ConfigError("target bandwidth must be > 0");
  if (!(target_hz < spec.f_max_hz)) {
    throw ConfigError("target bandwidth must be below the evaluation ceiling");
  }

  auto bandwidth_at = [&](double length_mm) {
    RfLinkSpec probe = spec;
    probe.wire_length_mm = length_mm;
    return rf_bandwidth(probe);
  };

  // Unattainable even with no wire (e.g. shunt C alone cuts off sooner).
  const BandwidthResult at_zero = bandwidth_at(0.0);
  if (!at_zero.at_ceiling && at_zero.f_3db_hz < target_hz) {
    throw ConfigError("target bandwidth unattainable even at zero wire length");
  }

  // Grow the bracket until the bandwidth falls below target.
  double lo = 0.0;
  double hi = 1.0;
  const double hi_bound = 1e5;  // mm; far beyond any bond wire
  while (hi < hi_bound) {
    const BandwidthResult bw = bandwidth_at(hi);
    if (!bw.at_ceiling && bw.f_3db_hz < target_hz) break;
    lo = hi;
    hi *= 2.0;
  }
  if (hi >= hi_bound) {
    return {hi_bound, true};
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const BandwidthResult bw = bandwidth_at(mid);
    if (!bw.at_ceiling && bw.f_3db_hz < target_hz) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

void WireSpec::validate() const {
  if (count < 1) throw ConfigError("wire count must be >= 1");
  if (!(conductivity_k > 0.0)) throw ConfigError("conductivity_k must be > 0");
  if (!(cross_section_m2 > 0.0)) throw ConfigError("cross_section_m2 must be > 0");
  if (!(length_m > 0.0)) throw ConfigError("wire length_m must be > 0");
}

ThermalResult thermal_flux(const std::vector<WireSpec>& wires, double delta_t_k) {
  if (!(delta_t_k >= 0.0)) throw ConfigError("delta_t_k must be >= 0");
  ThermalResult result;
  result.per_wire_mw.reserve(wires.size());
  for (const WireSpec& w : wires) {
    w.validate();
    // Per-wire conductance first, count last, keeping the count factor a
    // single multiply so linearity in count holds bit-exactly.
    const double unit_mw =
        w.conductivity_k * w.cross_section_m2 * delta_t_k / w.length_m * 1e3;
    const double q_mw = static_cast<double>(w.count) * unit_mw;
    result.per_wire_mw.push_back(q_mw);
    result.total_mw += q_mw;
  }
  return result;
}

BudgetResult budget_check(double flux_mw, double budget_mw) {
  return {flux_mw <= budget_mw, budget_mw - flux_mw};
}

}  // namespace spadsim
