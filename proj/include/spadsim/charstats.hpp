#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "spadsim/compensator.hpp"
#include "spadsim/sigmodel.hpp"

namespace spadsim {

struct ProportionCi {
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion (default 95%).
ProportionCi wilson_interval(std::uint64_t successes, std::uint64_t trials,
                             double z = 1.959963984540054);

/// One operating point of the detection/dark-count characteristic.
struct SweepRow {
  double v_th = 0.0;
  std::uint64_t gates_lit = 0;
  std::uint64_t clicks_lit = 0;
  std::uint64_t gates_dark = 0;
  std::uint64_t clicks_dark = 0;
  double p_pd = 0.0;
  double p_pd_ci_lo = 0.0;
  double p_pd_ci_hi = 0.0;
  double p_dk = 0.0;
  double p_dk_ci_lo = 0.0;
  double p_dk_ci_hi = 0.0;
  /// Poisson-source-corrected efficiency; NaN when no mu was supplied.
  double efficiency_est = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Checksum of the frame stream every row was computed from.
  std::uint64_t frame_checksum = 0;
};

/// Click statistics of one decision stream against the illumination pattern.
/// Withheld decisions are excluded. Throws InsufficientDataError when either
/// gate class is empty.
SweepRow count_statistics(std::span<const Decision> decisions,
                          const Illumination& illumination, double v_th_label,
                          std::optional<double> poisson_mu = std::nullopt);

/// Simulates the scenario once, then processes the identical frame stream at
/// each threshold (strictly increasing). Rows differ only in v_th.
SweepResult threshold_sweep(const Scenario& scenario,
                            const CompensatorConfig& compensator,
                            std::span<const double> thresholds, int channel = 0,
                            int threads = 1);

/// Ratio p_dk_a / p_dk_b at the thresholds where each sweep attains
/// target_p_pd, with p_dk log-linearly interpolated (dark counts span
/// decades). Throws ConfigError when a sweep does not bracket the target.
double dark_at_matched_efficiency(const SweepResult& sweep_a,
                                  const SweepResult& sweep_b, double target_p_pd);

}  // namespace spadsim
