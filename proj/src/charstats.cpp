#include "spadsim/charstats.hpp"

#include <algorithm>
#include <cmath>

#include "spadsim/errors.hpp"
#include "spadsim/parallel.hpp"

namespace spadsim {

ProportionCi wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  ProportionCi ci;
  if (trials == 0) return ci;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  ci.p = p;
  ci.lo = successes == 0 ? 0.0 : std::max(0.0, (center - spread) / denom);
  ci.hi = successes == trials ? 1.0 : std::min(1.0, (center + spread) / denom);
  return ci;
}

SweepRow count_statistics(std::span<const Decision> decisions,
                          const Illumination& illumination, double v_th_label,
                          std::optional<double> poisson_mu) {
  SweepRow row;
  row.v_th = v_th_label;
  for (const Decision& d : decisions) {
    if (d.withheld) continue;
    if (illumination.lit(d.gate_index)) {
      ++row.gates_lit;
      if (d.click) ++row.clicks_lit;
    } else {
      ++row.gates_dark;
      if (d.click) ++row.clicks_dark;
    }
  }
  if (row.gates_lit == 0 || row.gates_dark == 0) {
    throw InsufficientDataError(
        "count_statistics needs at least one lit and one dark gate after warm-up");
  }
  const ProportionCi lit = wilson_interval(row.clicks_lit, row.gates_lit);
  const ProportionCi dark = wilson_interval(row.clicks_dark, row.gates_dark);
  row.p_pd = lit.p;
  row.p_pd_ci_lo = lit.lo;
  row.p_pd_ci_hi = lit.hi;
  row.p_dk = dark.p;
  row.p_dk_ci_lo = dark.lo;
  row.p_dk_ci_hi = dark.hi;
  if (poisson_mu && *poisson_mu > 0.0) {
    // With Poisson(mu) photons, P(no click | lit) = (1 - p_dk) e^{-mu eta},
    // so eta = -ln((1 - p_lit)/(1 - p_dk)) / mu.
    const double num = 1.0 - row.p_pd;
    const double den = 1.0 - row.p_dk;
    if (num > 0.0 && den > 0.0) {
      row.efficiency_est = std::clamp(-std::log(num / den) / *poisson_mu, 0.0, 1.0);
    } else {
      row.efficiency_est = 1.0;
    }
  }
  return row;
}

SweepResult threshold_sweep(const Scenario& scenario,
                            const CompensatorConfig& compensator,
                            std::span<const double> thresholds, int channel,
                            int threads) {
  if (thresholds.empty()) throw ConfigError("threshold sweep needs at least one threshold");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw ConfigError("sweep thresholds must be strictly increasing");
    }
  }
  if (channel < 0 || channel >= scenario.n_channels()) {
    throw ConfigError("sweep channel out of range");
  }

  SimulationResult sim = simulate_gate_train(scenario, threads);
  const FrameStream& frames = sim.frames[channel];

  SweepResult result;
  result.frame_checksum = frames.checksum();
  result.rows.resize(thresholds.size());
  std::optional<double> mu;
  if (scenario.illumination.mu_gate > 0.0) mu = scenario.illumination.mu_gate;

  parallel_for(thresholds.size(), threads, [&](std::uint64_t i) {
    CompensatorConfig cfg = compensator;
    cfg.v_th = thresholds[i];
    const auto decisions = process_stream(frames, cfg, scenario.adc, channel);
    result.rows[i] = count_statistics(decisions, scenario.illumination,
                                      thresholds[i], mu);
  });
  return result;
}

namespace {

// Threshold at which the sweep's p_pd curve (non-increasing in v_th) crosses
// the target, by linear interpolation between the bracketing rows.
struct Crossing {
  double v_th;
  std::size_t left;  // row index with p_pd >= target
};

Crossing find_ppd_crossing(const SweepResult& sweep, double target) {
  const auto& rows = sweep.rows;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double a = rows[i].p_pd;
    const double b = rows[i + 1].p_pd;
    if ((a >= target && b <= target) && a != b) {
      const double t = (a - target) / (a - b);
      return {rows[i].v_th + t * (rows[i + 1].v_th - rows[i].v_th), i};
    }
    if (a == target) return {rows[i].v_th, i};
  }
  if (!rows.empty() && rows.back().p_pd == target) {
    return {rows.back().v_th, rows.size() - 1};
  }
  throw ConfigError("sweep does not bracket the target p_pd");
}

double interp_pdk(const SweepResult& sweep, const Crossing& c) {
  const auto& rows = sweep.rows;
  const auto& l = rows[c.left];
  if (c.left + 1 >= rows.size() || l.v_th == c.v_th) return l.p_dk;
  const auto& r = rows[c.left + 1];
  const double t = (c.v_th - l.v_th) / (r.v_th - l.v_th);
  if (l.p_dk > 0.0 && r.p_dk > 0.0) {
    // Dark counts fall roughly exponentially in v_th; interpolate in log.
    return std::exp((1.0 - t) * std::log(l.p_dk) + t * std::log(r.p_dk));
  }
  return (1.0 - t) * l.p_dk + t * r.p_dk;
}

}  // namespace

double dark_at_matched_efficiency(const SweepResult& sweep_a,
                                  const SweepResult& sweep_b, double target_p_pd) {
  if (!(target_p_pd > 0.0 && target_p_pd < 1.0)) {
    throw ConfigError("target_p_pd must be in (0, 1)");
  }
  const Crossing ca = find_ppd_crossing(sweep_a, target_p_pd);
  const Crossing cb = find_ppd_crossing(sweep_b, target_p_pd);
  const double pdk_a = interp_pdk(sweep_a, ca);
  const double pdk_b = interp_pdk(sweep_b, cb);
  if (!(pdk_b > 0.0)) {
    throw ConfigError("reference sweep has zero dark probability at the matched point");
  }
  return pdk_a / pdk_b;
}

}  // namespace spadsim
