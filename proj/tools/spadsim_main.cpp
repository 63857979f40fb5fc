#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spadsim/charstats.hpp"
#include "spadsim/compensator.hpp"
#include "spadsim/config.hpp"
#include "spadsim/errors.hpp"
#include "spadsim/hwbudget.hpp"
#include "spadsim/io.hpp"
#include "spadsim/keyrate.hpp"
#include "spadsim/sigmodel.hpp"

namespace {

using namespace spadsim;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;  // 0 = resolve from env / default 1
};

int resolve_threads(const CommonOpts& opts) {
  if (opts.threads > 0) return opts.threads;
  if (const char* env = std::getenv("SPADSIM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

RunConfig load_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw ConfigError("--config is required");
  RunConfig cfg = run_config_from_file(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output.dir = opts.out_dir;
  if (opts.seed_override) {
    if (cfg.scenario) cfg.scenario->seed = *opts.seed_override;
    if (cfg.sweep && cfg.sweep->scenario_b) {
      cfg.sweep->scenario_b->seed = *opts.seed_override;
    }
  }
  return cfg;
}

const Scenario& require_scenario(const RunConfig& cfg) {
  if (!cfg.scenario) throw ConfigError("config needs a 'scenario' section");
  return *cfg.scenario;
}

const CompensatorConfig& require_compensator(const RunConfig& cfg) {
  if (!cfg.compensator) throw ConfigError("config needs a 'compensator' section");
  return *cfg.compensator;
}

int cmd_simulate(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const Scenario& scenario = require_scenario(cfg);
  const CompensatorConfig& comp = require_compensator(cfg);
  const int threads = resolve_threads(opts);
  const std::filesystem::path out(cfg.output.dir);

  const SimulationResult sim = simulate_gate_train(scenario, threads);

  std::vector<Decision> all_decisions;
  std::uint64_t clicks = 0;
  std::uint64_t avalanches = 0;
  std::vector<std::vector<Decision>> per_channel(scenario.n_channels());
  for (int c = 0; c < scenario.n_channels(); ++c) {
    write_frames(out / ("frames_ch" + std::to_string(c) + ".bin"), sim.frames[c]);
    write_ground_truth_csv(out / ("ground_truth_ch" + std::to_string(c) + ".csv"),
                           sim.truth[c]);
    per_channel[c] = process_stream(sim.frames[c], comp, scenario.adc, c);
    for (const Decision& d : per_channel[c]) {
      if (!d.withheld && d.click) ++clicks;
    }
    for (const GateTruth& t : sim.truth[c]) {
      if (t.avalanche) ++avalanches;
    }
  }
  all_decisions.reserve(scenario.n_gates * scenario.n_channels());
  for (std::uint64_t g = 0; g < scenario.n_gates; ++g) {
    for (int c = 0; c < scenario.n_channels(); ++c) {
      all_decisions.push_back(per_channel[c][g]);
    }
  }
  write_decisions_csv(out / "decisions.csv", all_decisions);

  std::printf("simulated %llu gates x %d channel(s), %llu avalanches, %llu clicks\n",
              static_cast<unsigned long long>(scenario.n_gates), scenario.n_channels(),
              static_cast<unsigned long long>(avalanches),
              static_cast<unsigned long long>(clicks));
  std::printf("RESULT simulate gates=%llu channels=%d avalanches=%llu clicks=%llu out=%s\n",
              static_cast<unsigned long long>(scenario.n_gates), scenario.n_channels(),
              static_cast<unsigned long long>(avalanches),
              static_cast<unsigned long long>(clicks), cfg.output.dir.c_str());
  return 0;
}

int cmd_sweep(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const Scenario& scenario = require_scenario(cfg);
  const CompensatorConfig& comp = require_compensator(cfg);
  if (!cfg.sweep) throw ConfigError("config needs a 'sweep' section");
  const SweepSection& sweep_cfg = *cfg.sweep;
  const int threads = resolve_threads(opts);
  const std::filesystem::path out(cfg.output.dir);

  const SweepResult sweep_a = threshold_sweep(scenario, comp, sweep_cfg.thresholds,
                                              sweep_cfg.channel, threads);
  write_sweep_csv(out / "sweep.csv", sweep_a);

  std::string ab = "";
  if (sweep_cfg.scenario_b) {
    const SweepResult sweep_b = threshold_sweep(
        *sweep_cfg.scenario_b, comp, sweep_cfg.thresholds, sweep_cfg.channel, threads);
    write_sweep_csv(out / "sweep_b.csv", sweep_b);
    const double ratio =
        dark_at_matched_efficiency(sweep_a, sweep_b, sweep_cfg.target_p_pd);
    std::printf("dark-count ratio A/B at p_pd=%g: %.6g\n", sweep_cfg.target_p_pd, ratio);
    char buf[64];
    std::snprintf(buf, sizeof(buf), " ab_dark_ratio=%.6g", ratio);
    ab = buf;
  }
  std::printf("RESULT sweep rows=%zu checksum=%016llx%s\n", sweep_a.rows.size(),
              static_cast<unsigned long long>(sweep_a.frame_checksum), ab.c_str());
  return 0;
}

int cmd_keyrate(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  if (!cfg.keyrate) throw ConfigError("config needs a 'keyrate' section");
  const KeyRateSection& section = *cfg.keyrate;
  const std::filesystem::path out(cfg.output.dir);

  std::vector<RateRow> rate_rows;
  std::vector<GainRow> gain_rows;
  for (double loss : section.loss_db_grid) {
    KeyRateParams p = section.params;
    p.channel_loss_db = loss;
    RateRow row{loss, p.mu, p.p_dk, 0.0, 0.0, 0.0};
    try {
      const GainQber gq = gain_and_qber(p);
      row.gain = gq.gain;
      row.qber = gq.qber;
      row.rate = shor_preskill_rate(gq.gain, gq.qber, p.sift_q, p.f_ec);
    } catch (const ConfigError&) {
      // Q == 0: leave the row zeros.
    }
    rate_rows.push_back(row);
    if (row.rate > 0.0) {
      gain_rows.push_back({loss, dark_count_gain(p, section.reduction_factor)});
    }
  }
  write_rate_csv(out / "rate.csv", rate_rows);
  write_gain_csv(out / "gain.csv", gain_rows);

  std::string crossing = "";
  if (section.gain_target) {
    const double target = *section.gain_target;
    // The gain ratio rises with loss; bisect the first bracketing segment.
    for (std::size_t i = 0; i + 1 < gain_rows.size(); ++i) {
      if (gain_rows[i].ratio <= target && gain_rows[i + 1].ratio >= target) {
        double lo = gain_rows[i].loss_db, hi = gain_rows[i + 1].loss_db;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          KeyRateParams p = section.params;
          p.channel_loss_db = mid;
          if (dark_count_gain(p, section.reduction_factor) >= target) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), " gain_target=%g gain_crossing_loss_db=%.4f",
                      target, 0.5 * (lo + hi));
        crossing = buf;
        break;
      }
    }
    if (crossing.empty()) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), " gain_target=%g gain_crossing_loss_db=nan", target);
      crossing = buf;
    }
  }
  std::printf("RESULT keyrate rows=%zu gain_rows=%zu%s\n", rate_rows.size(),
              gain_rows.size(), crossing.c_str());
  return 0;
}

int cmd_hwcheck(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  if (!cfg.hw) throw ConfigError("config needs a 'hw' section");
  const HwSection& hw = *cfg.hw;

  const BandwidthResult bw = rf_bandwidth(hw.rf);
  const LengthResult max_len = min_length_for_bandwidth(hw.rf, hw.rf_target_hz);
  const ThermalResult flux = thermal_flux(hw.wires, hw.delta_t_k);
  const BudgetResult budget = budget_check(flux.total_mw, hw.budget_mw);

  std::printf("RF link: L=%.3f nH (%.2f mm @ %.2f nH/mm), C=%.3g pF, Z0=%.1f ohm\n",
              hw.rf.total_inductance_h() * 1e9, hw.rf.wire_length_mm,
              hw.rf.wire_inductance_per_mm * 1e9, hw.rf.shunt_c_f * 1e12,
              hw.rf.z0_ohm);
  if (bw.at_ceiling) {
    std::printf("  f_3dB >= %.3f GHz (ceiling)\n", hw.rf.f_max_hz * 1e-9);
  } else {
    std::printf("  f_3dB = %.4f GHz\n", bw.f_3db_hz * 1e-9);
  }
  std::printf("  max wire length for %.2f GHz: %.3f mm%s\n", hw.rf_target_hz * 1e-9,
              max_len.length_mm, max_len.at_bound ? " (bracket bound)" : "");
  std::printf("thermal budget at dT=%.1f K (harness geometry is a documented calibration):\n",
              hw.delta_t_k);
  for (std::size_t i = 0; i < hw.wires.size(); ++i) {
    const WireSpec& w = hw.wires[i];
    std::printf("  %dx %s A=%.3g m^2 L=%.3g m k=%.0f -> %.1f mW\n", w.count,
                w.material.c_str(), w.cross_section_m2, w.length_m, w.conductivity_k,
                flux.per_wire_mw[i]);
  }
  std::printf("  total %.1f mW vs budget %.1f mW -> %s (margin %.1f mW)\n",
              flux.total_mw, hw.budget_mw, budget.pass ? "PASS" : "FAIL",
              budget.margin_mw);
  std::printf("RESULT hwcheck f3db_hz=%.6g max_len_mm=%.6g flux_mw=%.6g budget_mw=%.6g "
              "margin_mw=%.6g pass=%d\n",
              bw.at_ceiling ? hw.rf.f_max_hz : bw.f_3db_hz, max_len.length_mm,
              flux.total_mw, hw.budget_mw, budget.margin_mw, budget.pass ? 1 : 0);
  return budget.pass ? 0 : 3;
}

int cmd_bench(const CommonOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const Scenario& scenario = require_scenario(cfg);
  CompensatorConfig comp =
      cfg.compensator ? *cfg.compensator : CompensatorConfig{};
  const int trials = std::max(5, cfg.bench.trials);

  if (scenario.n_gates < static_cast<std::uint64_t>(comp.effective_warmup())) {
    throw ConfigError("bench needs n_gates >= compensator warm-up");
  }
  // Synthesis is excluded: the benchmark measures just the discriminator
  // pipeline that has to keep pace with the gate clock.
  const SimulationResult sim = simulate_gate_train(scenario, resolve_threads(opts));
  const FrameStream& frames = sim.frames[0];

  std::vector<double> gates_per_s;
  std::uint64_t click_sink = 0;
  for (int t = 0; t < trials; ++t) {
    Compensator comp_state(comp, scenario.adc, frames.samples_per_gate);
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t g = 0; g < frames.n_gates(); ++g) {
      const Decision d = comp_state.process_frame(frames.frame(g), g, 0);
      click_sink += d.click ? 1 : 0;
    }
    const auto stop = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(stop - start).count();
    gates_per_s.push_back(static_cast<double>(frames.n_gates()) / secs);
  }
  std::sort(gates_per_s.begin(), gates_per_s.end());
  const double median = gates_per_s[gates_per_s.size() / 2];
  std::printf("processed %llu gates x %d trials (clicks accumulated: %llu)\n",
              static_cast<unsigned long long>(frames.n_gates()), trials,
              static_cast<unsigned long long>(click_sink));
  std::printf("RESULT bench gates_per_s_min=%.4g gates_per_s_median=%.4g "
              "gates_per_s_max=%.4g ns_per_gate_median=%.4g trials=%d "
              "samples_per_gate=%d bits=%d\n",
              gates_per_s.front(), median, gates_per_s.back(), 1e9 / median, trials,
              frames.samples_per_gate, frames.bits);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gated-mode SPAD simulation and analysis toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run config")->required();
    sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
    sub->add_option("--seed", opts.seed_override, "seed override (u64)");
    sub->add_option("--threads", opts.threads,
                    "worker threads (default: SPADSIM_THREADS or 1)");
  };

  auto* simulate = app.add_subcommand(
      "simulate", "synthesize frames, ground truth and decisions");
  auto* sweep = app.add_subcommand("sweep", "threshold sweep (detection vs dark count)");
  auto* keyrate = app.add_subcommand("keyrate", "key-rate tables and dark-count gain");
  auto* hwcheck = app.add_subcommand("hwcheck", "RF bandwidth and thermal budget checks");
  auto* bench = app.add_subcommand("bench", "compensator pipeline throughput");
  for (auto* sub : {simulate, sweep, keyrate, hwcheck, bench}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (keyrate->parsed()) return cmd_keyrate(opts);
    if (hwcheck->parsed()) return cmd_hwcheck(opts);
    if (bench->parsed()) return cmd_bench(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InsufficientDataError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
