// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code; runtimes are enforced where
// the criterion carries a budget.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#include <unistd.h>
#endif

#include "spadsim/charstats.hpp"
#include "spadsim/compensator.hpp"
#include "spadsim/config.hpp"
#include "spadsim/errors.hpp"
#include "spadsim/hwbudget.hpp"
#include "spadsim/io.hpp"
#include "spadsim/keyrate.hpp"
#include "spadsim/rng.hpp"
#include "spadsim/sigmodel.hpp"
#include "support/oracles.hpp"

#ifndef SPADSIM_CLI_PATH
#define SPADSIM_CLI_PATH ""
#endif
#ifndef SPADSIM_CONFIG_DIR
#define SPADSIM_CONFIG_DIR "configs"
#endif

using namespace spadsim;
namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string message;
};

using CheckFn = std::function<std::optional<Failure>(std::string& detail)>;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------- 1
std::optional<Failure> criterion_self_training(std::string& detail) {
  const double start = now_s();
  DeviceProfile base;
  base.variation_fraction = 0.2;
  const CompensatorConfig cfg;  // one untouched configuration for all devices
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Scenario s;
    s.devices[0] = apply_device_variation(base, seed);
    s.devices[0].efficiency_eta = 0.0;
    s.devices[0].dark_prob_per_gate = 0.0;
    s.devices[0].afterpulse_prob = 0.0;
    s.noise_sigma_v = 0.0;
    s.illumination.pattern = IlluminationPattern::AllDark;
    s.n_gates = 3 * static_cast<std::uint64_t>(cfg.effective_warmup());
    s.seed = 1000 + seed;
    const SimulationResult sim = simulate_gate_train(s);
    Compensator comp(cfg, s.adc, s.gate.samples_per_gate);
    std::vector<double> residual(s.gate.samples_per_gate);
    for (std::uint64_t g = 0; g < s.n_gates; ++g) {
      comp.compensate(sim.frames[0].frame(g), residual);
      if (g >= static_cast<std::uint64_t>(cfg.effective_warmup())) {
        for (double v : residual) worst = std::max(worst, std::abs(v));
      }
      comp.update_template(sim.frames[0].frame(g));
    }
  }
  const double elapsed = now_s() - start;
  const double lsb = AdcConfig{}.lsb_v();
  detail = fmt("max residual %.3g V vs 1 LSB %.3g V, %.1f s", worst, lsb, elapsed);
  if (worst > lsb) return Failure{"residual exceeds one de-quantized LSB"};
  if (elapsed >= 10.0) return Failure{"runtime budget of 10 s exceeded"};
  return std::nullopt;
}

// ---------------------------------------------------------------------- 2
std::optional<Failure> criterion_template_averaging(std::string& detail) {
  const GateConfig gate;
  const DeviceProfile dev;
  const AdcConfig adc;
  const auto ft = gate_feedthrough_waveform(gate, dev);
  const double sigma = 0.05;
  std::ostringstream report;
  for (int window : {16, 64, 256}) {
    CompensatorConfig cfg;
    cfg.window_n = window;
    cfg.warmup_gates = window;
    double sum_sq = 0.0;
    std::uint64_t count = 0;
    for (int trial = 0; trial < 100; ++trial) {
      Compensator comp(cfg, adc, gate.samples_per_gate);
      for (int g = 0; g < window; ++g) {
        std::vector<double> frame = ft;
        CounterRng rng(9000 + trial, g, window);
        for (auto& v : frame) v += rng.next_normal(0.0, sigma);
        comp.update_template(quantize(frame, adc));
      }
      for (int i = 0; i < gate.samples_per_gate; ++i) {
        const double err = comp.tmpl()[i] - ft[i];
        sum_sq += err * err;
        ++count;
      }
    }
    const double measured = std::sqrt(sum_sq / count);
    const double expected = sigma / std::sqrt(static_cast<double>(window));
    report << fmt("N=%d: %.4g vs %.4g (%.1f%%)  ", window, measured, expected,
                  100.0 * std::abs(measured / expected - 1.0));
    if (std::abs(measured / expected - 1.0) > 0.20) {
      detail = report.str();
      return Failure{fmt("window %d deviates beyond 20%%", window)};
    }
  }
  detail = report.str();
  return std::nullopt;
}

// ---------------------------------------------------------------------- 3
std::optional<Failure> criterion_roc(std::string& detail) {
  const RunConfig cfg =
      run_config_from_file(fs::path(SPADSIM_CONFIG_DIR) / "demo_sweep.json");
  const Scenario& s = *cfg.scenario;
  const SweepResult sweep =
      threshold_sweep(s, *cfg.compensator, cfg.sweep->thresholds, 0, 2);
  if (sweep.rows.size() != 20) return Failure{"expected 20 sweep rows"};

  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    if (sweep.rows[i].p_pd > sweep.rows[i - 1].p_pd ||
        sweep.rows[i].p_dk > sweep.rows[i - 1].p_dk) {
      return Failure{fmt("row %zu breaks monotonicity", i)};
    }
  }

  // Low-threshold plateau: the row nearest 0.11 V (above noise, below the
  // avalanche amplitude mass).
  const SweepRow& row = sweep.rows[2];
  const double eta = s.devices[0].efficiency_eta;
  const double dark = s.devices[0].dark_prob_per_gate;
  const double p_lit_true = 1.0 - (1.0 - eta) * (1.0 - dark);
  const double sig_lit =
      oracles::binomial_sigma(p_lit_true, static_cast<double>(row.gates_lit));
  const double sig_dark =
      oracles::binomial_sigma(dark, static_cast<double>(row.gates_dark));
  detail = fmt("plateau v_th=%.3f: p_pd %.5f vs %.5f (3sig %.5f), p_dk %.5f vs %.5f "
               "(3sig %.5f)",
               row.v_th, row.p_pd, p_lit_true, 3 * sig_lit, row.p_dk, dark,
               3 * sig_dark);
  if (std::abs(row.p_pd - p_lit_true) > 3.0 * sig_lit) {
    return Failure{"injected efficiency not recovered at the plateau"};
  }
  if (std::abs(row.p_dk - dark) > 3.0 * sig_dark) {
    return Failure{"injected dark rate not recovered at the plateau"};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------- 4
std::optional<Failure> criterion_matched_dark_ratio(std::string& detail) {
  const double start = now_s();
  const RunConfig cfg =
      run_config_from_file(fs::path(SPADSIM_CONFIG_DIR) / "demo_sweep_ab.json");
  const SweepResult a =
      threshold_sweep(*cfg.scenario, *cfg.compensator, cfg.sweep->thresholds, 0, 2);
  const SweepResult b = threshold_sweep(*cfg.sweep->scenario_b, *cfg.compensator,
                                        cfg.sweep->thresholds, 0, 2);
  const double ratio = dark_at_matched_efficiency(a, b, cfg.sweep->target_p_pd);
  const double elapsed = now_s() - start;
  detail = fmt("ratio %.4f at p_pd=%.2f, %.1f s", ratio, cfg.sweep->target_p_pd,
               elapsed);
  if (std::abs(ratio - 0.10) > 0.10 * 0.25) {
    return Failure{"dark-count ratio outside 0.10 +/- 25%"};
  }
  if (elapsed >= 60.0) return Failure{"runtime budget of 60 s exceeded"};
  return std::nullopt;
}

// ---------------------------------------------------------------------- 5
std::optional<Failure> criterion_shor_preskill_threshold(std::string& detail) {
  double lo = 0.01, hi = 0.49;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - 2.0 * binary_entropy(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  const double h11 = binary_entropy(0.11);
  detail = fmt("root %.6f, H2(0.11) %.6f", root, h11);
  if (std::abs(root - 0.1100) > 1e-4) return Failure{"root not at 0.1100 +/- 1e-4"};
  if (std::abs(h11 - 0.49991) > 1e-5) return Failure{"H2(0.11) not 0.49991 +/- 1e-5"};
  return std::nullopt;
}

// ---------------------------------------------------------------------- 6
std::optional<Failure> criterion_rate_model_consistency(std::string& detail) {
  const double losses[5] = {0.0, 5.0, 10.0, 15.0, 20.0};
  const double darks[5] = {1e-5, 1e-4, 3e-4, 1e-3, 3e-3};
  double worst_q = 0.0, worst_e = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      KeyRateParams p;
      p.mu = 0.1;
      p.eta_det = 0.1;
      p.e_det = 0.01;
      p.channel_loss_db = losses[i];
      p.p_dk = darks[j];
      const GainQber gq = gain_and_qber(p);
      const auto mc = oracles::mc_click_oracle(p.mu, p.channel_loss_db, p.eta_det,
                                               p.p_dk, p.e_det, 1000000,
                                               77000 + i * 5 + j);
      const double sq = oracles::binomial_sigma(gq.gain, 1e6);
      const double se =
          oracles::binomial_sigma(gq.qber, static_cast<double>(mc.clicks));
      worst_q = std::max(worst_q, std::abs(mc.gain - gq.gain) / sq);
      worst_e = std::max(worst_e, std::abs(mc.qber - gq.qber) / se);
      if (std::abs(mc.gain - gq.gain) > 3.0 * sq) {
        return Failure{fmt("gain off at loss %.0f dB p_dk %.0e", losses[i], darks[j])};
      }
      if (std::abs(mc.qber - gq.qber) > 3.0 * se) {
        return Failure{fmt("qber off at loss %.0f dB p_dk %.0e", losses[i], darks[j])};
      }
    }
  }
  detail = fmt("worst |z|: gain %.2f, qber %.2f over the 5x5 grid", worst_q, worst_e);
  return std::nullopt;
}

// ---------------------------------------------------------------------- 7
std::optional<Failure> criterion_dark_count_gain(std::string& detail) {
  const RunConfig cfg =
      run_config_from_file(fs::path(SPADSIM_CONFIG_DIR) / "demo_keyrate.json");
  const KeyRateSection& section = *cfg.keyrate;

  // Ratio >= 1 wherever the baseline produces key.
  for (double loss : section.loss_db_grid) {
    for (double pdk : {1e-6, 1e-5, 1e-4}) {
      KeyRateParams p = section.params;
      p.channel_loss_db = loss;
      p.p_dk = pdk;
      try {
        if (dark_count_gain(p, section.reduction_factor) < 1.0) {
          return Failure{fmt("ratio < 1 at loss %.1f dB p_dk %.0e", loss, pdk)};
        }
      } catch (const ConfigError&) {
        // Baseline produces no key here; outside the criterion's domain.
      }
    }
  }

  if (!section.gain_target || !section.gain_target_loss_db) {
    return Failure{"demo config does not document the gain target point"};
  }
  KeyRateParams p = section.params;
  p.channel_loss_db = *section.gain_target_loss_db;
  const double ratio = dark_count_gain(p, section.reduction_factor);

  // Independent grid-search + bisection for the crossing.
  double found = -1.0;
  double prev_loss = section.loss_db_grid.front();
  double prev_ratio = 0.0;
  for (double loss : section.loss_db_grid) {
    KeyRateParams q = section.params;
    q.channel_loss_db = loss;
    double r;
    try {
      r = dark_count_gain(q, section.reduction_factor);
    } catch (const ConfigError&) {
      break;
    }
    if (prev_ratio > 0.0 && prev_ratio < *section.gain_target &&
        r >= *section.gain_target) {
      double lo = prev_loss, hi = loss;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        KeyRateParams m = section.params;
        m.channel_loss_db = mid;
        if (dark_count_gain(m, section.reduction_factor) >= *section.gain_target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      found = 0.5 * (lo + hi);
      break;
    }
    prev_loss = loss;
    prev_ratio = r;
  }
  detail = fmt("ratio %.4f at documented loss %.4f dB; grid-search crossing %.4f dB",
               ratio, *section.gain_target_loss_db, found);
  if (std::abs(ratio - *section.gain_target) > 0.1) {
    return Failure{"documented loss point does not give 3.2 +/- 0.1"};
  }
  if (found < 0.0 || std::abs(found - *section.gain_target_loss_db) > 0.05) {
    return Failure{"grid-search crossing disagrees with the documented loss"};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------- 8
std::optional<Failure> criterion_rf_relation(std::string& detail) {
  RfLinkSpec spec;  // 5 mm at 1 nH/mm, C = 0
  const BandwidthResult bw = rf_bandwidth(spec);
  const double closed =
      2.0 * spec.z0_ohm / (2.0 * 3.14159265358979323846 * spec.total_inductance_h());
  const LengthResult len = min_length_for_bandwidth(spec, 3e9);
  double worst_s21 = 0.0;
  RfLinkSpec loaded = spec;
  loaded.shunt_c_f = 0.3e-12;
  for (int i = 0; i <= 1000; ++i) {
    const double f = loaded.f_max_hz * i / 1000.0;
    worst_s21 = std::max(worst_s21, s21_magnitude(loaded, f));
  }
  detail = fmt("f_3db %.4f GHz vs closed form %.4f GHz; max length %.3f mm; "
               "max |S21| %.9f",
               bw.f_3db_hz * 1e-9, closed * 1e-9, len.length_mm, worst_s21);
  if (bw.at_ceiling || std::abs(bw.f_3db_hz - closed) > 0.005 * closed) {
    return Failure{"bandwidth off the closed form by more than 0.5%"};
  }
  if (std::abs(bw.f_3db_hz - 3.183e9) > 0.005 * 3.183e9) {
    return Failure{"bandwidth not 3.183 GHz +/- 0.5%"};
  }
  if (len.length_mm < 5.0) return Failure{"3 GHz max length below 5 mm"};
  if (worst_s21 > 1.0 + 1e-9) return Failure{"passivity violated"};
  return std::nullopt;
}

// ---------------------------------------------------------------------- 9
std::optional<Failure> criterion_thermal_budget(std::string& detail) {
  const RunConfig cfg =
      run_config_from_file(fs::path(SPADSIM_CONFIG_DIR) / "demo_hw.json");
  const HwSection& hw = *cfg.hw;
  const ThermalResult flux = thermal_flux(hw.wires, hw.delta_t_k);
  const BudgetResult budget = budget_check(flux.total_mw, hw.budget_mw);
  detail = fmt("total %.1f mW, margin %.1f mW", flux.total_mw, budget.margin_mw);
  if (flux.total_mw < 150.0 || flux.total_mw > 250.0) {
    return Failure{"default harness outside [150, 250] mW"};
  }
  if (!budget.pass || budget.margin_mw <= 0.0) {
    return Failure{"budget check does not pass with positive margin"};
  }
  // Exact linearity.
  std::vector<WireSpec> doubled = hw.wires;
  for (auto& w : doubled) w.cross_section_m2 *= 2.0;
  if (thermal_flux(doubled, hw.delta_t_k).total_mw != 2.0 * flux.total_mw) {
    return Failure{"flux not exactly linear in cross-section"};
  }
  if (thermal_flux(hw.wires, 0.5 * hw.delta_t_k).total_mw != 0.5 * flux.total_mw) {
    return Failure{"flux not exactly linear in delta T"};
  }
  return std::nullopt;
}

// --------------------------------------------------------------------- 10
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(SPADSIM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
#ifdef WIFEXITED
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
#else
  return status;
#endif
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<Failure> criterion_determinism(std::string& detail) {
  if (std::string(SPADSIM_CLI_PATH).empty()) {
    return Failure{"CLI path not configured"};
  }
  const fs::path root =
      fs::temp_directory_path() / ("spadsim_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);

  const std::string config = R"json({
    "scenario": {
      "devices": [{"efficiency_eta": 0.1, "dark_prob_per_gate": 0.001,
                   "variation_fraction": 0.1, "avalanche_decay_s": 1.5e-10,
                   "crosstalk_chi": 0.02}],
      "derive_second_device": true,
      "illumination": {"pattern": "alternating"},
      "noise_sigma_v": 0.005, "n_gates": 8000, "seed": 42
    },
    "compensator": {"window_n": 64, "v_th": 0.12},
    "sweep": {"thresholds": {"min": 0.06, "max": 0.4, "count": 5}},
    "keyrate": {"mu": 0.1, "eta_det": 0.1, "p_dk": 1e-5, "e_det": 0.01,
                "loss_db": {"min": 0, "max": 20, "count": 21},
                "gain_target": 3.2},
    "hw": {"rf": {"wire_length_mm": 5.0},
           "wires": [{"count": 2, "cross_section_m2": 1e-8, "length_m": 0.004}]},
    "bench": {"trials": 5}
  })json";
  const fs::path cfg_path = root / "determinism.json";
  std::ofstream(cfg_path) << config;

  struct Run {
    std::string name;
    std::vector<std::string> files;  // outputs to compare
  };
  const std::vector<Run> runs = {
      {"simulate",
       {"frames_ch0.bin", "frames_ch1.bin", "ground_truth_ch0.csv",
        "ground_truth_ch1.csv", "decisions.csv"}},
      {"sweep", {"sweep.csv"}},
      {"keyrate", {"rate.csv", "gain.csv"}},
  };

  for (const Run& run : runs) {
    std::vector<std::string> baselines;
    int variant = 0;
    for (const char* threads : {"1", "8", "1", "8"}) {
      const fs::path out = root / (run.name + "_v" + std::to_string(variant));
      const int rc = run_cli("\"" + run.name + "\" --config " + cfg_path.string() +
                                 " --out " + out.string() + " --threads " + threads,
                             root / (run.name + std::to_string(variant) + ".log"));
      if (rc != 0) {
        return Failure{fmt("%s exited %d (variant %d)", run.name.c_str(), rc, variant)};
      }
      for (std::size_t f = 0; f < run.files.size(); ++f) {
        const std::string bytes = file_bytes(out / run.files[f]);
        if (bytes.empty()) {
          return Failure{fmt("%s produced empty %s", run.name.c_str(),
                             run.files[f].c_str())};
        }
        if (variant == 0) {
          baselines.push_back(bytes);
        } else if (bytes != baselines[f]) {
          return Failure{fmt("%s output %s differs between runs", run.name.c_str(),
                             run.files[f].c_str())};
        }
      }
      ++variant;
    }
  }

  // hwcheck: deterministic stdout; bench: must run (timing itself excluded).
  std::string hw_baseline;
  for (int i = 0; i < 2; ++i) {
    const fs::path log = root / ("hwcheck" + std::to_string(i) + ".log");
    const int rc = run_cli("hwcheck --config " +
                               (fs::path(SPADSIM_CONFIG_DIR) / "demo_hw.json").string(),
                           log);
    if (rc != 0) return Failure{fmt("hwcheck exited %d", rc)};
    const std::string bytes = file_bytes(log);
    if (i == 0) {
      hw_baseline = bytes;
    } else if (bytes != hw_baseline) {
      return Failure{"hwcheck output differs between runs"};
    }
  }
  const std::string bench_cfg = R"json({
    "scenario": {"n_gates": 2000, "seed": 1, "noise_sigma_v": 0.005},
    "compensator": {"v_th": 0.12}, "bench": {"trials": 5}
  })json";
  std::ofstream(root / "bench.json") << bench_cfg;
  if (run_cli("bench --config " + (root / "bench.json").string(),
              root / "bench.log") != 0) {
    return Failure{"bench run failed"};
  }

  // Exit-code contract: 1 for config errors (including bench below warm-up),
  // 2 for IO errors.
  std::ofstream(root / "invalid.json") << R"({"scenario": {"n_gates": 0}})";
  if (run_cli("simulate --config " + (root / "invalid.json").string() + " --out " +
                  (root / "x").string(),
              root / "invalid.log") != 1) {
    return Failure{"config error did not exit 1"};
  }
  std::ofstream(root / "short.json")
      << R"({"scenario": {"n_gates": 10}, "compensator": {"window_n": 64}})";
  if (run_cli("bench --config " + (root / "short.json").string(),
              root / "short.log") != 1) {
    return Failure{"bench below warm-up did not exit 1"};
  }
  if (run_cli("simulate --config " + (root / "no_such_file.json").string(),
              root / "missing.log") != 2) {
    return Failure{"missing config file did not exit 2"};
  }

  fs::remove_all(root);
  detail = "simulate/sweep/keyrate byte-identical across repeats and threads 1 vs 8; "
           "exit codes 1/2 honored";
  return std::nullopt;
}

// --------------------------------------------------------------------- 11
std::optional<Failure> criterion_throughput(std::string& detail) {
  Scenario s;
  s.n_gates = 200000;
  s.seed = 11;
  const SimulationResult sim = simulate_gate_train(s, 2);
  const FrameStream& frames = sim.frames[0];
  CompensatorConfig cfg;
  cfg.v_th = 0.12;

  std::vector<double> rates;
  std::uint64_t sink = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Compensator comp(cfg, s.adc, frames.samples_per_gate);
    const double t0 = now_s();
    for (std::uint64_t g = 0; g < frames.n_gates(); ++g) {
      sink += comp.process_frame(frames.frame(g), g, 0).click ? 1 : 0;
    }
    rates.push_back(frames.n_gates() / (now_s() - t0));
  }
  std::sort(rates.begin(), rates.end());
  const double median = rates[rates.size() / 2];
  detail = fmt("median %.3g gates/s (min %.3g, max %.3g, clicks %llu)", median,
               rates.front(), rates.back(), static_cast<unsigned long long>(sink));
  if (median < 1e5) return Failure{"throughput below the 1e5 gates/s hard floor"};
  if (median < 1e6) {
    detail += " [below the 1e6 engineering target; report-only]";
  }
  return std::nullopt;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    CheckFn fn;
  };
  const std::vector<Entry> criteria = {
      {1, "self-training cancellation across varied devices", criterion_self_training},
      {2, "template averaging law sigma/sqrt(N)", criterion_template_averaging},
      {3, "ROC correctness and rate recovery", criterion_roc},
      {4, "matched-efficiency dark-count ratio", criterion_matched_dark_ratio},
      {5, "Shor-Preskill threshold constants", criterion_shor_preskill_threshold},
      {6, "rate model vs Monte Carlo clicks", criterion_rate_model_consistency},
      {7, "dark-count key-rate gain and 3.2x point", criterion_dark_count_gain},
      {8, "RF bandwidth relation and passivity", criterion_rf_relation},
      {9, "thermal budget and linearity", criterion_thermal_budget},
      {10, "byte-identical deterministic outputs", criterion_determinism},
      {11, "compensator pipeline throughput", criterion_throughput},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    std::string detail;
    std::optional<Failure> failure;
    const double t0 = now_s();
    try {
      failure = entry.fn(detail);
    } catch (const std::exception& e) {
      failure = Failure{std::string("exception: ") + e.what()};
    }
    const double dt = now_s() - t0;
    if (failure) {
      ++failures;
      std::printf("[FAIL] %2d. %s: %s%s%s (%.1f s)\n", entry.id, entry.name,
                  failure->message.c_str(), detail.empty() ? "" : " | ",
                  detail.c_str(), dt);
    } else {
      std::printf("[PASS] %2d. %s%s%s (%.1f s)\n", entry.id, entry.name,
                  detail.empty() ? "" : " | ", detail.c_str(), dt);
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
  }
  return failures == 0 ? 0 : 1;
}
