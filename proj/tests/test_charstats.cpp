#include <doctest.h>

#include <cmath>

#include "spadsim/charstats.hpp"
#include "spadsim/errors.hpp"
#include "spadsim/rng.hpp"
#include "support/oracles.hpp"

using namespace spadsim;
using doctest::Approx;

namespace {
std::vector<Decision> make_decisions(std::uint64_t n, const Illumination& ill,
                                     bool click_lit, bool click_dark,
                                     std::uint64_t withheld_prefix = 0) {
  std::vector<Decision> out;
  for (std::uint64_t g = 0; g < n; ++g) {
    Decision d;
    d.gate_index = g;
    d.withheld = g < withheld_prefix;
    d.click = ill.lit(g) ? click_lit : click_dark;
    out.push_back(d);
  }
  return out;
}
}  // namespace

TEST_CASE("wilson interval shape and edge cases") {
  const ProportionCi none = wilson_interval(0, 100);
  CHECK(none.p == 0.0);
  CHECK(none.lo == 0.0);
  CHECK(none.hi > 0.0);
  const ProportionCi all = wilson_interval(100, 100);
  CHECK(all.p == 1.0);
  CHECK(all.hi == 1.0);
  CHECK(all.lo < 1.0);
  const ProportionCi mid = wilson_interval(50, 100);
  CHECK(mid.lo < mid.p);
  CHECK(mid.p < mid.hi);
  CHECK(mid.lo > 0.3);
  CHECK(mid.hi < 0.7);
}

TEST_CASE("wilson interval coverage stays near nominal") {
  // Reduced version of the acceptance property: 400 replicates at n = 4000.
  const double p_true = 0.003;
  const int reps = 400, n = 4000;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    CounterRng rng(700 + r, 0, kTagOracle);
    std::uint64_t k = 0;
    for (int i = 0; i < n; ++i) k += rng.next_bernoulli(p_true) ? 1 : 0;
    const ProportionCi ci = wilson_interval(k, n);
    if (ci.lo <= p_true && p_true <= ci.hi) ++covered;
  }
  CHECK(static_cast<double>(covered) / reps >= 0.92);
}

TEST_CASE("count_statistics basic limits") {
  Illumination ill;  // alternating

  SUBCASE("no clicks anywhere") {
    const auto rows = make_decisions(1000, ill, false, false);
    const SweepRow r = count_statistics(rows, ill, 0.1);
    CHECK(r.p_pd == 0.0);
    CHECK(r.p_dk == 0.0);
    CHECK(r.gates_lit == 500);
    CHECK(r.gates_dark == 500);
  }

  SUBCASE("every lit gate clicks, no dark clicks") {
    const auto rows = make_decisions(1000, ill, true, false);
    const SweepRow r = count_statistics(rows, ill, 0.1);
    CHECK(r.p_pd == 1.0);
    CHECK(r.p_dk == 0.0);
  }

  SUBCASE("withheld decisions are excluded") {
    const auto rows = make_decisions(1000, ill, true, false, 100);
    const SweepRow r = count_statistics(rows, ill, 0.1);
    CHECK(r.gates_lit == 450);
    CHECK(r.gates_dark == 450);
  }

  SUBCASE("empty class raises") {
    Illumination all_lit;
    all_lit.pattern = IlluminationPattern::AllLit;
    const auto rows = make_decisions(100, all_lit, true, false);
    CHECK_THROWS_AS(count_statistics(rows, all_lit, 0.1), InsufficientDataError);
  }
}

TEST_CASE("poisson-corrected efficiency recovers the configured eta") {
  Scenario s;
  s.devices[0].efficiency_eta = 0.10;
  s.devices[0].dark_prob_per_gate = 1e-4;
  s.devices[0].afterpulse_prob = 0.0;
  s.illumination.pattern = IlluminationPattern::Alternating;
  s.illumination.mu_gate = 0.6;
  s.n_gates = 400000;
  s.seed = 91;

  CompensatorConfig comp;
  comp.v_th = 0.12;
  const std::vector<double> thresholds = {0.12};
  const SweepResult sweep = threshold_sweep(s, comp, thresholds);
  const SweepRow& row = sweep.rows[0];
  REQUIRE(!std::isnan(row.efficiency_est));
  // sigma of the estimator, propagated from the lit-click proportion.
  const double p_lit = row.p_pd;
  const double sigma_p =
      oracles::binomial_sigma(p_lit, static_cast<double>(row.gates_lit));
  const double sigma_eta = sigma_p / (s.illumination.mu_gate * (1.0 - p_lit));
  CHECK(std::abs(row.efficiency_est - 0.10) < 3.0 * sigma_eta + 2e-3);
}

TEST_CASE("threshold_sweep consistency and monotonicity") {
  Scenario s;
  s.n_gates = 30000;
  s.seed = 55;
  CompensatorConfig comp;

  SUBCASE("thresholds must increase") {
    const std::vector<double> bad = {0.2, 0.1};
    CHECK_THROWS_AS(threshold_sweep(s, comp, bad), ConfigError);
  }

  SUBCASE("thresholds above any residual give empty rows") {
    const std::vector<double> thresholds = {5.0, 6.0};
    const SweepResult sweep = threshold_sweep(s, comp, thresholds);
    for (const auto& r : sweep.rows) {
      CHECK(r.p_pd == 0.0);
      CHECK(r.p_dk == 0.0);
    }
  }

  SUBCASE("single threshold equals a direct run") {
    const std::vector<double> one = {0.12};
    const SweepResult sweep = threshold_sweep(s, comp, one);
    const SimulationResult sim = simulate_gate_train(s);
    CHECK(sweep.frame_checksum == sim.frames[0].checksum());
    CompensatorConfig cfg = comp;
    cfg.v_th = 0.12;
    const auto decisions = process_stream(sim.frames[0], cfg, s.adc);
    const SweepRow direct = count_statistics(decisions, s.illumination, 0.12);
    CHECK(sweep.rows[0].clicks_lit == direct.clicks_lit);
    CHECK(sweep.rows[0].clicks_dark == direct.clicks_dark);
    CHECK(sweep.rows[0].p_pd == direct.p_pd);
  }

  SUBCASE("p_pd and p_dk are non-increasing in v_th") {
    std::vector<double> thresholds;
    for (int i = 0; i < 12; ++i) thresholds.push_back(0.05 + 0.04 * i);
    const SweepResult sweep = threshold_sweep(s, comp, thresholds, 0, 2);
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
      CHECK(sweep.rows[i].p_pd <= sweep.rows[i - 1].p_pd);
      CHECK(sweep.rows[i].p_dk <= sweep.rows[i - 1].p_dk);
    }
    // p_pd dominates p_dk on the same stream when eta > 0.
    for (const auto& r : sweep.rows) CHECK(r.p_pd >= r.p_dk);
  }

  SUBCASE("sweep rows are deterministic across thread counts") {
    std::vector<double> thresholds = {0.08, 0.2, 0.35};
    const SweepResult a = threshold_sweep(s, comp, thresholds, 0, 1);
    const SweepResult b = threshold_sweep(s, comp, thresholds, 0, 4);
    CHECK(a.frame_checksum == b.frame_checksum);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].clicks_lit == b.rows[i].clicks_lit);
      CHECK(a.rows[i].clicks_dark == b.rows[i].clicks_dark);
    }
  }
}

TEST_CASE("dark_at_matched_efficiency") {
  Scenario s;
  s.n_gates = 60000;
  s.seed = 77;
  CompensatorConfig comp;
  std::vector<double> thresholds;
  for (int i = 0; i < 14; ++i) thresholds.push_back(0.08 + 0.035 * i);
  const SweepResult sweep = threshold_sweep(s, comp, thresholds, 0, 2);

  SUBCASE("a sweep compared with itself gives 1.0") {
    CHECK(dark_at_matched_efficiency(sweep, sweep, 0.05) == Approx(1.0));
  }

  SUBCASE("target outside the bracket raises") {
    CHECK_THROWS_AS(dark_at_matched_efficiency(sweep, sweep, 0.9), ConfigError);
  }

  SUBCASE("a 10x dark-count detector shows up as a 0.1 ratio") {
    Scenario ten = s;
    ten.devices[0].dark_prob_per_gate = 10.0 * s.devices[0].dark_prob_per_gate;
    ten.n_gates = 200000;
    Scenario one = s;
    one.n_gates = 200000;
    const SweepResult sweep_a = threshold_sweep(one, comp, thresholds, 0, 2);
    const SweepResult sweep_b = threshold_sweep(ten, comp, thresholds, 0, 2);
    const double ratio = dark_at_matched_efficiency(sweep_a, sweep_b, 0.05);
    CHECK(ratio == Approx(0.1).epsilon(0.25));
  }
}
