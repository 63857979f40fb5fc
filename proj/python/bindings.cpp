#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spadsim/charstats.hpp"
#include "spadsim/compensator.hpp"
#include "spadsim/config.hpp"
#include "spadsim/errors.hpp"
#include "spadsim/hwbudget.hpp"
#include "spadsim/keyrate.hpp"
#include "spadsim/sigmodel.hpp"

namespace py = pybind11;
using namespace spadsim;

namespace {

py::array_t<std::uint16_t> frames_to_array(const FrameStream& frames) {
  const auto n_gates = static_cast<py::ssize_t>(frames.n_gates());
  const auto spg = static_cast<py::ssize_t>(frames.samples_per_gate);
  py::array_t<std::uint16_t> arr({n_gates, spg});
  std::copy(frames.codes.begin(), frames.codes.end(), arr.mutable_data());
  return arr;
}

FrameStream frames_from_array(const py::array_t<std::uint16_t>& arr, int bits) {
  if (arr.ndim() != 2) {
    throw std::invalid_argument("frames must be a 2-D uint16 array [n_gates, samples]");
  }
  FrameStream frames;
  frames.samples_per_gate = static_cast<int>(arr.shape(1));
  frames.bits = bits;
  const auto view = arr.unchecked<2>();
  frames.codes.resize(static_cast<std::size_t>(arr.shape(0)) * arr.shape(1));
  std::size_t k = 0;
  for (py::ssize_t g = 0; g < arr.shape(0); ++g) {
    for (py::ssize_t i = 0; i < arr.shape(1); ++i) frames.codes[k++] = view(g, i);
  }
  return frames;
}

struct PySimulation {
  std::vector<py::array_t<std::uint16_t>> frames;
  std::vector<std::vector<GateTruth>> truth;
};

}  // namespace

PYBIND11_MODULE(_spadsim, m) {
  m.doc() = "Gated-mode SPAD simulation and analysis toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError",
                                                PyExc_ValueError);

  py::class_<GateConfig>(m, "GateConfig")
      .def(py::init<>())
      .def_readwrite("repetition_hz", &GateConfig::repetition_hz)
      .def_readwrite("gate_amplitude_v", &GateConfig::gate_amplitude_v)
      .def_readwrite("gate_width_s", &GateConfig::gate_width_s)
      .def_readwrite("samples_per_gate", &GateConfig::samples_per_gate)
      .def("period_s", &GateConfig::period_s)
      .def("sample_dt_s", &GateConfig::sample_dt_s);

  py::class_<PolePair>(m, "PolePair")
      .def(py::init<>())
      .def(py::init([](double f, double d) {
             return PolePair{f, d};
           }),
           py::arg("frequency_hz"), py::arg("damping"))
      .def_readwrite("frequency_hz", &PolePair::frequency_hz)
      .def_readwrite("damping", &PolePair::damping);

  py::class_<DeviceProfile>(m, "DeviceProfile")
      .def(py::init<>())
      .def_readwrite("responsivity_a_per_w", &DeviceProfile::responsivity_a_per_w)
      .def_readwrite("feedthrough_gain", &DeviceProfile::feedthrough_gain)
      .def_readwrite("transfer_poles", &DeviceProfile::transfer_poles)
      .def_readwrite("variation_fraction", &DeviceProfile::variation_fraction)
      .def_readwrite("avalanche_amp_mean_v", &DeviceProfile::avalanche_amp_mean_v)
      .def_readwrite("avalanche_amp_sigma_v", &DeviceProfile::avalanche_amp_sigma_v)
      .def_readwrite("avalanche_decay_s", &DeviceProfile::avalanche_decay_s)
      .def_readwrite("efficiency_eta", &DeviceProfile::efficiency_eta)
      .def_readwrite("dark_prob_per_gate", &DeviceProfile::dark_prob_per_gate)
      .def_readwrite("afterpulse_prob", &DeviceProfile::afterpulse_prob)
      .def_readwrite("afterpulse_tau_s", &DeviceProfile::afterpulse_tau_s)
      .def_readwrite("crosstalk_chi", &DeviceProfile::crosstalk_chi);

  py::class_<AdcConfig>(m, "AdcConfig")
      .def(py::init<>())
      .def_readwrite("bits", &AdcConfig::bits)
      .def_readwrite("full_scale_v", &AdcConfig::full_scale_v)
      .def_readwrite("offset_v", &AdcConfig::offset_v)
      .def("lsb_v", &AdcConfig::lsb_v)
      .def("to_volts", &AdcConfig::to_volts);

  py::enum_<IlluminationPattern>(m, "IlluminationPattern")
      .value("ALL_LIT", IlluminationPattern::AllLit)
      .value("ALL_DARK", IlluminationPattern::AllDark)
      .value("ALTERNATING", IlluminationPattern::Alternating)
      .value("POISSON", IlluminationPattern::Poisson);

  py::class_<Illumination>(m, "Illumination")
      .def(py::init<>())
      .def_readwrite("pattern", &Illumination::pattern)
      .def_readwrite("mu_gate", &Illumination::mu_gate)
      .def("lit", &Illumination::lit);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("gate", &Scenario::gate)
      .def_readwrite("devices", &Scenario::devices)
      .def_readwrite("adc", &Scenario::adc)
      .def_readwrite("illumination", &Scenario::illumination)
      .def_readwrite("noise_sigma_v", &Scenario::noise_sigma_v)
      .def_readwrite("n_gates", &Scenario::n_gates)
      .def_readwrite("seed", &Scenario::seed)
      .def("validate", &Scenario::validate);

  py::enum_<AvalancheCause>(m, "AvalancheCause")
      .value("NONE", AvalancheCause::None)
      .value("PHOTON", AvalancheCause::Photon)
      .value("DARK", AvalancheCause::Dark)
      .value("AFTERPULSE", AvalancheCause::Afterpulse)
      .value("CROSSTALK", AvalancheCause::Crosstalk);

  py::class_<GateTruth>(m, "GateTruth")
      .def_readonly("gate_index", &GateTruth::gate_index)
      .def_readonly("photon_present", &GateTruth::photon_present)
      .def_readonly("avalanche", &GateTruth::avalanche)
      .def_readonly("cause", &GateTruth::cause);

  py::class_<PySimulation>(m, "Simulation")
      .def_readonly("frames", &PySimulation::frames,
                    "per-channel uint16 arrays of shape [n_gates, samples_per_gate]")
      .def_readonly("truth", &PySimulation::truth);

  py::class_<CompensatorConfig>(m, "CompensatorConfig")
      .def(py::init<>())
      .def_readwrite("window_n", &CompensatorConfig::window_n)
      .def_readwrite("warmup_gates", &CompensatorConfig::warmup_gates)
      .def_readwrite("guard_multiplier", &CompensatorConfig::guard_multiplier)
      .def_readwrite("timing_start", &CompensatorConfig::timing_start)
      .def_readwrite("timing_end", &CompensatorConfig::timing_end)
      .def_readwrite("v_th", &CompensatorConfig::v_th);

  py::class_<Decision>(m, "Decision")
      .def_readonly("gate_index", &Decision::gate_index)
      .def_readonly("channel", &Decision::channel)
      .def_readonly("click", &Decision::click)
      .def_readonly("peak_v", &Decision::peak_v)
      .def_readonly("peak_sample", &Decision::peak_sample)
      .def_readonly("withheld", &Decision::withheld)
      .def("__repr__", [](const Decision& d) {
        return "Decision(gate=" + std::to_string(d.gate_index) +
               ", click=" + (d.click ? std::string("True") : std::string("False")) +
               ", peak_v=" + std::to_string(d.peak_v) + ")";
      });

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("v_th", &SweepRow::v_th)
      .def_readonly("gates_lit", &SweepRow::gates_lit)
      .def_readonly("clicks_lit", &SweepRow::clicks_lit)
      .def_readonly("gates_dark", &SweepRow::gates_dark)
      .def_readonly("clicks_dark", &SweepRow::clicks_dark)
      .def_readonly("p_pd", &SweepRow::p_pd)
      .def_readonly("p_pd_ci_lo", &SweepRow::p_pd_ci_lo)
      .def_readonly("p_pd_ci_hi", &SweepRow::p_pd_ci_hi)
      .def_readonly("p_dk", &SweepRow::p_dk)
      .def_readonly("p_dk_ci_lo", &SweepRow::p_dk_ci_lo)
      .def_readonly("p_dk_ci_hi", &SweepRow::p_dk_ci_hi)
      .def_readonly("efficiency_est", &SweepRow::efficiency_est);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("frame_checksum", &SweepResult::frame_checksum);

  py::class_<KeyRateParams>(m, "KeyRateParams")
      .def(py::init<>())
      .def_readwrite("mu", &KeyRateParams::mu)
      .def_readwrite("channel_loss_db", &KeyRateParams::channel_loss_db)
      .def_readwrite("eta_det", &KeyRateParams::eta_det)
      .def_readwrite("p_dk", &KeyRateParams::p_dk)
      .def_readwrite("e_det", &KeyRateParams::e_det)
      .def_readwrite("sift_q", &KeyRateParams::sift_q)
      .def_readwrite("f_ec", &KeyRateParams::f_ec);

  py::class_<RfLinkSpec>(m, "RfLinkSpec")
      .def(py::init<>())
      .def_readwrite("z0_ohm", &RfLinkSpec::z0_ohm)
      .def_readwrite("wire_inductance_per_mm", &RfLinkSpec::wire_inductance_per_mm)
      .def_readwrite("wire_length_mm", &RfLinkSpec::wire_length_mm)
      .def_readwrite("shunt_c_f", &RfLinkSpec::shunt_c_f)
      .def_readwrite("f_max_hz", &RfLinkSpec::f_max_hz)
      .def_readwrite("n_points", &RfLinkSpec::n_points);

  py::class_<WireSpec>(m, "WireSpec")
      .def(py::init<>())
      .def_readwrite("count", &WireSpec::count)
      .def_readwrite("conductivity_k", &WireSpec::conductivity_k)
      .def_readwrite("cross_section_m2", &WireSpec::cross_section_m2)
      .def_readwrite("length_m", &WireSpec::length_m)
      .def_readwrite("material", &WireSpec::material);

  // --- signal model ------------------------------------------------------
  m.def("gate_feedthrough_waveform", &gate_feedthrough_waveform, py::arg("gate"),
        py::arg("device"));
  m.def("avalanche_pulse", &avalanche_pulse, py::arg("gate"), py::arg("device"),
        py::arg("onset_fraction"), py::arg("amplitude_v"));
  m.def("avalanche_pulse_window", &avalanche_pulse_window, py::arg("gate"),
        py::arg("device"), py::arg("onset_fraction"), py::arg("amplitude_v"),
        py::arg("first_sample"), py::arg("n_samples"));
  m.def("apply_device_variation", &apply_device_variation, py::arg("base"),
        py::arg("seed"));
  m.def(
      "quantize",
      [](const std::vector<double>& analog, const AdcConfig& adc) {
        return quantize(analog, adc);
      },
      py::arg("analog"), py::arg("adc"));
  m.def(
      "simulate_gate_train",
      [](const Scenario& scenario, int threads) {
        SimulationResult sim = simulate_gate_train(scenario, threads);
        PySimulation out;
        for (auto& f : sim.frames) out.frames.push_back(frames_to_array(f));
        out.truth = std::move(sim.truth);
        return out;
      },
      py::arg("scenario"), py::arg("threads") = 1);

  // --- compensator -------------------------------------------------------
  m.def(
      "process_stream",
      [](const py::array_t<std::uint16_t>& frames, const CompensatorConfig& cfg,
         const AdcConfig& adc, int channel) {
        return process_stream(frames_from_array(frames, adc.bits), cfg, adc, channel);
      },
      py::arg("frames"), py::arg("config"), py::arg("adc"), py::arg("channel") = 0);

  // --- characterization --------------------------------------------------
  m.def(
      "count_statistics",
      [](const std::vector<Decision>& decisions, const Illumination& ill,
         double v_th_label, std::optional<double> poisson_mu) {
        return count_statistics(decisions, ill, v_th_label, poisson_mu);
      },
      py::arg("decisions"), py::arg("illumination"), py::arg("v_th_label") = 0.0,
      py::arg("poisson_mu") = std::nullopt);
  m.def(
      "threshold_sweep",
      [](const Scenario& scenario, const CompensatorConfig& comp,
         const std::vector<double>& thresholds, int channel, int threads) {
        return threshold_sweep(scenario, comp, thresholds, channel, threads);
      },
      py::arg("scenario"), py::arg("compensator"), py::arg("thresholds"),
      py::arg("channel") = 0, py::arg("threads") = 1);
  m.def("dark_at_matched_efficiency", &dark_at_matched_efficiency, py::arg("sweep_a"),
        py::arg("sweep_b"), py::arg("target_p_pd"));
  m.def(
      "wilson_interval",
      [](std::uint64_t successes, std::uint64_t trials) {
        const ProportionCi ci = wilson_interval(successes, trials);
        return py::make_tuple(ci.p, ci.lo, ci.hi);
      },
      py::arg("successes"), py::arg("trials"));

  // --- key rate ----------------------------------------------------------
  m.def("binary_entropy", &binary_entropy, py::arg("e"));
  m.def(
      "gain_and_qber",
      [](const KeyRateParams& p) {
        const GainQber gq = gain_and_qber(p);
        return py::make_tuple(gq.gain, gq.qber);
      },
      py::arg("params"));
  m.def(
      "shor_preskill_rate",
      [](double gain, double qber, double sift_q, double f_ec) {
        return shor_preskill_rate(gain, qber, sift_q, f_ec);
      },
      py::arg("gain"), py::arg("qber"), py::arg("sift_q") = 0.5, py::arg("f_ec") = 1.0);
  m.def(
      "key_rate",
      [](const KeyRateParams& p) { return shor_preskill_rate(p); },
      py::arg("params"));
  m.def("dark_count_gain", &dark_count_gain, py::arg("params"),
        py::arg("reduction_factor") = 10.0);

  // --- hardware budgets ---------------------------------------------------
  m.def("s21_magnitude", &s21_magnitude, py::arg("spec"), py::arg("f_hz"));
  m.def(
      "rf_bandwidth",
      [](const RfLinkSpec& spec) {
        const BandwidthResult r = rf_bandwidth(spec);
        return py::make_tuple(r.f_3db_hz, r.at_ceiling);
      },
      py::arg("spec"));
  m.def(
      "min_length_for_bandwidth",
      [](const RfLinkSpec& spec, double target_hz) {
        const LengthResult r = min_length_for_bandwidth(spec, target_hz);
        return py::make_tuple(r.length_mm, r.at_bound);
      },
      py::arg("spec"), py::arg("target_hz"));
  m.def(
      "thermal_flux",
      [](const std::vector<WireSpec>& wires, double delta_t_k) {
        const ThermalResult r = thermal_flux(wires, delta_t_k);
        return py::make_tuple(r.total_mw, r.per_wire_mw);
      },
      py::arg("wires"), py::arg("delta_t_k"));
  m.def(
      "budget_check",
      [](double flux_mw, double budget_mw) {
        const BudgetResult r = budget_check(flux_mw, budget_mw);
        return py::make_tuple(r.pass, r.margin_mw);
      },
      py::arg("flux_mw"), py::arg("budget_mw") = 250.0);

  // --- config ------------------------------------------------------------
  m.def("scenario_from_json", &scenario_from_json, py::arg("text"));
}
