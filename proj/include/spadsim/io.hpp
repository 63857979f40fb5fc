#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spadsim/charstats.hpp"
#include "spadsim/compensator.hpp"
#include "spadsim/sigmodel.hpp"

namespace spadsim {

/// Flat binary frame stream. Little-endian layout:
///   magic "SPADSIM1" (8 bytes), u32 samples_per_gate, u32 bits,
///   u64 n_gates, then n_gates * samples_per_gate u16 sample codes.
void write_frames(const std::filesystem::path& path, const FrameStream& frames);
FrameStream read_frames(const std::filesystem::path& path);

/// CSV header: gate_index,photon_present,avalanche,cause
void write_ground_truth_csv(const std::filesystem::path& path,
                            std::span<const GateTruth> truth);

/// CSV header: gate_index,channel,click,peak_v,peak_sample,withheld
void write_decisions_csv(const std::filesystem::path& path,
                         std::span<const Decision> decisions);

/// CSV header (exact): v_th,gates_lit,clicks_lit,gates_dark,clicks_dark,
/// p_pd,p_pd_ci_lo,p_pd_ci_hi,p_dk,p_dk_ci_lo,p_dk_ci_hi
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);

struct RateRow {
  double loss_db;
  double mu;
  double p_dk;
  double gain;
  double qber;
  double rate;
};

/// CSV header: loss_db,mu,p_dk,Q,E,R
void write_rate_csv(const std::filesystem::path& path, std::span<const RateRow> rows);

struct GainRow {
  double loss_db;
  double ratio;
};

/// CSV header: loss_db,ratio
void write_gain_csv(const std::filesystem::path& path, std::span<const GainRow> rows);

}  // namespace spadsim
