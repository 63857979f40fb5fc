#include "spadsim/io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "spadsim/errors.hpp"

namespace spadsim {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'A', 'D', 'S', 'I', 'M', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> b = {
      static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
      static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), b.size());
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::ifstream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::ifstream& in) {
  const std::uint64_t lo = get_u32(in);
  const std::uint64_t hi = get_u32(in);
  return lo | (hi << 32);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_frames(const std::filesystem::path& path, const FrameStream& frames) {
  std::ofstream out = open_out(path, true);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(frames.samples_per_gate));
  put_u32(out, static_cast<std::uint32_t>(frames.bits));
  put_u64(out, frames.n_gates());
  std::vector<unsigned char> buf(frames.codes.size() * 2);
  for (std::size_t i = 0; i < frames.codes.size(); ++i) {
    buf[2 * i] = static_cast<unsigned char>(frames.codes[i]);
    buf[2 * i + 1] = static_cast<unsigned char>(frames.codes[i] >> 8);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  finish(out, path);
}

FrameStream read_frames(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("bad magic in frame file: " + path.string());
  }
  FrameStream frames;
  frames.samples_per_gate = static_cast<int>(get_u32(in));
  frames.bits = static_cast<int>(get_u32(in));
  const std::uint64_t n_gates = get_u64(in);
  if (!in || frames.samples_per_gate <= 0 || frames.bits <= 0) {
    throw IoError("corrupt frame header: " + path.string());
  }
  const std::uint64_t n_codes = n_gates * frames.samples_per_gate;
  std::vector<unsigned char> buf(n_codes * 2);
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw IoError("truncated frame file: " + path.string());
  frames.codes.resize(n_codes);
  const std::uint16_t max_code =
      frames.bits >= 16 ? 0xffff
                        : static_cast<std::uint16_t>((1u << frames.bits) - 1);
  for (std::uint64_t i = 0; i < n_codes; ++i) {
    frames.codes[i] = static_cast<std::uint16_t>(buf[2 * i]) |
                      (static_cast<std::uint16_t>(buf[2 * i + 1]) << 8);
    if (frames.codes[i] > max_code) {
      throw IoError("sample code exceeds the stated bit depth: " + path.string());
    }
  }
  return frames;
}

void write_ground_truth_csv(const std::filesystem::path& path,
                            std::span<const GateTruth> truth) {
  std::ofstream out = open_out(path, false);
  out << "gate_index,photon_present,avalanche,cause\n";
  for (const GateTruth& t : truth) {
    out << t.gate_index << ',' << (t.photon_present ? 1 : 0) << ','
        << (t.avalanche ? 1 : 0) << ',' << to_string(t.cause) << '\n';
  }
  finish(out, path);
}

namespace {
void format_double(std::ofstream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out << buf;
}
}  // namespace

void write_decisions_csv(const std::filesystem::path& path,
                         std::span<const Decision> decisions) {
  std::ofstream out = open_out(path, false);
  out << "gate_index,channel,click,peak_v,peak_sample,withheld\n";
  for (const Decision& d : decisions) {
    out << d.gate_index << ',' << d.channel << ',' << (d.click ? 1 : 0) << ',';
    format_double(out, d.peak_v);
    out << ',' << d.peak_sample << ',' << (d.withheld ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep) {
  std::ofstream out = open_out(path, false);
  out << "v_th,gates_lit,clicks_lit,gates_dark,clicks_dark,"
         "p_pd,p_pd_ci_lo,p_pd_ci_hi,p_dk,p_dk_ci_lo,p_dk_ci_hi\n";
  for (const SweepRow& r : sweep.rows) {
    format_double(out, r.v_th);
    out << ',' << r.gates_lit << ',' << r.clicks_lit << ',' << r.gates_dark << ','
        << r.clicks_dark << ',';
    format_double(out, r.p_pd);
    out << ',';
    format_double(out, r.p_pd_ci_lo);
    out << ',';
    format_double(out, r.p_pd_ci_hi);
    out << ',';
    format_double(out, r.p_dk);
    out << ',';
    format_double(out, r.p_dk_ci_lo);
    out << ',';
    format_double(out, r.p_dk_ci_hi);
    out << '\n';
  }
  finish(out, path);
}

void write_rate_csv(const std::filesystem::path& path, std::span<const RateRow> rows) {
  std::ofstream out = open_out(path, false);
  out << "loss_db,mu,p_dk,Q,E,R\n";
  for (const RateRow& r : rows) {
    format_double(out, r.loss_db);
    out << ',';
    format_double(out, r.mu);
    out << ',';
    format_double(out, r.p_dk);
    out << ',';
    format_double(out, r.gain);
    out << ',';
    format_double(out, r.qber);
    out << ',';
    format_double(out, r.rate);
    out << '\n';
  }
  finish(out, path);
}

void write_gain_csv(const std::filesystem::path& path, std::span<const GainRow> rows) {
  std::ofstream out = open_out(path, false);
  out << "loss_db,ratio\n";
  for (const GainRow& r : rows) {
    format_double(out, r.loss_db);
    out << ',';
    format_double(out, r.ratio);
    out << '\n';
  }
  finish(out, path);
}

}  // namespace spadsim
