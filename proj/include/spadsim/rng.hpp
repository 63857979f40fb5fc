#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spadsim {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
//
// Every draw is a pure function of (key, counter), so a stream keyed by
// (seed, gate_index, stream_tag) produces the same values no matter how the
// simulation is partitioned across threads. This is what makes frame
// synthesis bit-reproducible under --threads 1 vs --threads N.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static Block generate(std::uint64_t key, const Block& counter) {
    std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key),
                                      static_cast<std::uint32_t>(key >> 32)};
    Block c = counter;
    for (int round = 0; round < 10; ++round) {
      c = one_round(c, k);
      k[0] += kW32A;
      k[1] += kW32B;
    }
    return c;
  }

 private:
  static constexpr std::uint32_t kW32A = 0x9E3779B9u;
  static constexpr std::uint32_t kW32B = 0xBB67AE85u;
  static constexpr std::uint32_t kM4x32A = 0xD2511F53u;
  static constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

  static void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                       std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
  }

  static Block one_round(const Block& c, const std::array<std::uint32_t, 2>& k) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hilo(kM4x32A, c[0], lo0, hi0);
    mul_hilo(kM4x32B, c[2], lo1, hi1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// One independent random stream addressed by (seed, gate_index, stream_tag).
///
/// Successive draws advance a block counter inside the stream; distinct
/// (gate_index, stream_tag) pairs never collide. Streams are cheap to
/// construct per gate.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t gate_index, std::uint32_t stream_tag)
      : seed_(seed),
        base_{static_cast<std::uint32_t>(gate_index),
              static_cast<std::uint32_t>(gate_index >> 32), stream_tag, 0} {}

  std::uint32_t next_u32() {
    if (word_ == 4) refill();
    return block_[word_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Standard normal via Box-Muller; draws pairs and caches the second value.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // 1 - u in (0, 1] keeps the log argument strictly positive.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double next_normal(double mean, double sigma) {
    return mean + sigma * next_normal();
  }

  /// Poisson sample by CDF inversion; consumes exactly one uniform.
  std::uint32_t next_poisson(double mu) {
    if (mu <= 0.0) return 0;
    const double u = next_double();
    double p = std::exp(-mu);
    double cdf = p;
    std::uint32_t k = 0;
    // mu values here are photon numbers per gate, i.e. small; the loop is
    // bounded defensively anyway.
    while (u > cdf && k < 100000) {
      ++k;
      p *= mu / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  void refill() {
    Philox4x32::Block ctr = base_;
    ctr[3] = block_index_++;
    block_ = Philox4x32::generate(seed_, ctr);
    word_ = 0;
  }

  std::uint64_t seed_;
  Philox4x32::Block base_;
  Philox4x32::Block block_{};
  std::uint32_t block_index_ = 0;
  int word_ = 4;  // forces refill on first draw
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Stream tags. Per-purpose streams keep draw budgets independent, so adding
/// a draw to one purpose never shifts another purpose's values.
enum StreamTag : std::uint32_t {
  kTagEvents = 0x10u,     // + channel
  kTagNoise = 0x20u,      // + channel
  kTagVariation = 0x30u,  // device parameter perturbation
  kTagOracle = 0x40u,     // reserved for test-side oracles
};

}  // namespace spadsim
