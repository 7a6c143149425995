#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace spincount {

/// Philox4x32-10 block function.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint64_t kMul0 = 0xD2511F53u;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = kMul0 * ctr[0];
    const std::uint64_t p1 = kMul1 * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Stream identifiers; each purpose draws from its own counter space so that
/// adding draws to one never shifts another.
enum class StreamId : std::uint32_t {
  kSpinDynamics = 1,
  kPhotonDetection = 2,
  kDarkCounts = 3,
  kHeating = 4,
  kEnsemble = 5,
  kBootstrap = 6,
  kBurnIn = 7,
  kUser = 100,
};

/// Counter-based generator addressed by (seed, sequence, entity, stream).
/// Two generators with the same address produce the same numbers regardless
/// of which thread creates them or when.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t sequence, std::uint32_t entity, StreamId stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        sequence_(sequence),
        entity_(entity),
        stream_(static_cast<std::uint32_t>(stream)) {}

  std::uint32_t next_u32() noexcept {
    if (used_ == 4) refill();
    return block_[used_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_low() noexcept { return 1.0 - uniform(); }

  double exponential(double rate) noexcept {
    return -std::log(uniform_open_low()) / rate;
  }

  /// Box-Muller; the second variate is discarded to keep the draw count fixed.
  double gaussian() noexcept {
    const double u1 = uniform_open_low();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Cauchy with unit scale truncated to |x| <= limit.
  double truncated_cauchy(double limit) noexcept {
    const double edge = std::atan(limit);
    return std::tan((2.0 * uniform() - 1.0) * edge);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Poisson by sequential inversion, split into chunks so exp(-mean) never
  /// underflows.
  std::uint64_t poisson(double mean) noexcept {
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = mean > 30.0 ? 30.0 : mean;
      mean -= chunk;
      double p = std::exp(-chunk);
      double cdf = p;
      const double u = uniform();
      std::uint64_t k = 0;
      while (u > cdf && k < 1000) {
        ++k;
        p *= chunk / static_cast<double>(k);
        cdf += p;
      }
      total += k;
    }
    return total;
  }

  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % (n == 0 ? 1 : n);
  }

 private:
  void refill() noexcept {
    block_ = philox4x32({draw_++, sequence_, entity_, stream_}, key_);
    used_ = 0;
  }

  PhiloxKey key_;
  std::uint32_t sequence_;
  std::uint32_t entity_;
  std::uint32_t stream_;
  std::uint32_t draw_ = 0;
  PhiloxCounter block_{};
  int used_ = 4;
};

}  // namespace spincount
