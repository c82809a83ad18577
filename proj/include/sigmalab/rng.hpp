#pragma once

#include <array>
#include <cstdint>

#include "sigmalab/types.hpp"

namespace sigmalab::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
constexpr Counter philox4x32(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

// Which consumer draws from a stream. Different domains never share counters,
// so e.g. excursion signs are independent of the path increments.
enum class Domain : std::uint32_t {
  BrownianIncrements = 0,
  ExcursionSigns = 1,
  NestedContinuation = 2,
  Auxiliary = 3,
};

// Counter layout: word 0 = block index, word 1 = substream, word 2 = stream
// index, word 3 = domain. The key is the 64-bit master seed.
struct StreamAddress {
  Key key{};
  std::uint32_t substream = 0;
  std::uint32_t stream = 0;
  Domain domain = Domain::BrownianIncrements;

  static StreamAddress from(const SeedSpec& seed, Domain domain, std::uint32_t substream = 0) noexcept {
    return StreamAddress{{static_cast<std::uint32_t>(seed.master_seed),
                          static_cast<std::uint32_t>(seed.master_seed >> 32)},
                         substream, seed.stream_index, domain};
  }

  Counter counter(std::uint32_t block) const noexcept {
    return {block, substream, stream, static_cast<std::uint32_t>(domain)};
  }
};

/// 53-bit uniform in [0, 1) from two Philox words.
constexpr double uniform53(std::uint32_t w0, std::uint32_t w1) noexcept {
  const std::uint64_t bits = (std::uint64_t{w0 >> 5} << 26) | (w1 >> 6);
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Uniform number `i` of a stream; two uniforms per Philox block.
inline double uniform_at(const StreamAddress& addr, std::uint64_t i) noexcept {
  const Counter out = philox4x32(addr.counter(static_cast<std::uint32_t>(i / 2)), addr.key);
  return (i % 2 == 0) ? uniform53(out[0], out[1]) : uniform53(out[2], out[3]);
}

} // namespace sigmalab::rng
