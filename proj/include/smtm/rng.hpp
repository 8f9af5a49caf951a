#pragma once

// Keyed random substreams.
//
// Every random draw in the library comes from a short-lived generator derived
// from a key (seed, chain, iteration, purpose, index). Two computations that
// use the same key see the same numbers no matter which thread runs them or in
// which order, which is what makes parallel candidate evaluation bit-identical
// to the serial path.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace smtm::rng {

enum class Purpose : std::uint64_t {
  Candidate = 1,
  Reference = 2,
  Select = 3,
  Accept = 4,
  IdealForward = 5,
  IdealBackward = 6,
  Diagnostic = 7,
  DiagnosticReference = 8,
  LimitW = 9,
  LimitV = 10,
  Init = 11,
  Test = 12,
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;
  std::uint64_t iteration = 0;
  Purpose purpose = Purpose::Candidate;
  std::uint64_t index = 0;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) noexcept {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

using Engine = Xoshiro256;

inline std::uint64_t hash_key(const StreamKey& key) noexcept {
  std::uint64_t state = key.seed;
  std::uint64_t h = splitmix64(state);
  for (std::uint64_t part : {key.chain, key.iteration, static_cast<std::uint64_t>(key.purpose),
                             key.index}) {
    state = h ^ (part + 0x632BE59BD9B4E019ULL);
    h = splitmix64(state);
  }
  return h;
}

inline Engine substream(const StreamKey& key) noexcept { return Engine(hash_key(key)); }

/// Uniform on the open interval (0, 1).
inline double uniform01(Engine& eng) noexcept {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_gumbel(Engine& eng) noexcept { return -std::log(-std::log(uniform01(eng))); }

}  // namespace smtm::rng
