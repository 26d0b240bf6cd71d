#pragma once

// Counter-derived random streams.
//
// Every Monte Carlo trial gets its own stream whose seed is a stable hash of
// (master seed, domain, index), so a trial's draws never depend on how many
// other trials ran before it or on which worker ran it. Domains 0..3 are the
// four joint-measurement settings in table order; other subsystems use the
// constants below.

#include <cstdint>
#include <limits>

namespace entangle {

namespace stream_domain {
inline constexpr std::uint64_t kBlochCollapse = 16;
inline constexpr std::uint64_t kUniversalAverage = 17;
inline constexpr std::uint64_t kLhvStrategies = 18;
}  // namespace stream_domain

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable stream seed for (master, domain, index):
///   h0 = mix64(master + phi), h1 = mix64(h0 ^ (domain + 1) * phi),
///   seed = mix64(h1 ^ (index + 1) * c)
/// with phi = 0x9e3779b97f4a7c15 and c = 0xd1b54a32d192ed03.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t domain, std::uint64_t index) {
  constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;
  constexpr std::uint64_t kIndexMul = 0xd1b54a32d192ed03ULL;
  const std::uint64_t h0 = mix64(master + kPhi);
  const std::uint64_t h1 = mix64(h0 ^ ((domain + 1) * kPhi));
  return mix64(h1 ^ ((index + 1) * kIndexMul));
}

/// SplitMix64 generator; models std::uniform_random_bit_generator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : state_(seed) {}
  static Stream derived(std::uint64_t master, std::uint64_t domain, std::uint64_t index) {
    return Stream(derive_stream_seed(master, domain, index));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits; every value is a multiple of 2^-53.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// True with probability p (exactly never for p = 0, always for p = 1).
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace entangle
