#pragma once

#include <array>
#include <cstdint>

namespace censwald {

/// xoshiro256** seeded through SplitMix64.
///
/// Streams are derived from a (seed, stream index) pair so that any replication of a
/// Monte Carlo experiment can be regenerated independently of how work was scheduled.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  /// Independent generator for stream `index` of master seed `seed`.
  static Xoshiro256 for_stream(std::uint64_t seed, std::uint64_t index);

  /// Child generator for stream `index`, derived from this generator's seed.
  Xoshiro256 split(std::uint64_t index) const { return for_stream(seed_, index); }

  std::uint64_t next();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Exponential variate with the given mean, by inversion.
  double exponential(double mean);

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace censwald
