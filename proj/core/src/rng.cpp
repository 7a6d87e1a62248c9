#include "censwald/rng.hpp"

#include <cmath>

namespace censwald {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) : seed_(seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256 Xoshiro256::for_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t mixed = splitmix64(state);
  state = mixed + index * 0xd1b54a32d192ed03ULL;
  return Xoshiro256(splitmix64(state));
}

std::uint64_t Xoshiro256::next() {
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

double Xoshiro256::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Xoshiro256::exponential(double mean) { return -mean * std::log(uniform()); }

}  // namespace censwald
