#include "fpt/rng.hpp"

#include <cmath>
#include <numbers>

namespace fpt {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  std::uint64_t key = seed;
  std::uint64_t mixed = splitmix64(key);
  key = mixed ^ (index * 0xD1B54A32D192ED03ULL);
  mixed = splitmix64(key);
  key = mixed ^ (lane * 0x8CB92BA72F3D8DD7ULL);
  for (auto& word : s_) word = splitmix64(key);
}

Stream::result_type Stream::operator()() {
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

double Stream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() {
  // Box-Muller without caching so every draw consumes exactly two words.
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  return r * std::cos(2.0 * std::numbers::pi * uniform());
}

double Stream::exponential() { return -std::log(uniform()); }

}  // namespace fpt
