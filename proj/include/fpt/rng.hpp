#pragma once

#include <cstdint>
#include <limits>

namespace fpt {

/// Counter-keyed random stream: xoshiro256** whose state is derived from
/// (seed, index, lane) through SplitMix64. Stream (s, i) is the same object
/// no matter which worker constructs it, which is what makes parallel runs
/// independent of the worker count.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();

 private:
  std::uint64_t s_[4];
};

}  // namespace fpt
