#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ribp {

/// Seeded, splittable random stream.
///
/// The engine is xoshiro256** (Blackman & Vigna). Its 256-bit state is filled
/// by four SplitMix64 outputs whose seed is `mix(seed) ^ mix(stream + c)`, with
/// `mix` the SplitMix64 finalizer and `c` the 64-bit golden-ratio constant.
/// A given (seed, stream) pair therefore yields the same sequence on every
/// platform. `split(k)` derives an independent child stream deterministically,
/// which is how per-row and per-replicate streams are handed out.
///
/// Satisfies std::uniform_random_bit_generator so it can drive the
/// Boost.Random distributions used in random.hpp.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Child stream `k`; does not advance this stream.
  [[nodiscard]] Rng split(std::uint64_t k) const;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace ribp
