/*
 * Copyright 2026 The segdist Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Portable random numbers.
//
// Everything random in segdist is derived from SplitMix64 (Steele, Lea and
// Flood 2014), chosen because it is fully specified by a few lines of 64-bit
// integer arithmetic and therefore reproducible bit-for-bit in any language:
//
//   GOLDEN = 0x9E3779B97F4A7C15
//   mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//            return z ^ (z >> 31)
//   the n-th output (n = 1, 2, ...) of a stream with state s is
//            mix(s + n * GOLDEN)                      (all mod 2^64)
//
// Bounded integers use rejection: draw u until u >= (2^64 mod bound), return
// u mod bound. Unit doubles take the top 53 bits: (u >> 11) * 2^-53.
//
// Counter-based use: stream_key(seed, i) = mix(seed + (i + 1) * GOLDEN) is the
// i-th output of the stream seeded by `seed`; it seeds an independent
// sub-stream for item i, so item i's draws never depend on how many draws
// other items consumed.

#ifndef SEGDIST_RNG_HPP_
#define SEGDIST_RNG_HPP_

#include <cstdint>

namespace segdist {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) {
  return splitmix_mix(seed + (index + 1) * kGolden);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t next() {
    state_ += kGolden;
    return splitmix_mix(state_);
  }

  // Uniform in [0, bound). bound must be positive.
  constexpr std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t u = next();
      if (u >= threshold) return u % bound;
    }
  }

  // Uniform in [lo, hi], inclusive.
  constexpr std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform in [0, 1).
  constexpr double unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace segdist

#endif  // SEGDIST_RNG_HPP_
