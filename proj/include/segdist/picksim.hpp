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

// Monte-Carlo double-pick simulation.
//
// A gripper is modelled as a disc of fixed pixel radius. Probe centres are
// drawn uniformly over the pixel grid. A probe is valid when its disc lies
// inside the image and is fully contained in exactly one predicted mask; a
// valid probe is a double pick when its disc touches two or more ground-truth
// masks. The estimated double-pick rate is R = D / N.
//
// Probe i of a run with seed S takes its centre from the SplitMix64 stream
// keyed by stream_key(S, i) (see rng.hpp): the first draw u with
// u >= 2^64 mod (H * W) gives the linear pixel index u mod (H * W), in the
// same column-major order as the RLE (row = index % H, col = index / H).

#ifndef SEGDIST_PICKSIM_HPP_
#define SEGDIST_PICKSIM_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "segdist/mask.hpp"
#include "segdist/model.hpp"

namespace segdist {

struct PickSimConfig {
  double radius = 8.0;
  std::uint64_t n_probes = 100000;
  std::uint64_t seed = 0;
  // Index of the first probe; lets a multi-image run continue one stream.
  std::uint64_t first_probe = 0;
};

struct PickSimResult {
  std::uint64_t double_picks = 0;  // D
  std::uint64_t valid = 0;         // N
  std::uint64_t probes = 0;
  // Empty when no probe was valid.
  std::optional<double> rate;
  std::optional<double> stderr_rate;
};

struct PixelCoord {
  std::uint32_t row;
  std::uint32_t col;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

void validate_config(const PickSimConfig& config);

// Pixels within `radius` of `center` (centre-to-centre distance). Empty when
// the disc would leave the grid.
std::optional<BinaryMask> disc_pixels(PixelCoord center, double radius,
                                      std::uint32_t height, std::uint32_t width);

// Centre of probe `index` for the given seed and grid.
PixelCoord probe_center(std::uint64_t seed, std::uint64_t index,
                        std::uint32_t height, std::uint32_t width);

PickSimResult estimate_double_pick(std::span<const BinaryMask> predictions,
                                   std::span<const BinaryMask> ground_truths,
                                   std::uint32_t height, std::uint32_t width,
                                   const PickSimConfig& config);

// Sums D and N over images and recomputes the rate.
PickSimResult combine(std::span<const PickSimResult> parts);

// Total predicted area over total ground-truth area. Throws
// InvalidArgumentError when the ground truth is empty.
double pickable_area_fraction(std::span<const BinaryMask> predictions,
                              std::span<const BinaryMask> ground_truths);

}  // namespace segdist

#endif  // SEGDIST_PICKSIM_HPP_
