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

#include "segdist/picksim.hpp"

#include <cmath>

#include "segdist/error.hpp"
#include "segdist/rng.hpp"

namespace segdist {
namespace {

// Largest d >= 0 with d^2 + dc^2 <= r2, or -1 if none.
std::int64_t half_extent(std::int64_t dc, double r2) {
  const double rest = r2 - static_cast<double>(dc * dc);
  if (rest < 0) return -1;
  auto d = static_cast<std::int64_t>(std::floor(std::sqrt(rest)));
  while (static_cast<double>((d + 1) * (d + 1) + dc * dc) <= r2) ++d;
  while (d >= 0 && static_cast<double>(d * d + dc * dc) > r2) --d;
  return d;
}

void finish(PickSimResult& r) {
  if (r.valid == 0) {
    r.rate.reset();
    r.stderr_rate.reset();
    return;
  }
  const double n = static_cast<double>(r.valid);
  const double rate = static_cast<double>(r.double_picks) / n;
  r.rate = rate;
  r.stderr_rate = std::sqrt(rate * (1.0 - rate) / n);
}

}  // namespace

void validate_config(const PickSimConfig& config) {
  if (!(config.radius >= 1.0) || !std::isfinite(config.radius)) {
    throw InvalidArgumentError("gripper radius must be >= 1 pixel");
  }
  if (config.n_probes < 1) {
    throw InvalidArgumentError("the simulation needs at least one probe");
  }
}

std::optional<BinaryMask> disc_pixels(PixelCoord center, double radius,
                                      std::uint32_t height,
                                      std::uint32_t width) {
  if (!(radius >= 1.0)) throw InvalidArgumentError("disc radius must be >= 1");
  const double r2 = radius * radius;
  const std::int64_t reach = half_extent(0, r2);
  const std::int64_t row = center.row;
  const std::int64_t col = center.col;
  if (row - reach < 0 || col - reach < 0 || row + reach >= height ||
      col + reach >= width) {
    return std::nullopt;
  }
  std::vector<Run> runs;
  runs.reserve(static_cast<std::size_t>(2 * reach + 1));
  for (std::int64_t dc = -reach; dc <= reach; ++dc) {
    const std::int64_t d = half_extent(dc, r2);
    const auto base = static_cast<std::uint64_t>(col + dc) * height;
    runs.push_back({base + static_cast<std::uint64_t>(row - d),
                    base + static_cast<std::uint64_t>(row + d + 1)});
  }
  return BinaryMask::from_runs(height, width, std::move(runs));
}

PixelCoord probe_center(std::uint64_t seed, std::uint64_t index,
                        std::uint32_t height, std::uint32_t width) {
  SplitMix64 rng(stream_key(seed, index));
  const std::uint64_t pixel =
      rng.uniform(static_cast<std::uint64_t>(height) * width);
  return {static_cast<std::uint32_t>(pixel % height),
          static_cast<std::uint32_t>(pixel / height)};
}

PickSimResult estimate_double_pick(std::span<const BinaryMask> predictions,
                                   std::span<const BinaryMask> ground_truths,
                                   std::uint32_t height, std::uint32_t width,
                                   const PickSimConfig& config) {
  validate_config(config);
  const BinaryMask frame = BinaryMask::empty(height, width);
  for (const BinaryMask& m : predictions) require_same_dims(frame, m);
  for (const BinaryMask& m : ground_truths) require_same_dims(frame, m);

  PickSimResult result;
  result.probes = config.n_probes;
  for (std::uint64_t i = 0; i < config.n_probes; ++i) {
    const PixelCoord c =
        probe_center(config.seed, config.first_probe + i, height, width);
    const auto disc = disc_pixels(c, config.radius, height, width);
    if (!disc) continue;
    int holders = 0;
    for (const BinaryMask& p : predictions) {
      if (contains(p, *disc) && ++holders > 1) break;
    }
    if (holders != 1) continue;
    ++result.valid;
    int touched = 0;
    for (const BinaryMask& g : ground_truths) {
      if (intersects(g, *disc) && ++touched > 1) break;
    }
    if (touched > 1) ++result.double_picks;
  }
  finish(result);
  return result;
}

PickSimResult combine(std::span<const PickSimResult> parts) {
  PickSimResult total;
  for (const PickSimResult& p : parts) {
    total.double_picks += p.double_picks;
    total.valid += p.valid;
    total.probes += p.probes;
  }
  finish(total);
  return total;
}

double pickable_area_fraction(std::span<const BinaryMask> predictions,
                              std::span<const BinaryMask> ground_truths) {
  std::uint64_t pred_area = 0;
  std::uint64_t gt_area = 0;
  for (const BinaryMask& m : predictions) pred_area += m.area();
  for (const BinaryMask& m : ground_truths) gt_area += m.area();
  if (gt_area == 0) {
    throw InvalidArgumentError("pickable area needs non-empty ground truth");
  }
  return static_cast<double>(pred_area) / static_cast<double>(gt_area);
}

}  // namespace segdist
