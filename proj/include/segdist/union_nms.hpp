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

#ifndef SEGDIST_UNION_NMS_HPP_
#define SEGDIST_UNION_NMS_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "segdist/model.hpp"

namespace segdist {

struct NmsParams {
  double tau = 0.5;         // suppress when IoU > tau
  bool class_aware = true;  // only same-category instances suppress
};

struct NmsResult {
  // Keepers in canonical score order.
  std::vector<std::size_t> kept;
  // suppressed index -> the first keeper (in canonical order) that overlaps it.
  std::map<std::size_t, std::size_t> suppressor;

  // Indices suppressed by `keeper`, ascending.
  std::vector<std::size_t> suppressed_by(std::size_t keeper) const;
};

void validate_params(const NmsParams& params);

// Greedy mask NMS. Suppressed instances never suppress others.
NmsResult standard_nms(std::span<const Instance> instances,
                       const NmsParams& params);

// Plain NMS over the flattened samples; returns the keepers.
std::vector<Instance> nms_keepers(std::span<const Instance> instances,
                                  const NmsParams& params);

// NMS over every instance of every sample; each keeper's mask is replaced by
// the union of itself and everything it suppressed. Keeper score and category
// are retained. Output follows keeper order.
std::vector<Instance> union_nms(const SampleSet& set, const NmsParams& params);

}  // namespace segdist

#endif  // SEGDIST_UNION_NMS_HPP_
