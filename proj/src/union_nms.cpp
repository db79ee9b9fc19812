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

#include "segdist/union_nms.hpp"

#include "segdist/error.hpp"

namespace segdist {

std::vector<std::size_t> NmsResult::suppressed_by(std::size_t keeper) const {
  std::vector<std::size_t> out;
  for (const auto& [idx, by] : suppressor) {
    if (by == keeper) out.push_back(idx);
  }
  return out;
}

void validate_params(const NmsParams& params) {
  if (!(params.tau > 0.0 && params.tau < 1.0)) {
    throw InvalidArgumentError("NMS threshold tau must lie in (0, 1), got " +
                               std::to_string(params.tau));
  }
}

NmsResult standard_nms(std::span<const Instance> instances,
                       const NmsParams& params) {
  validate_params(params);
  for (std::size_t i = 1; i < instances.size(); ++i) {
    require_same_dims(instances[0].mask, instances[i].mask);
  }
  NmsResult result;
  for (std::size_t i : canonical_order(instances)) {
    const Instance& cand = instances[i];
    bool suppressed = false;
    for (std::size_t k : result.kept) {
      const Instance& keeper = instances[k];
      if (params.class_aware && keeper.category != cand.category) continue;
      if (!intersects(keeper.mask, cand.mask)) continue;
      if (iou(keeper.mask, cand.mask) > params.tau) {
        result.suppressor.emplace(i, k);
        suppressed = true;
        break;
      }
    }
    if (!suppressed) result.kept.push_back(i);
  }
  return result;
}

std::vector<Instance> nms_keepers(std::span<const Instance> instances,
                                  const NmsParams& params) {
  const NmsResult r = standard_nms(instances, params);
  std::vector<Instance> out;
  out.reserve(r.kept.size());
  for (std::size_t k : r.kept) out.push_back(instances[k]);
  return out;
}

std::vector<Instance> union_nms(const SampleSet& set, const NmsParams& params) {
  if (auto v = validate(set); !v.empty()) throw ValidationError(describe(v));
  const FlatInstances flat = flatten(set);
  const NmsResult r = standard_nms(flat.instances, params);

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (const auto& [idx, by] : r.suppressor) groups[by].push_back(idx);

  std::vector<Instance> out;
  out.reserve(r.kept.size());
  for (std::size_t k : r.kept) {
    Instance merged = flat.instances[k];
    if (auto it = groups.find(k); it != groups.end()) {
      for (std::size_t j : it->second) {
        merged.mask = union_of(merged.mask, flat.instances[j].mask);
      }
    }
    out.push_back(std::move(merged));
  }
  return out;
}

}  // namespace segdist
