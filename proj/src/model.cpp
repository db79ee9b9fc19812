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

#include "segdist/model.hpp"

#include <algorithm>
#include <numeric>

namespace segdist {

std::vector<Violation> validate_instance(const Instance& instance,
                                         std::uint32_t height,
                                         std::uint32_t width) {
  std::vector<Violation> out;
  if (instance.mask.height() != height || instance.mask.width() != width) {
    out.push_back({"", "mask is " + std::to_string(instance.mask.height()) +
                           "x" + std::to_string(instance.mask.width()) +
                           ", image is " + std::to_string(height) + "x" +
                           std::to_string(width)});
  }
  if (!(instance.score >= 0.0 && instance.score <= 1.0)) {
    out.push_back({"", "score " + std::to_string(instance.score) +
                           " outside [0, 1]"});
  }
  if (instance.mask.area() == 0) out.push_back({"", "mask is empty"});
  return out;
}

std::vector<Violation> validate(const SampleSet& set) {
  std::vector<Violation> out;
  if (set.height == 0 || set.width == 0) {
    out.push_back({"image", "image dimensions must be positive"});
  }
  if (set.samples.empty()) out.push_back({"image", "no samples (k = 0)"});
  auto check = [&](const Hypothesis& h, const std::string& prefix) {
    for (std::size_t i = 0; i < h.instances.size(); ++i) {
      for (Violation v :
           validate_instance(h.instances[i], set.height, set.width)) {
        v.location = prefix + " instance " + std::to_string(i);
        out.push_back(std::move(v));
      }
    }
  };
  for (std::size_t s = 0; s < set.samples.size(); ++s) {
    check(set.samples[s], "sample " + std::to_string(s));
  }
  if (set.mode) check(*set.mode, "mode");
  return out;
}

std::vector<Violation> validate(const GroundTruthImage& image) {
  std::vector<Violation> out;
  if (image.height == 0 || image.width == 0) {
    out.push_back({"image", "image dimensions must be positive"});
  }
  for (std::size_t i = 0; i < image.instances.size(); ++i) {
    for (Violation v : validate_instance(image.instances[i], image.height,
                                         image.width)) {
      v.location = "annotation " + std::to_string(i);
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::string describe(std::span<const Violation> violations) {
  std::string s;
  for (const Violation& v : violations) {
    if (!s.empty()) s += '\n';
    s += v.location + ": " + v.message;
  }
  return s;
}

std::vector<std::size_t> canonical_order(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return idx;
}

std::vector<std::size_t> canonical_order(std::span<const Instance> instances) {
  std::vector<double> scores;
  scores.reserve(instances.size());
  for (const Instance& i : instances) scores.push_back(i.score);
  return canonical_order(scores);
}

FlatInstances flatten(const SampleSet& set) {
  FlatInstances flat;
  for (std::size_t s = 0; s < set.samples.size(); ++s) {
    const auto& insts = set.samples[s].instances;
    for (std::size_t i = 0; i < insts.size(); ++i) {
      flat.instances.push_back(insts[i]);
      flat.origin.push_back({s, i});
    }
  }
  return flat;
}

}  // namespace segdist
