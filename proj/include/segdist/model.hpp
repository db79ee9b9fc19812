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

#ifndef SEGDIST_MODEL_HPP_
#define SEGDIST_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segdist/mask.hpp"

namespace segdist {

using ImageId = std::int64_t;
using CategoryId = std::int64_t;

struct Instance {
  BinaryMask mask;
  CategoryId category = 1;
  double score = 1.0;
};

// One complete segmentation of an image. Instances may overlap.
struct Hypothesis {
  std::vector<Instance> instances;
};

// k segmentation hypotheses for one image, plus an optional point estimate.
struct SampleSet {
  ImageId image_id = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<Hypothesis> samples;
  std::optional<Hypothesis> mode;

  std::size_t k() const { return samples.size(); }
};

// Ground-truth instances always carry score 1.0.
struct GroundTruthImage {
  ImageId image_id = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<Instance> instances;
};

// Position of an instance inside a SampleSet.
struct InstanceRef {
  std::size_t sample = 0;
  std::size_t instance = 0;

  friend auto operator<=>(const InstanceRef&, const InstanceRef&) = default;
};

struct Violation {
  std::string location;  // e.g. "sample 2 instance 0"
  std::string message;
};

std::vector<Violation> validate(const SampleSet& set);
std::vector<Violation> validate(const GroundTruthImage& image);
std::vector<Violation> validate_instance(const Instance& instance,
                                         std::uint32_t height,
                                         std::uint32_t width);

// Joins violations into one message, one per line.
std::string describe(std::span<const Violation> violations);

// Indices of `scores` ordered by descending score; equal scores keep their
// input order. Flattened instance lists are laid out sample-major, so the
// input position already encodes (sample index, instance index).
std::vector<std::size_t> canonical_order(std::span<const double> scores);
std::vector<std::size_t> canonical_order(std::span<const Instance> instances);

// All instances of all samples, sample-major, with their origin.
struct FlatInstances {
  std::vector<Instance> instances;
  std::vector<InstanceRef> origin;
};
FlatInstances flatten(const SampleSet& set);

}  // namespace segdist

#endif  // SEGDIST_MODEL_HPP_
