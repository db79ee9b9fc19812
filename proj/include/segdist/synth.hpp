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

// Synthetic scenes with an exactly known posterior.
//
// A scene is a finite mixture of complete ground-truth segmentations. Two
// independent kinds of ambiguity generate the mixture:
//
//  * merge pairs: two abutting rectangles that are one object with
//    probability merge_probability and two objects otherwise;
//  * uncertain boundaries: a single object whose extent is grown (positive
//    offset) or shrunk (negative offset) by a whole number of pixels, with
//    the offset drawn from boundary_offsets.
//
// Because the factors are independent, the mixture is their product lattice
// and every component weight is an exact rational product. The first factor
// varies slowest in component order; merge pairs come before boundaries, and
// within a merge pair "split" precedes "merged".

#ifndef SEGDIST_SYNTH_HPP_
#define SEGDIST_SYNTH_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "segdist/model.hpp"

namespace segdist {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "3/10", "0.3", "1e-1" or "1". Decimal text is read exactly, so
// "0.3" is 3/10. Throws InvalidArgumentError.
Rational parse_rational(const std::string& text);
// Exact rational value of the shortest decimal that round-trips `value`.
Rational rational_from_double(double value);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

struct WeightedOffset {
  std::int32_t offset = 0;
  Rational weight = 1;
};

struct SceneSpec {
  std::uint32_t height = 64;
  std::uint32_t width = 64;
  std::uint32_t min_objects = 2;
  std::uint32_t max_objects = 4;
  // Abutting pairs among the objects (at most objects / 2 are used).
  std::uint32_t merge_pairs = 1;
  Rational merge_probability = Rational(1, 2);
  std::vector<WeightedOffset> boundary_offsets = {{0, 1}};
  // Single objects whose boundary offset is drawn (at most the number of
  // single objects are used).
  std::uint32_t uncertain_boundaries = 1;
  std::uint32_t categories = 1;  // 1 or 2
  std::size_t enumeration_cap = 4096;
  // Default seed for tools that take the spec from a file.
  std::uint64_t seed = 0;
};

// Throws InvalidArgumentError on probabilities outside [0, 1], offset weights
// not summing to exactly 1, or empty ranges.
void validate_spec(const SceneSpec& spec);

struct MixtureComponent {
  Rational weight;
  GroundTruthImage truth;
  // Index of the chosen alternative for each ambiguity factor.
  std::vector<std::uint32_t> choices;
};

struct Scene {
  ImageId image_id = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<MixtureComponent> components;
  // Component drawn as the actual ground truth.
  std::size_t realized = 0;

  const GroundTruthImage& realized_truth() const {
    return components.at(realized).truth;
  }
  // Highest-weight component, lowest index on ties.
  std::size_t mode_component() const;
};

// Number of mixture components the spec would induce for a given object
// count, before any layout happens.
std::size_t component_count(const SceneSpec& spec, std::uint32_t objects);

Scene generate_scene(const SceneSpec& spec, std::uint64_t seed,
                     ImageId image_id = 1);

// k independent component draws, each turned into a hypothesis with scores
// 1.0; the mode hypothesis is the highest-weight component.
SampleSet sample_hypotheses(const Scene& scene, std::size_t k,
                            std::uint64_t seed);

// P(some instance of the true segmentation contains `mask`), exactly.
Rational containment_probability(const Scene& scene, const BinaryMask& mask);

}  // namespace segdist

#endif  // SEGDIST_SYNTH_HPP_
