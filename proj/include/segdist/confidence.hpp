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

// p-confidence masks.
//
// Given k sampled segmentations of one image, a p-confidence mask is the
// intersection of one mask from each of at least ceil(k * p) distinct samples.
// It is contained in every mask it was built from, so it lies inside a
// sampled instance for at least a p fraction of the samples.
//
// extract() builds a set of pairwise-disjoint confidence masks greedily:
// every round, each sampled instance is tried as an anchor; the anchor is
// intersected with the best-overlapping mask of the other samples (overlap
// measured on pixels not yet claimed by earlier outputs), each candidate is
// scored by the mean score-weighted IoU against its support, and the best
// candidate is emitted and its pixels claimed.

#ifndef SEGDIST_CONFIDENCE_HPP_
#define SEGDIST_CONFIDENCE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "segdist/mask.hpp"
#include "segdist/model.hpp"

namespace segdist {

struct ConfidenceParams {
  double p = 0.9;             // confidence requirement, in (0, 1]
  double score_floor = 0.1;   // stop once the best candidate scores <= this
  std::optional<std::size_t> max_outputs;
};

struct ConfidenceMask {
  BinaryMask mask;
  double score = 0.0;
  // Anchor first, then one instance per other sample, by descending overlap.
  std::vector<InstanceRef> support;
  double p = 0.0;
  // Most frequent category among the support; ties go to the lowest id.
  CategoryId category = 0;
};

struct Candidate {
  BinaryMask mask;
  std::vector<InstanceRef> support;
};

// Throws InvalidArgumentError for p outside (0, 1] or a floor outside [0, 1].
void validate_params(const ConfidenceParams& params);

// Smallest support size n with n / k >= p, i.e. ceil(k * p), at least 1.
// k * p values within 1e-9 above an integer count as that integer, so that
// e.g. p = 0.9, k = 100 requires 90 rather than 91 when 0.9 * 100 rounds up.
std::size_t required_support(std::size_t k, double p);

// Confidence mask seeded by `anchor`, ignoring pixels in `claimed`. Returns
// nothing when the anchor has no unclaimed pixels, fewer than
// required_support - 1 other samples overlap it, or the intersection is empty.
std::optional<Candidate> candidate(InstanceRef anchor, const SampleSet& set,
                                   const BinaryMask& claimed, double p);

// Mean over the support of score_j * IoU(mask, mask_j).
double score_confidence_mask(const BinaryMask& mask,
                             std::span<const Instance> support);

CategoryId modal_category(std::span<const Instance> support);

// Greedy confidence-mask extraction. Outputs are pairwise disjoint and sorted
// by descending score (ties keep emission order). Throws ValidationError if
// the sample set is malformed.
std::vector<ConfidenceMask> extract(const SampleSet& set,
                                    const ConfidenceParams& params);

}  // namespace segdist

#endif  // SEGDIST_CONFIDENCE_HPP_
