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

#include "segdist/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "segdist/error.hpp"

namespace segdist {
namespace {

const Instance& at(const SampleSet& set, InstanceRef ref) {
  return set.samples.at(ref.sample).instances.at(ref.instance);
}

struct Scored {
  Candidate candidate;
  double score;
};

std::optional<Scored> evaluate(InstanceRef anchor, const SampleSet& set,
                               const BinaryMask& claimed, double p) {
  auto c = candidate(anchor, set, claimed, p);
  if (!c) return std::nullopt;
  std::vector<Instance> support;
  support.reserve(c->support.size());
  for (InstanceRef r : c->support) support.push_back(at(set, r));
  const double s = score_confidence_mask(c->mask, support);
  return Scored{std::move(*c), s};
}

}  // namespace

void validate_params(const ConfidenceParams& params) {
  if (!(params.p > 0.0 && params.p <= 1.0)) {
    throw InvalidArgumentError("confidence requirement p must lie in (0, 1], got " +
                               std::to_string(params.p));
  }
  if (!(params.score_floor >= 0.0 && params.score_floor <= 1.0)) {
    throw InvalidArgumentError("score floor must lie in [0, 1], got " +
                               std::to_string(params.score_floor));
  }
}

std::size_t required_support(std::size_t k, double p) {
  const double x = static_cast<double>(k) * p;
  auto n = static_cast<std::size_t>(std::ceil(x - 1e-9));
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(k, 1));
}

std::optional<Candidate> candidate(InstanceRef anchor, const SampleSet& set,
                                   const BinaryMask& claimed, double p) {
  const BinaryMask& anchor_mask = at(set, anchor).mask;
  BinaryMask open = subtract(anchor_mask, claimed);
  if (open.is_empty()) return std::nullopt;

  const std::size_t need = required_support(set.k(), p) - 1;

  // Best unclaimed overlap with the anchor inside each other sample.
  struct Pick {
    std::uint64_t overlap;
    InstanceRef ref;
  };
  std::vector<Pick> picks;
  for (std::size_t g = 0; g < set.samples.size(); ++g) {
    if (g == anchor.sample) continue;
    const auto& insts = set.samples[g].instances;
    Pick best{0, {g, 0}};
    for (std::size_t j = 0; j < insts.size(); ++j) {
      const std::uint64_t o = intersection_area(open, insts[j].mask);
      if (o > best.overlap) best = {o, {g, j}};
    }
    if (best.overlap > 0) picks.push_back(best);
  }
  if (picks.size() < need) return std::nullopt;
  std::stable_sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
    return a.overlap > b.overlap;
  });

  Candidate out{std::move(open), {anchor}};
  out.support.reserve(need + 1);
  for (std::size_t i = 0; i < need; ++i) {
    out.mask = intersect(out.mask, at(set, picks[i].ref).mask);
    if (out.mask.is_empty()) return std::nullopt;
    out.support.push_back(picks[i].ref);
  }
  return out;
}

double score_confidence_mask(const BinaryMask& mask,
                             std::span<const Instance> support) {
  if (support.empty()) {
    throw InvalidArgumentError("confidence mask score needs a non-empty support");
  }
  if (mask.is_empty()) {
    throw InvalidArgumentError("confidence mask score needs a non-empty mask");
  }
  double sum = 0.0;
  for (const Instance& m : support) sum += m.score * iou(mask, m.mask);
  return sum / static_cast<double>(support.size());
}

CategoryId modal_category(std::span<const Instance> support) {
  std::map<CategoryId, std::size_t> freq;
  for (const Instance& m : support) ++freq[m.category];
  CategoryId best = 0;
  std::size_t best_n = 0;
  for (const auto& [cat, n] : freq) {
    if (n > best_n) {
      best = cat;
      best_n = n;
    }
  }
  return best;
}

std::vector<ConfidenceMask> extract(const SampleSet& set,
                                    const ConfidenceParams& params) {
  validate_params(params);
  if (auto v = validate(set); !v.empty()) throw ValidationError(describe(v));

  std::vector<InstanceRef> anchors;
  for (std::size_t s = 0; s < set.samples.size(); ++s) {
    for (std::size_t i = 0; i < set.samples[s].instances.size(); ++i) {
      anchors.push_back({s, i});
    }
  }

  // A candidate only changes when newly claimed pixels touch its anchor, so
  // results are cached per anchor and refreshed selectively.
  std::vector<std::optional<Scored>> cache(anchors.size());
  std::vector<bool> stale(anchors.size(), true);
  BinaryMask claimed = BinaryMask::empty(set.height, set.width);
  std::vector<ConfidenceMask> out;

  while (!params.max_outputs || out.size() < *params.max_outputs) {
    std::optional<std::size_t> best;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      if (stale[a]) {
        cache[a] = evaluate(anchors[a], set, claimed, params.p);
        stale[a] = false;
      }
      if (cache[a] && (!best || cache[a]->score > cache[*best]->score)) best = a;
    }
    if (!best || cache[*best]->score <= params.score_floor) break;

    Scored chosen = std::move(*cache[*best]);
    cache[*best].reset();
    std::vector<Instance> support;
    for (InstanceRef r : chosen.candidate.support) support.push_back(at(set, r));

    claimed = union_of(claimed, chosen.candidate.mask);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      if (a == *best || (cache[a] && intersects(at(set, anchors[a]).mask,
                                                chosen.candidate.mask))) {
        stale[a] = true;
      }
    }
    out.push_back({std::move(chosen.candidate.mask), chosen.score,
                   std::move(chosen.candidate.support), params.p,
                   modal_category(support)});
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const ConfidenceMask& a, const ConfidenceMask& b) {
                     return a.score > b.score;
                   });
  return out;
}

}  // namespace segdist
