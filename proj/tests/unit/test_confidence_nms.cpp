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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "doctest.h"
#include "segdist/commands.hpp"
#include "segdist/confidence.hpp"
#include "segdist/error.hpp"
#include "segdist/union_nms.hpp"
#include "support.hpp"

using namespace segdist;
using segdist::testing::inst;
using segdist::testing::rect;

namespace {

SampleSet make_set(std::uint32_t h, std::uint32_t w,
                   std::vector<std::vector<Instance>> samples) {
  SampleSet s;
  s.image_id = 1;
  s.height = h;
  s.width = w;
  for (auto& v : samples) s.samples.push_back(Hypothesis{std::move(v)});
  return s;
}

// Random sample set: a few base objects, each sample jitters, drops or
// splits them.
SampleSet random_set(SplitMix64& rng, std::size_t k, std::uint32_t h = 32,
                     std::uint32_t w = 32) {
  struct Box { int r, c, nr, nc; };
  std::vector<Box> base;
  const auto n = rng.uniform(3) + 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    base.push_back({static_cast<int>(rng.uniform(h - 8)), static_cast<int>(rng.uniform(w - 8)),
                    static_cast<int>(rng.uniform(8) + 3), static_cast<int>(rng.uniform(8) + 3)});
  }
  std::vector<std::vector<Instance>> samples(k);
  for (auto& s : samples) {
    for (const Box& b : base) {
      if (rng.unit() < 0.15) continue;
      const int dr = static_cast<int>(rng.uniform_int(-1, 1));
      const int dc = static_cast<int>(rng.uniform_int(-1, 1));
      auto m = rect(h, w, b.r + dr, b.c + dc, b.nr + static_cast<int>(rng.uniform_int(-1, 1)),
                    b.nc + static_cast<int>(rng.uniform_int(-1, 1)));
      if (m.is_empty()) continue;
      s.push_back(inst(std::move(m), 0.3 + 0.7 * rng.unit(),
                       1 + static_cast<CategoryId>(rng.uniform(2))));
    }
  }
  return make_set(h, w, std::move(samples));
}

// Largest total overlap achievable by any support of `need` other samples,
// one instance each, found by exhaustive search.
std::uint64_t best_total_overlap(const SampleSet& set, InstanceRef anchor,
                                 const BinaryMask& open, std::size_t need) {
  std::uint64_t best = 0;
  std::function<void(std::size_t, std::size_t, std::uint64_t)> rec =
      [&](std::size_t g, std::size_t taken, std::uint64_t total) {
        if (taken == need) {
          best = std::max(best, total);
          return;
        }
        if (g == set.k()) return;
        rec(g + 1, taken, total);  // skip sample g
        if (g == anchor.sample) return;
        for (const Instance& m : set.samples[g].instances) {
          const auto o = intersection_area(open, m.mask);
          if (o > 0) rec(g + 1, taken + 1, total + o);
        }
      };
  rec(0, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("required support is ceil(k p)") {
  CHECK(required_support(3, 0.9) == 3);
  CHECK(required_support(100, 0.9) == 90);
  CHECK(required_support(100, 0.75) == 75);
  CHECK(required_support(4, 0.75) == 3);
  CHECK(required_support(10, 0.5) == 5);
  CHECK(required_support(7, 1.0) == 7);
  CHECK(required_support(5, 0.01) == 1);
  CHECK(required_support(10, 0.31) == 4);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate_params(ConfidenceParams{0.0, 0.1, {}}), InvalidArgumentError);
  CHECK_THROWS_AS(validate_params(ConfidenceParams{1.1, 0.1, {}}), InvalidArgumentError);
  CHECK_THROWS_AS(validate_params(ConfidenceParams{0.5, -0.1, {}}), InvalidArgumentError);
  CHECK_NOTHROW(validate_params(ConfidenceParams{1.0, 0.0, {}}));
}

TEST_CASE("full agreement yields the common mask") {
  const auto m = rect(10, 10, 2, 2, 4, 5);
  const auto set = make_set(10, 10, {{inst(m)}, {inst(m)}, {inst(m)}});
  const auto c = candidate({0, 0}, set, BinaryMask::empty(10, 10), 0.9);
  REQUIRE(c);
  CHECK(c->mask == m);
  CHECK(c->support.size() == 3);
}

TEST_CASE("a disjoint dissenting sample is left out of the support") {
  const auto a = rect(12, 12, 1, 1, 4, 4);
  const auto other = rect(12, 12, 7, 7, 4, 4);
  const auto set = make_set(12, 12, {{inst(a)}, {inst(a)}, {inst(a)}, {inst(other)}});
  const auto c = candidate({0, 0}, set, BinaryMask::empty(12, 12), 0.75);
  REQUIRE(c);
  CHECK(c->mask == a);
  CHECK(c->support == std::vector<InstanceRef>{{0, 0}, {1, 0}, {2, 0}});
  CHECK(best_total_overlap(set, {0, 0}, a, 2) == 2 * a.area());
}

TEST_CASE("a fully claimed anchor has no candidate") {
  const auto a = rect(8, 8, 1, 1, 3, 3);
  const auto set = make_set(8, 8, {{inst(a)}, {inst(a)}});
  CHECK_FALSE(candidate({0, 0}, set, a, 0.5).has_value());
  CHECK_FALSE(candidate({0, 0}, set, BinaryMask::full(8, 8), 0.5).has_value());
}

TEST_CASE("too few overlapping samples gives no candidate") {
  const auto a = rect(8, 8, 0, 0, 3, 3), b = rect(8, 8, 5, 5, 3, 3);
  const auto set = make_set(8, 8, {{inst(a)}, {inst(b)}, {inst(b)}});
  CHECK_FALSE(candidate({0, 0}, set, BinaryMask::empty(8, 8), 0.6).has_value());
  CHECK(candidate({1, 0}, set, BinaryMask::empty(8, 8), 0.6).has_value());
}

TEST_CASE("greedy support maximizes total unclaimed overlap (exhaustive check)") {
  SplitMix64 rng(31);
  int checked = 0;
  for (int t = 0; t < 150; ++t) {
    const std::size_t k = 2 + rng.uniform(4);
    const auto set = random_set(rng, k, 20, 20);
    const double p = std::vector<double>{0.5, 0.75, 0.9, 1.0}[rng.uniform(4)];
    const auto claimed = rng.unit() < 0.5 ? BinaryMask::empty(20, 20)
                                          : rect(20, 20, 0, 0, static_cast<int>(rng.uniform(12)), 20);
    const auto flat = flatten(set);
    for (const InstanceRef& anchor : flat.origin) {
      const auto open = subtract(set.samples[anchor.sample].instances[anchor.instance].mask, claimed);
      const auto c = candidate(anchor, set, claimed, p);
      const std::size_t need = required_support(k, p) - 1;
      if (!c) continue;
      ++checked;
      std::uint64_t total = 0;
      BinaryMask inter = open;
      std::vector<std::size_t> samples;
      for (std::size_t i = 1; i < c->support.size(); ++i) {
        const auto& m = set.samples[c->support[i].sample].instances[c->support[i].instance].mask;
        total += intersection_area(open, m);
        inter = intersect(inter, m);
        samples.push_back(c->support[i].sample);
      }
      CHECK(c->support.front() == anchor);
      CHECK(c->support.size() == need + 1);
      CHECK(total == best_total_overlap(set, anchor, open, need));
      CHECK(c->mask == inter);
      std::sort(samples.begin(), samples.end());
      CHECK(std::adjacent_find(samples.begin(), samples.end()) == samples.end());
      CHECK(std::find(samples.begin(), samples.end(), anchor.sample) == samples.end());
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("confidence mask score") {
  const auto m = rect(10, 10, 0, 0, 2, 3);
  const std::vector<Instance> same = {inst(m, 0.8), inst(m, 0.8), inst(m, 0.8)};
  CHECK(score_confidence_mask(m, same) == doctest::Approx(0.8).epsilon(1e-15));
  const std::vector<Instance> mixed = {inst(m, 0.6), inst(m, 1.0)};
  CHECK(score_confidence_mask(m, mixed) == doctest::Approx(0.8).epsilon(1e-15));
  const auto a = rect(10, 10, 0, 0, 2, 3), b = rect(10, 10, 0, 1, 2, 3);
  const auto c = intersect(a, b);  // 4 pixels inside two 6-pixel masks
  const std::vector<Instance> pair = {inst(a), inst(b)};
  CHECK(score_confidence_mask(c, pair) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(score_confidence_mask(c, {}), InvalidArgumentError);
}

TEST_CASE("modal category") {
  const auto m = rect(4, 4, 0, 0, 1, 1);
  const std::vector<Instance> v = {inst(m, 1, 3), inst(m, 1, 2), inst(m, 1, 3)};
  CHECK(modal_category(v) == 3);
  const std::vector<Instance> tie = {inst(m, 1, 5), inst(m, 1, 2)};
  CHECK(modal_category(tie) == 2);
}

TEST_CASE("unambiguous samples come back unchanged, in score order") {
  const auto a = rect(16, 16, 1, 1, 5, 5), b = rect(16, 16, 9, 9, 5, 5);
  std::vector<std::vector<Instance>> samples(5, {inst(b, 0.8), inst(a, 0.9)});
  const auto out = extract(make_set(16, 16, samples), {0.9, 0.1, {}});
  REQUIRE(out.size() == 2);
  CHECK(out[0].mask == a);
  CHECK(out[0].score == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(out[1].mask == b);
  CHECK(out[1].score == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out[0].support.size() == 5);
  CHECK(out[0].p == 0.9);
}

TEST_CASE("p = 1 drops an object missing from one sample") {
  const auto a = rect(16, 16, 1, 1, 5, 5), b = rect(16, 16, 9, 9, 5, 5);
  const auto set = make_set(16, 16, {{inst(a), inst(b)}, {inst(a), inst(b)}, {inst(a)}});
  const auto out = extract(set, {1.0, 0.1, {}});
  REQUIRE(out.size() == 1);
  CHECK(out[0].mask == a);
}

TEST_CASE("an object of uncertain extent shrinks to the intersection") {
  // Three samples of one object whose extent varies.
  const auto m1 = rect(20, 20, 2, 2, 10, 12);
  const auto m2 = rect(20, 20, 4, 1, 12, 9);
  const auto m3 = rect(20, 20, 1, 5, 8, 10);
  const auto set = make_set(20, 20, {{inst(m1)}, {inst(m2)}, {inst(m3)}});
  const auto out = extract(set, {0.9, 0.1, {}});
  REQUIRE(out.size() == 1);
  // Pixel-level brute force of the three-way intersection.
  const Raster r1 = m1.decode(), r2 = m2.decode(), r3 = m3.decode();
  Raster expect(20, 20);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 20; ++c) expect.set(r, c, r1.at(r, c) && r2.at(r, c) && r3.at(r, c));
  CHECK(out[0].mask.decode() == expect);
  CHECK(out[0].support.size() == 3);
}

TEST_CASE("extraction invariants on random sample sets") {
  SplitMix64 rng(808);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 1 + rng.uniform(8);
    const auto set = random_set(rng, k);
    for (double p : {0.5, 0.75, 0.9, 1.0}) {
      const auto out = extract(set, {p, 0.1, {}});
      CHECK(check_structure(set, out, p).empty());
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].score > 0.1);
        if (i) CHECK(out[i - 1].score >= out[i].score);
        CHECK(out[i].p == p);
      }
    }
  }
}

TEST_CASE("max_outputs caps the rounds") {
  SplitMix64 rng(3);
  const auto set = random_set(rng, 6);
  const auto all = extract(set, {0.5, 0.0, {}});
  const auto one = extract(set, {0.5, 0.0, std::size_t{1}});
  REQUIRE_FALSE(all.empty());
  REQUIRE(one.size() == 1);
  CHECK(one[0].mask == all[0].mask);
}

TEST_CASE("malformed sets are rejected") {
  const auto set = make_set(8, 8, {{inst(rect(8, 8, 0, 0, 2, 2), 1.5)}});
  CHECK_THROWS_AS(extract(set, {0.9, 0.1, {}}), ValidationError);
  auto bad_dims = make_set(8, 8, {{inst(rect(8, 8, 0, 0, 2, 2))}, {inst(rect(9, 8, 0, 0, 2, 2))}});
  const auto v = validate(bad_dims);
  REQUIRE(v.size() == 1);
  CHECK(v[0].location.find("sample 1") != std::string::npos);
  CHECK(validate(make_set(8, 8, {{inst(rect(8, 8, 0, 0, 2, 2), 0.4)}})).empty());
}

TEST_CASE("canonical order") {
  const std::vector<double> s = {0.5, 0.9, 0.7};
  CHECK(canonical_order(s) == std::vector<std::size_t>{1, 2, 0});
  const std::vector<double> tie = {0.3, 0.3, 0.3};
  CHECK(canonical_order(tie) == std::vector<std::size_t>{0, 1, 2});
  CHECK(canonical_order(std::vector<double>{}).empty());
}

// ---- NMS ----

namespace {

// Reference NMS straight from the definition.
std::vector<std::size_t> reference_nms(const std::vector<Instance>& v, double tau, bool aware) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a].score > v[b].score; });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    bool keep = true;
    for (std::size_t j : kept) {
      if ((!aware || v[i].category == v[j].category) && iou(v[i].mask, v[j].mask) > tau) keep = false;
    }
    if (keep) kept.push_back(i);
  }
  return kept;
}

std::vector<Instance> random_instances(SplitMix64& rng, std::size_t n) {
  std::vector<Instance> v;
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(inst(rect(24, 24, static_cast<int>(rng.uniform(16)), static_cast<int>(rng.uniform(16)),
                          static_cast<int>(rng.uniform(6) + 3), static_cast<int>(rng.uniform(6) + 3)),
                     std::round(rng.unit() * 10) / 10, 1 + static_cast<CategoryId>(rng.uniform(2))));
  }
  return v;
}

}  // namespace

TEST_CASE("nms parameters") {
  CHECK_THROWS_AS(validate_params(NmsParams{0.0, true}), InvalidArgumentError);
  CHECK_THROWS_AS(validate_params(NmsParams{1.0, true}), InvalidArgumentError);
  CHECK_NOTHROW(validate_params(NmsParams{0.5, false}));
}

TEST_CASE("nms basics") {
  const auto m = rect(8, 8, 1, 1, 4, 4);
  const std::vector<Instance> one = {inst(m, 0.7)};
  const auto r1 = standard_nms(one, {});
  CHECK(r1.kept == std::vector<std::size_t>{0});
  CHECK(r1.suppressor.empty());
  const std::vector<Instance> two = {inst(m, 0.9), inst(m, 0.8)};
  const auto r2 = standard_nms(two, {});
  CHECK(r2.kept == std::vector<std::size_t>{0});
  CHECK(r2.suppressor.at(1) == 0);
}

TEST_CASE("nms chain: a suppressed mask suppresses nothing") {
  // IoU(A, B) = IoU(B, C) = 0.6, IoU(A, C) = 1/3.
  const auto a = rect(4, 30, 0, 0, 4, 20), b = rect(4, 30, 0, 5, 4, 20),
             c = rect(4, 30, 0, 10, 4, 20);
  REQUIRE(iou(a, b) == doctest::Approx(0.6));
  REQUIRE(iou(b, c) == doctest::Approx(0.6));
  const std::vector<Instance> v = {inst(a, 0.9), inst(b, 0.8), inst(c, 0.7)};
  const auto r = standard_nms(v, {0.5, true});
  CHECK(r.kept == std::vector<std::size_t>{0, 2});
  CHECK(r.suppressor.at(1) == 0);
  CHECK(r.suppressor.size() == 1);
  CHECK(r.kept == reference_nms(v, 0.5, true));
}

TEST_CASE("nms agrees with the reference on random inputs") {
  SplitMix64 rng(55);
  for (int t = 0; t < 300; ++t) {
    const auto v = random_instances(rng, 1 + rng.uniform(9));
    const double tau = 0.2 + 0.6 * rng.unit();
    const bool aware = rng.uniform(2) == 0;
    const auto r = standard_nms(v, {tau, aware});
    CHECK(r.kept == reference_nms(v, tau, aware));
    // Each suppressed index has exactly one suppressor, the earliest keeper
    // that overlaps it.
    std::vector<bool> is_kept(v.size());
    for (auto k : r.kept) is_kept[k] = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (is_kept[i]) {
        CHECK(r.suppressor.count(i) == 0);
        continue;
      }
      REQUIRE(r.suppressor.count(i) == 1);
      std::size_t first = v.size();
      for (auto k : r.kept) {
        if ((!aware || v[k].category == v[i].category) && iou(v[k].mask, v[i].mask) > tau) {
          first = k;
          break;
        }
      }
      CHECK(r.suppressor.at(i) == first);
    }
  }
}

TEST_CASE("union-nms with one sample equals standard nms") {
  SplitMix64 rng(56);
  for (int t = 0; t < 50; ++t) {
    const auto v = random_instances(rng, 1 + rng.uniform(6));
    const auto set = make_set(24, 24, {v});
    const auto un = union_nms(set, {0.5, true});
    const auto kept = nms_keepers(v, {0.5, true});
    REQUIRE(un.size() == kept.size());
    for (std::size_t i = 0; i < un.size(); ++i) {
      // Suppressed masks only ever add pixels; with one sample they are
      // the same instances standard NMS dropped.
      CHECK(contains(un[i].mask, kept[i].mask));
      CHECK(un[i].score == kept[i].score);
    }
  }
}

TEST_CASE("union-nms recovers the larger extent") {
  const auto a = rect(10, 10, 2, 2, 4, 4);
  const auto ad = union_of(a, rect(10, 10, 6, 2, 1, 4));
  const auto set = make_set(10, 10, {{inst(a, 0.9)}, {inst(ad, 0.8)}});
  const auto out = union_nms(set, {0.5, true});
  REQUIRE(out.size() == 1);
  CHECK(out[0].mask == ad);
  CHECK(out[0].score == 0.9);
}

TEST_CASE("union-nms output is keeper plus its suppressed set, pixelwise") {
  SplitMix64 rng(57);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<Instance>> samples;
    const std::size_t k = 1 + rng.uniform(4);
    for (std::size_t s = 0; s < k; ++s) samples.push_back(random_instances(rng, rng.uniform(4)));
    const auto set = make_set(24, 24, samples);
    const auto flat = flatten(set);
    const auto r = standard_nms(flat.instances, {0.5, true});
    const auto out = union_nms(set, {0.5, true});
    REQUIRE(out.size() == r.kept.size());
    for (std::size_t i = 0; i < r.kept.size(); ++i) {
      Raster expect = flat.instances[r.kept[i]].mask.decode();
      for (const auto& [j, keeper] : r.suppressor) {
        if (keeper != r.kept[i]) continue;
        const Raster sj = flat.instances[j].mask.decode();
        expect = segdist::testing::combine(expect, sj, [](bool x, bool y) { return x || y; });
      }
      CHECK(out[i].mask.decode() == expect);
      CHECK(out[i].category == flat.instances[r.kept[i]].category);
    }
  }
}

TEST_CASE("union-nms on a single partition-like sample is standard nms") {
  const std::vector<Instance> v = {inst(rect(12, 12, 0, 0, 5, 5), 0.6),
                                   inst(rect(12, 12, 6, 6, 5, 5), 0.9),
                                   inst(rect(12, 12, 0, 6, 5, 5), 0.75)};
  const auto out = union_nms(make_set(12, 12, {v}), {0.5, true});
  const auto kept = nms_keepers(v, {0.5, true});
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(out[i].mask == kept[i].mask);
    CHECK(out[i].score == kept[i].score);
  }
  CHECK(out[0].score == 0.9);
}
