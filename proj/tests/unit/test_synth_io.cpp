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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "doctest.h"
#include "segdist/error.hpp"
#include "segdist/io.hpp"
#include "segdist/synth.hpp"
#include "support.hpp"

using namespace segdist;
using segdist::testing::rect;

namespace {

SceneSpec base_spec() {
  SceneSpec s;
  s.height = s.width = 64;
  return s;
}

Json parse(const char* text) { return Json::parse(text); }

}  // namespace

// ---- rationals ----

TEST_CASE("rational parsing is exact") {
  CHECK(parse_rational("3/10") == Rational(3, 10));
  CHECK(parse_rational("0.3") == Rational(3, 10));
  CHECK(parse_rational("0.85") == Rational(17, 20));
  CHECK(parse_rational("085") == Rational(85));
  CHECK(parse_rational("1e-1") == Rational(1, 10));
  CHECK(parse_rational("2.5E2") == Rational(250));
  CHECK(parse_rational("-1/4") == Rational(-1, 4));
  CHECK(rational_from_double(0.1) == Rational(1, 10));
  CHECK(to_string(Rational(6, 8)) == "3/4");
  CHECK(to_string(Rational(2)) == "2");
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_rational("abc"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_rational(""), InvalidArgumentError);
}

// ---- scene mixtures ----

TEST_CASE("no ambiguity gives one component of weight 1") {
  SceneSpec s = base_spec();
  s.merge_probability = 0;
  s.boundary_offsets = {{0, 1}};
  const Scene sc = generate_scene(s, 1);
  REQUIRE(sc.components.size() == 1);
  CHECK(sc.components[0].weight == 1);
}

TEST_CASE("one merge pair is a single Bernoulli") {
  SceneSpec s = base_spec();
  s.min_objects = s.max_objects = 2;
  const Scene sc = generate_scene(s, 2);
  REQUIRE(sc.components.size() == 2);
  CHECK(sc.components[0].weight == Rational(1, 2));
  CHECK(sc.components[1].weight == Rational(1, 2));
  CHECK(sc.components[0].truth.instances.size() == 2);  // split first
  CHECK(sc.components[1].truth.instances.size() == 1);
  CHECK(sc.components[1].truth.instances[0].mask ==
        union_of(sc.components[0].truth.instances[0].mask,
                 sc.components[0].truth.instances[1].mask));
}

TEST_CASE("two merge pairs and one uncertain boundary form a 2x2x2 lattice") {
  SceneSpec s = base_spec();
  s.min_objects = s.max_objects = 5;
  s.merge_pairs = 2;
  s.merge_probability = parse_rational("0.3");
  s.boundary_offsets = {{-1, Rational(1, 2)}, {1, Rational(1, 2)}};
  s.uncertain_boundaries = 1;
  CHECK(component_count(s, 5) == 8);
  const Scene sc = generate_scene(s, 3);
  REQUIRE(sc.components.size() == 8);
  const Rational pair_w[2] = {Rational(7, 10), Rational(3, 10)};
  const Rational off_w[2] = {Rational(1, 2), Rational(1, 2)};
  Rational total = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& c = sc.components[i];
    REQUIRE(c.choices.size() == 3);
    // Last factor varies fastest.
    CHECK(c.choices[0] == i / 4);
    CHECK(c.choices[1] == (i / 2) % 2);
    CHECK(c.choices[2] == i % 2);
    CHECK(c.weight == pair_w[c.choices[0]] * pair_w[c.choices[1]] * off_w[c.choices[2]]);
    total += c.weight;
  }
  CHECK(total == 1);
  // The -1 variant of the boundary sits inside the +1 variant.
  const auto& shrunk = sc.components[0].truth.instances.back().mask;
  const auto& grown = sc.components[1].truth.instances.back().mask;
  CHECK(contains(grown, shrunk));
  CHECK(grown.area() > shrunk.area());
}

TEST_CASE("instances of one component never overlap") {
  SceneSpec s = base_spec();
  s.max_objects = 8;
  s.merge_pairs = 2;
  s.uncertain_boundaries = 3;
  s.boundary_offsets = {{-2, Rational(1, 4)}, {0, Rational(1, 2)}, {2, Rational(1, 4)}};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scene sc = generate_scene(s, seed);
    for (const auto& c : sc.components) {
      const auto& v = c.truth.instances;
      for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK_FALSE(v[i].mask.is_empty());
        for (std::size_t j = i + 1; j < v.size(); ++j) CHECK_FALSE(intersects(v[i].mask, v[j].mask));
      }
    }
  }
}

TEST_CASE("samples follow the mixture") {
  SceneSpec s = base_spec();
  s.min_objects = s.max_objects = 2;
  s.boundary_offsets = {{0, 1}};
  const Scene one = [] {
    SceneSpec t = base_spec();
    t.merge_probability = 0;
    return generate_scene(t, 9);
  }();
  const SampleSet same = sample_hypotheses(one, 20, 4);
  for (const auto& h : same.samples) {
    REQUIRE(h.instances.size() == one.components[0].truth.instances.size());
    for (std::size_t i = 0; i < h.instances.size(); ++i)
      CHECK(h.instances[i].mask == one.components[0].truth.instances[i].mask);
  }

  const Scene sc = generate_scene(s, 5);
  const std::size_t k = 10000;
  const SampleSet set = sample_hypotheses(sc, k, 77);
  std::size_t split = 0;
  for (const auto& h : set.samples) split += h.instances.size() == 2 ? 1 : 0;
  const double sigma = std::sqrt(k * 0.25);
  CHECK(std::abs(static_cast<double>(split) - k / 2.0) < 3 * sigma);
}

TEST_CASE("the mode is the heaviest component") {
  SceneSpec s = base_spec();
  s.min_objects = s.max_objects = 2;
  s.merge_probability = Rational(3, 10);
  const Scene sc = generate_scene(s, 6);
  CHECK(sc.components[0].weight == Rational(7, 10));
  CHECK(sc.mode_component() == 0);
  const SampleSet set = sample_hypotheses(sc, 3, 1);
  REQUIRE(set.mode);
  CHECK(set.mode->instances.size() == 2);
}

TEST_CASE("containment probability") {
  SceneSpec s = base_spec();
  s.min_objects = s.max_objects = 3;
  s.merge_probability = Rational(3, 10);
  s.boundary_offsets = {{-1, Rational(1, 2)}, {1, Rational(1, 2)}};
  const Scene sc = generate_scene(s, 10);
  REQUIRE(sc.components.size() == 4);
  // Merged pair: present only when the pair merges.
  const auto& merged_comp = sc.components[2];
  REQUIRE(merged_comp.choices[0] == 1);
  const BinaryMask merged = merged_comp.truth.instances[0].mask;
  CHECK(containment_probability(sc, merged) == Rational(3, 10));
  // One half of the pair is inside some instance in every component.
  const BinaryMask half = sc.components[0].truth.instances[0].mask;
  CHECK(containment_probability(sc, half) == 1);
  // The shrunk single is a common core.
  const BinaryMask core = sc.components[0].truth.instances.back().mask;
  CHECK(containment_probability(sc, core) == 1);
  // The grown single is only contained in the grown variant.
  const BinaryMask grown = sc.components[1].truth.instances.back().mask;
  CHECK(containment_probability(sc, grown) == Rational(1, 2));
  CHECK(containment_probability(sc, rect(64, 64, 63, 63, 1, 1)) == 0);
  CHECK_THROWS_AS(containment_probability(sc, BinaryMask::full(8, 8)), DimensionError);
}

TEST_CASE("spec validation") {
  SceneSpec s = base_spec();
  s.boundary_offsets = {{0, Rational(1, 2)}, {1, Rational(1, 3)}};
  CHECK_THROWS_AS(validate_spec(s), InvalidArgumentError);
  s = base_spec();
  s.merge_probability = Rational(3, 2);
  CHECK_THROWS_AS(validate_spec(s), InvalidArgumentError);
  s = base_spec();
  s.min_objects = 5;
  s.max_objects = 2;
  CHECK_THROWS_AS(validate_spec(s), InvalidArgumentError);
  s = base_spec();
  s.max_objects = 30;
  s.min_objects = 30;
  s.merge_pairs = 0;
  s.uncertain_boundaries = 30;
  s.boundary_offsets = {{0, Rational(1, 2)}, {1, Rational(1, 2)}};
  CHECK_THROWS_AS(generate_scene(s, 0), InvalidArgumentError);  // 2^30 components
}

TEST_CASE("scene generation is deterministic") {
  SceneSpec s = base_spec();
  s.max_objects = 6;
  const Scene a = generate_scene(s, 42), b = generate_scene(s, 42);
  CHECK(mixtures_to_json(std::vector<Scene>{a}).dump() ==
        mixtures_to_json(std::vector<Scene>{b}).dump());
  CHECK(a.realized == b.realized);
}

// ---- file formats ----

TEST_CASE("polygon rasterization at pixel centres") {
  const std::vector<std::vector<double>> square = {{0, 0, 4, 0, 4, 4, 0, 4}};
  const auto m = rasterize_polygons(8, 8, square);
  CHECK(m.area() == 16);
  CHECK(m == rect(8, 8, 0, 0, 4, 4));

  // Triangle: centres (x + .5, y + .5) with y < x inside the half-square.
  const std::vector<std::vector<double>> tri = {{0, 0, 6, 0, 6, 6}};
  const auto t = rasterize_polygons(6, 6, tri);
  std::uint64_t expect = 0;
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) expect += (y + 0.5 < x + 0.5) ? 1 : 0;
  CHECK(t.area() == expect);

  // A bow tie crosses itself: warn, rasterize even-odd.
  std::vector<std::string> warnings;
  const std::vector<std::vector<double>> bow = {{0, 0, 8, 8, 8, 0, 0, 8}};
  const auto b = rasterize_polygons(8, 8, bow, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(b.area() > 0);
}

TEST_CASE("ground truth loading") {
  const auto ds = parse_ground_truth(parse(R"({
    "images": [{"id": 7, "height": 8, "width": 8}],
    "annotations": [{"id": 3, "image_id": 7, "category_id": 1,
                     "segmentation": [[0, 0, 4, 0, 4, 4, 0, 4]]}],
    "categories": [{"id": 1, "name": "shirt"}]})"));
  REQUIRE(ds.images.size() == 1);
  REQUIRE(ds.images[0].instances.size() == 1);
  CHECK(ds.images[0].instances[0].mask.area() == 16);
  CHECK(ds.annotation_ids[0][0] == 3);
  CHECK(ds.categories.at(1) == "shirt");
}

TEST_CASE("bad RLE counts name the annotation") {
  try {
    parse_ground_truth(parse(R"({
      "images": [{"id": 1, "height": 2, "width": 2}],
      "annotations": [{"id": 41, "image_id": 1, "category_id": 1,
                       "segmentation": {"size": [2, 2], "counts": [1, 2]}}]})"));
    FAIL("expected a malformed-mask error");
  } catch (const MalformedMaskError& e) {
    CHECK(std::string(e.what()).find("id 41") != std::string::npos);
  }
}

TEST_CASE("ground truth schema problems") {
  CHECK_THROWS_AS(parse_ground_truth(parse("[]")), SchemaError);
  CHECK_THROWS_AS(parse_ground_truth(parse(R"({"annotations": []})")), SchemaError);
  CHECK_THROWS_AS(parse_ground_truth(parse(R"({
      "images": [{"id": 1, "height": 2, "width": 2}],
      "annotations": [{"id": 1, "image_id": 9, "category_id": 1,
                       "segmentation": {"size": [2, 2], "counts": [4]}}]})")),
                  SchemaError);
  CHECK_THROWS_AS(parse_ground_truth(parse(R"({
      "images": [{"id": 1, "height": 2, "width": 2}],
      "annotations": [{"id": 1, "image_id": 1, "category_id": 1,
                       "segmentation": {"size": [3, 2], "counts": [6]}}]})")),
                  DimensionError);
  CHECK_THROWS_AS(read_json("/nonexistent/file.json"), IoError);
}

TEST_CASE("sample sets") {
  const auto sets = parse_samples(parse(R"([{"image_id": 1, "width": 2, "height": 2,
    "mode": [{"category_id": 1, "score": 0.9, "segmentation": {"size": [2, 2], "counts": [0, 2, 2]}}],
    "samples": [[{"category_id": 1, "score": 0.9, "segmentation": {"size": [2, 2], "counts": [0, 2, 2]}}],
                [{"category_id": 2, "score": 0.5, "segmentation": {"size": [2, 2], "counts": "04"}}]]}])"));
  REQUIRE(sets.size() == 1);
  CHECK(sets[0].k() == 2);
  REQUIRE(sets[0].mode);
  CHECK(sets[0].mode->instances.size() == 1);
  CHECK(sets[0].samples[1].instances[0].mask.area() == 4);

  CHECK_THROWS_AS(parse_samples(parse(R"([{"image_id": 1, "width": 2, "height": 2}])")),
                  SchemaError);
  try {
    parse_samples(parse(R"([{"image_id": 1, "width": 2, "height": 2, "samples": []},
      {"image_id": 2, "width": 2, "height": 2,
       "samples": [[{"category_id": 1, "score": 1.5, "segmentation": {"size": [2, 2], "counts": [0, 4]}}]]}])"));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("record 1") != std::string::npos);
  }
}

TEST_CASE("round trips preserve masks and scores exactly") {
  SplitMix64 rng(21);
  SampleSet s;
  s.image_id = 5;
  s.height = 17;
  s.width = 23;
  for (int k = 0; k < 3; ++k) {
    Hypothesis h;
    for (int i = 0; i < 3; ++i) {
      auto m = segdist::testing::random_mask(rng, 17, 23);
      if (m.is_empty()) m = BinaryMask::full(17, 23);
      h.instances.push_back({m, 1 + i, rng.unit()});
    }
    s.samples.push_back(h);
  }
  s.mode = s.samples[0];
  const std::vector<SampleSet> v = {s};
  const auto back = parse_samples(Json::parse(samples_to_json(v).dump(1)));
  REQUIRE(back.size() == 1);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) {
      CHECK(back[0].samples[k].instances[i].mask == s.samples[k].instances[i].mask);
      CHECK(back[0].samples[k].instances[i].score == s.samples[k].instances[i].score);
      CHECK(back[0].samples[k].instances[i].category == s.samples[k].instances[i].category);
    }

  std::vector<Prediction> preds;
  for (const auto& inst : s.samples[1].instances) preds.push_back({5, inst, 0.75});
  const auto pb = parse_predictions(Json::parse(predictions_to_json(preds).dump()));
  REQUIRE(pb.size() == 3);
  CHECK(pb[2].instance.mask == preds[2].instance.mask);
  CHECK(pb[2].instance.score == preds[2].instance.score);

  GroundTruthImage g{9, 17, 23, s.samples[2].instances};
  const std::vector<GroundTruthImage> gv = {g};
  const auto gb = parse_ground_truth(ground_truth_to_json(gv, {{1, "a"}, {2, "b"}, {3, "c"}}));
  REQUIRE(gb.images.size() == 1);
  for (int i = 0; i < 3; ++i) CHECK(gb.images[0].instances[i].mask == g.instances[i].mask);
}

TEST_CASE("scene spec parsing") {
  const auto s = parse_scene_spec(parse(R"({"height": 32, "width": 48, "objects": 3,
      "merge_probability": "3/10", "boundary_offsets": {"-1": 0.25, "0": "1/2", "1": 0.25},
      "seed": 12})"));
  CHECK(s.height == 32);
  CHECK(s.min_objects == 3);
  CHECK(s.max_objects == 3);
  CHECK(s.merge_probability == Rational(3, 10));
  CHECK(s.boundary_offsets.size() == 3);
  CHECK(s.seed == 12);
  const auto again = parse_scene_spec(scene_spec_to_json(s));
  CHECK(again.merge_probability == s.merge_probability);
  CHECK(again.boundary_offsets.size() == 3);
  CHECK_THROWS_AS(parse_scene_spec(parse(R"({"boundary_offsets": {"0": 0.5}})")), SchemaError);
  CHECK_THROWS_AS(parse_scene_spec(parse(R"({"merge_probability": "x"})")), SchemaError);
}
