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
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "segdist/error.hpp"
#include "segdist/picksim.hpp"
#include "segdist/rng.hpp"
#include "support.hpp"

using namespace segdist;
using segdist::testing::rect;

// Reference outputs from an independent SplitMix64 implementation.
TEST_CASE("splitmix64 reference vectors") {
  SplitMix64 a(0);
  CHECK(a.next() == 0xE220A8397B1DCDAFULL);
  CHECK(a.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(a.next() == 0x06C45D188009454FULL);
  SplitMix64 b(1234567);
  CHECK(b.next() == 0x599ED017FB08FC85ULL);
  CHECK(b.next() == 0x2C73F08458540FA5ULL);
  CHECK(b.next() == 0x883EBCE5A3F27C77ULL);
  CHECK(stream_key(0, 0) == 0xE220A8397B1DCDAFULL);
  CHECK(stream_key(42, 7) == 0xCCF635EE9E9E2FA4ULL);
}

TEST_CASE("stream_key(seed, i) is the i-th draw of the seed's stream") {
  SplitMix64 s(77);
  for (std::uint64_t i = 0; i < 10; ++i) CHECK(stream_key(77, i) == s.next());
}

TEST_CASE("bounded draws stay in range and unit draws in [0, 1)") {
  SplitMix64 s(5);
  for (int i = 0; i < 10000; ++i) {
    CHECK(s.uniform(7) < 7);
    const double u = s.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto v = s.uniform_int(-3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
  }
}

TEST_CASE("probe centres match the reference stream") {
  struct Case { std::uint64_t seed, index; std::uint32_t h, w, row, col; };
  const Case cases[] = {{0, 0, 100, 100, 55, 70},
                        {0, 1, 100, 100, 0, 36},
                        {42, 12345, 480, 640, 66, 438},
                        {7, 99, 37, 53, 29, 38}};
  for (const Case& c : cases) {
    const PixelCoord p = probe_center(c.seed, c.index, c.h, c.w);
    CHECK(p.row == c.row);
    CHECK(p.col == c.col);
  }
}

TEST_CASE("disc rasterization") {
  const auto plus = disc_pixels({5, 5}, 1.0, 11, 11);
  REQUIRE(plus);
  CHECK(plus->area() == 5);
  CHECK(plus->test(4, 5));
  CHECK(plus->test(5, 6));
  CHECK_FALSE(plus->test(4, 4));

  // Whole 5x5 grid except the four corners (distance sqrt(8) > 2.5).
  const auto big = disc_pixels({2, 2}, 2.5, 5, 5);
  REQUIRE(big);
  CHECK(big->area() == 21);
  CHECK_FALSE(big->test(0, 0));
  CHECK_FALSE(big->test(4, 4));
  CHECK(big->test(0, 1));

  CHECK_FALSE(disc_pixels({0, 0}, 3.0, 4, 4).has_value());

  // Lattice points with x^2 + y^2 <= 64.
  const auto r8 = disc_pixels({20, 20}, 8.0, 41, 41);
  REQUIRE(r8);
  CHECK(r8->area() == 197);
}

TEST_CASE("disc agrees with a distance enumeration") {
  for (double radius : {1.0, 1.5, 2.0, 3.7, 6.0}) {
    const auto d = disc_pixels({10, 12}, radius, 25, 25);
    REQUIRE(d);
    for (int r = 0; r < 25; ++r)
      for (int c = 0; c < 25; ++c) {
        const double d2 = (r - 10.0) * (r - 10.0) + (c - 12.0) * (c - 12.0);
        CHECK(d->test(r, c) == (d2 <= radius * radius));
      }
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate_config({0.5, 10, 0, 0}), InvalidArgumentError);
  CHECK_THROWS_AS(validate_config({8.0, 0, 0, 0}), InvalidArgumentError);
  CHECK_THROWS_AS(validate_config({NAN, 10, 0, 0}), InvalidArgumentError);
  CHECK_NOTHROW(validate_config({8.0, 10, 0, 0}));
}

TEST_CASE("perfect, well separated predictions never double pick") {
  const std::vector<BinaryMask> gt = {rect(100, 100, 5, 5, 30, 30),
                                      rect(100, 100, 60, 60, 30, 30)};
  const auto r = estimate_double_pick(gt, gt, 100, 100, {8.0, 20000, 3, 0});
  CHECK(r.double_picks == 0);
  CHECK(r.valid > 0);
  REQUIRE(r.rate);
  CHECK(*r.rate == 0.0);
}

TEST_CASE("single object: no double picks regardless of probes") {
  const std::vector<BinaryMask> gt = {rect(64, 64, 10, 10, 40, 40)};
  for (std::uint64_t n : {1ull, 100ull, 5000ull}) {
    const auto r = estimate_double_pick(gt, gt, 64, 64, {4.0, n, 9, 0});
    CHECK(r.double_picks == 0);
    CHECK(r.probes == n);
  }
}

TEST_CASE("no valid probe gives an undefined rate") {
  const std::vector<BinaryMask> tiny = {rect(50, 50, 10, 10, 2, 2)};
  const auto r = estimate_double_pick(tiny, tiny, 50, 50, {8.0, 1000, 0, 0});
  CHECK(r.valid == 0);
  CHECK_FALSE(r.rate.has_value());
  CHECK_FALSE(r.stderr_rate.has_value());
}

TEST_CASE("merged prediction over two abutting squares") {
  const std::vector<BinaryMask> gt = {rect(100, 120, 30, 20, 40, 40),
                                      rect(100, 120, 30, 60, 40, 40)};
  const std::vector<BinaryMask> pred = {rect(100, 120, 30, 20, 40, 80)};
  const auto r = estimate_double_pick(pred, gt, 100, 120, {8.0, 100000, 1, 0});
  REQUIRE(r.rate);
  CHECK(*r.rate == static_cast<double>(r.double_picks) / static_cast<double>(r.valid));
  const double se = std::sqrt(0.25 * 0.75 / static_cast<double>(r.valid));
  CHECK(std::abs(*r.rate - 0.25) < 3 * se);
  CHECK(*r.stderr_rate == doctest::Approx(std::sqrt(*r.rate * (1 - *r.rate) / r.valid)));
}

TEST_CASE("rate is invariant to instance order and seeded reproducibly") {
  SplitMix64 rng(4);
  std::vector<BinaryMask> gt, pred;
  for (int i = 0; i < 4; ++i) gt.push_back(rect(80, 80, 10 + 15 * i, 5 + 10 * i, 20, 25));
  pred = {union_of(gt[0], gt[1]), union_of(gt[2], gt[3])};
  const PickSimConfig cfg{5.0, 20000, 17, 0};
  const auto a = estimate_double_pick(pred, gt, 80, 80, cfg);
  std::vector<BinaryMask> gt_r(gt.rbegin(), gt.rend()), pred_r(pred.rbegin(), pred.rend());
  const auto b = estimate_double_pick(pred_r, gt_r, 80, 80, cfg);
  CHECK(a.double_picks == b.double_picks);
  CHECK(a.valid == b.valid);
  const auto c = estimate_double_pick(pred, gt, 80, 80, cfg);
  CHECK(a.double_picks == c.double_picks);
}

TEST_CASE("splitting a run over first_probe changes nothing") {
  const std::vector<BinaryMask> gt = {rect(60, 60, 10, 10, 20, 20), rect(60, 60, 10, 30, 20, 20)};
  const std::vector<BinaryMask> pred = {union_of(gt[0], gt[1])};
  const auto whole = estimate_double_pick(pred, gt, 60, 60, {4.0, 3000, 8, 0});
  const auto head = estimate_double_pick(pred, gt, 60, 60, {4.0, 1000, 8, 0});
  const auto tail = estimate_double_pick(pred, gt, 60, 60, {4.0, 2000, 8, 1000});
  const std::vector<PickSimResult> parts = {head, tail};
  const auto sum = combine(parts);
  CHECK(sum.double_picks == whole.double_picks);
  CHECK(sum.valid == whole.valid);
  CHECK(sum.rate == whole.rate);
}

TEST_CASE("pickable area fraction") {
  const std::vector<BinaryMask> gt = {rect(20, 20, 0, 0, 4, 4), rect(20, 20, 10, 10, 2, 8)};
  CHECK(pickable_area_fraction(gt, gt) == 1.0);
  CHECK(pickable_area_fraction({}, gt) == 0.0);
  const std::vector<BinaryMask> half = {rect(20, 20, 0, 0, 2, 4), rect(20, 20, 10, 10, 1, 8)};
  CHECK(pickable_area_fraction(half, gt) == 0.5);
  CHECK_THROWS_AS(pickable_area_fraction(gt, {}), InvalidArgumentError);
}
