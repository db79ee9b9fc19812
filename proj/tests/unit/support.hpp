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

// Shared helpers for the unit tests: random masks and a dense-raster oracle
// that every run-list operation is checked against.

#ifndef SEGDIST_TESTS_SUPPORT_HPP_
#define SEGDIST_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <vector>

#include "segdist/mask.hpp"
#include "segdist/model.hpp"
#include "segdist/rng.hpp"

namespace segdist::testing {

// A few random rectangles plus salt noise; density varies per call so that
// empty, sparse and nearly full masks all show up.
inline Raster random_raster(SplitMix64& rng, std::uint32_t h, std::uint32_t w) {
  Raster grid(h, w);
  const int style = static_cast<int>(rng.uniform(4));
  if (style == 0) return grid;  // empty
  const auto rects = rng.uniform(4);
  for (std::uint64_t i = 0; i < rects; ++i) {
    const auto r0 = rng.uniform(h), c0 = rng.uniform(w);
    const auto r1 = r0 + rng.uniform(h - r0) + 1, c1 = c0 + rng.uniform(w - c0) + 1;
    for (auto r = r0; r < r1; ++r)
      for (auto c = c0; c < c1; ++c) grid.set(static_cast<std::uint32_t>(r),
                                              static_cast<std::uint32_t>(c));
  }
  const double noise = style == 3 ? 0.5 : 0.05;
  for (std::uint32_t r = 0; r < h; ++r)
    for (std::uint32_t c = 0; c < w; ++c)
      if (rng.unit() < noise) grid.set(r, c, !grid.at(r, c));
  return grid;
}

inline BinaryMask random_mask(SplitMix64& rng, std::uint32_t h, std::uint32_t w) {
  return BinaryMask::encode(random_raster(rng, h, w));
}

template <class Op>
Raster combine(const Raster& a, const Raster& b, Op op) {
  Raster out(a.height(), a.width());
  for (std::uint32_t r = 0; r < a.height(); ++r)
    for (std::uint32_t c = 0; c < a.width(); ++c) out.set(r, c, op(a.at(r, c), b.at(r, c)));
  return out;
}

inline std::uint64_t count(const Raster& a) {
  std::uint64_t n = 0;
  for (std::uint32_t r = 0; r < a.height(); ++r)
    for (std::uint32_t c = 0; c < a.width(); ++c) n += a.at(r, c);
  return n;
}

inline BinaryMask rect(std::uint32_t h, std::uint32_t w, int row, int col, int rows,
                       int cols) {
  return BinaryMask::rectangle(h, w, row, col, rows, cols);
}

inline Instance inst(BinaryMask m, double score = 1.0, CategoryId cat = 1) {
  return Instance{std::move(m), cat, score};
}

}  // namespace segdist::testing

#endif  // SEGDIST_TESTS_SUPPORT_HPP_
