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

#include "segdist/mask.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "segdist/error.hpp"

namespace segdist {
namespace {

void check_grid(std::uint32_t height, std::uint32_t width) {
  if (height == 0 || width == 0) {
    throw DimensionError("mask grid must be non-empty, got " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  const auto total = static_cast<std::uint64_t>(height) * width;
  if (total > std::numeric_limits<std::uint32_t>::max()) {
    throw DimensionError("mask grid " + std::to_string(height) + "x" +
                         std::to_string(width) +
                         " exceeds the 32-bit run-length range");
  }
}

std::string dims(const BinaryMask& m) {
  return std::to_string(m.height()) + "x" + std::to_string(m.width());
}

// Appends [begin, end) to out, fusing with the previous run when adjacent.
void append_run(std::vector<Run>& out, std::uint64_t begin, std::uint64_t end) {
  if (begin >= end) return;
  if (!out.empty() && out.back().end == begin) {
    out.back().end = end;
  } else {
    out.push_back({begin, end});
  }
}

// Walks the elementary segments induced by the boundaries of both run lists.
// For each maximal segment [lo, hi) on which membership in a and in b is
// constant, calls visit(lo, hi, in_a, in_b). Cost is linear in the number of
// runs; gaps covered by neither list are skipped in one step.
template <typename Visit>
void sweep(const std::vector<Run>& a, const std::vector<Run>& b,
           std::uint64_t total, Visit&& visit) {
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint64_t pos = 0;
  while (pos < total) {
    while (i < a.size() && a[i].end <= pos) ++i;
    while (j < b.size() && b[j].end <= pos) ++j;
    if (i == a.size() && j == b.size()) {
      visit(pos, total, false, false);
      return;
    }
    const bool in_a = i < a.size() && a[i].begin <= pos;
    const bool in_b = j < b.size() && b[j].begin <= pos;
    const std::uint64_t next_a =
        i < a.size() ? (in_a ? a[i].end : a[i].begin) : total;
    const std::uint64_t next_b =
        j < b.size() ? (in_b ? b[j].end : b[j].begin) : total;
    const std::uint64_t next = std::min(next_a, next_b);
    visit(pos, next, in_a, in_b);
    pos = next;
  }
}

template <typename Op>
std::vector<Run> combine(const BinaryMask& a, const BinaryMask& b, Op op) {
  require_same_dims(a, b);
  std::vector<Run> out;
  out.reserve(a.runs().size() + b.runs().size());
  sweep(a.runs(), b.runs(), a.pixel_count(),
        [&](std::uint64_t lo, std::uint64_t hi, bool in_a, bool in_b) {
          if (op(in_a, in_b)) append_run(out, lo, hi);
        });
  return out;
}

// Disjoint bounding ranges cannot share a pixel.
bool ranges_disjoint(const BinaryMask& a, const BinaryMask& b) {
  return a.is_empty() || b.is_empty() ||
         a.runs().back().end <= b.runs().front().begin ||
         b.runs().back().end <= a.runs().front().begin;
}

}  // namespace

Raster::Raster(std::uint32_t height, std::uint32_t width)
    : height_(height), width_(width) {
  check_grid(height, width);
  pixels_.assign(static_cast<std::size_t>(height) * width, 0);
}

BinaryMask::BinaryMask(std::uint32_t height, std::uint32_t width,
                       std::vector<Run> runs)
    : height_(height), width_(width), runs_(std::move(runs)) {
  for (const Run& r : runs_) area_ += r.length();
}

BinaryMask BinaryMask::empty(std::uint32_t height, std::uint32_t width) {
  check_grid(height, width);
  return BinaryMask(height, width, {});
}

BinaryMask BinaryMask::full(std::uint32_t height, std::uint32_t width) {
  check_grid(height, width);
  return BinaryMask(height, width,
                    {{0, static_cast<std::uint64_t>(height) * width}});
}

BinaryMask BinaryMask::from_counts(std::uint32_t height, std::uint32_t width,
                                   std::span<const std::uint32_t> counts) {
  check_grid(height, width);
  const auto total = static_cast<std::uint64_t>(height) * width;
  std::vector<Run> runs;
  runs.reserve(counts.size() / 2 + 1);
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::uint64_t next = pos + counts[i];
    if (next > total) break;
    if (i % 2 == 1) append_run(runs, pos, next);
    pos = next;
  }
  std::uint64_t sum = 0;
  for (std::uint32_t c : counts) sum += c;
  if (sum != total) {
    throw MalformedMaskError("RLE counts sum to " + std::to_string(sum) +
                             " but the grid " + std::to_string(height) + "x" +
                             std::to_string(width) + " has " +
                             std::to_string(total) + " pixels");
  }
  return BinaryMask(height, width, std::move(runs));
}

BinaryMask BinaryMask::from_compressed(std::uint32_t height,
                                       std::uint32_t width,
                                       std::string_view packed) {
  // Inverse of to_compressed(): 5-bit groups with a continuation bit, offset
  // by '0', counts after the third stored as a delta to counts[i - 2].
  std::vector<std::uint32_t> counts;
  std::size_t p = 0;
  while (p < packed.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= packed.size()) {
        throw MalformedMaskError("truncated compressed RLE string");
      }
      const int c = static_cast<int>(packed[p]) - 48;
      if (c < 0 || c > 63) {
        throw MalformedMaskError("invalid character in compressed RLE string");
      }
      if (k > 12) throw MalformedMaskError("compressed RLE value overflows");
      x |= static_cast<std::int64_t>(c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) {
        x |= static_cast<std::int64_t>(-1) * (std::int64_t{1} << (5 * k));
      }
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    if (x < 0 || x > std::numeric_limits<std::uint32_t>::max()) {
      throw MalformedMaskError("compressed RLE decodes to a negative count");
    }
    counts.push_back(static_cast<std::uint32_t>(x));
  }
  return from_counts(height, width, counts);
}

BinaryMask BinaryMask::from_runs(std::uint32_t height, std::uint32_t width,
                                 std::vector<Run> runs) {
  check_grid(height, width);
  const auto total = static_cast<std::uint64_t>(height) * width;
  std::vector<Run> out;
  out.reserve(runs.size());
  std::uint64_t last_end = 0;
  for (const Run& r : runs) {
    if (r.begin > r.end || r.end > total || r.begin < last_end) {
      throw MalformedMaskError("runs must be ascending, disjoint and inside " +
                               std::to_string(height) + "x" +
                               std::to_string(width));
    }
    append_run(out, r.begin, r.end);
    if (r.end > r.begin) last_end = r.end;
  }
  return BinaryMask(height, width, std::move(out));
}

BinaryMask BinaryMask::rectangle(std::uint32_t height, std::uint32_t width,
                                 std::int64_t row, std::int64_t col,
                                 std::int64_t rows, std::int64_t cols) {
  check_grid(height, width);
  const std::int64_t r0 = std::clamp<std::int64_t>(row, 0, height);
  const std::int64_t r1 = std::clamp<std::int64_t>(row + rows, 0, height);
  const std::int64_t c0 = std::clamp<std::int64_t>(col, 0, width);
  const std::int64_t c1 = std::clamp<std::int64_t>(col + cols, 0, width);
  std::vector<Run> runs;
  if (r0 < r1) {
    for (std::int64_t c = c0; c < c1; ++c) {
      const auto base = static_cast<std::uint64_t>(c) * height;
      append_run(runs, base + r0, base + r1);
    }
  }
  return BinaryMask(height, width, std::move(runs));
}

BinaryMask BinaryMask::encode(const Raster& grid) {
  const std::uint32_t h = grid.height();
  const std::uint32_t w = grid.width();
  check_grid(h, w);
  std::vector<Run> runs;
  std::uint64_t idx = 0;
  for (std::uint32_t c = 0; c < w; ++c) {
    for (std::uint32_t r = 0; r < h; ++r, ++idx) {
      if (grid.at(r, c)) append_run(runs, idx, idx + 1);
    }
  }
  return BinaryMask(h, w, std::move(runs));
}

Raster BinaryMask::decode() const {
  Raster grid(height_, width_);
  for (const Run& run : runs_) {
    for (std::uint64_t i = run.begin; i < run.end; ++i) {
      grid.set(static_cast<std::uint32_t>(i % height_),
               static_cast<std::uint32_t>(i / height_));
    }
  }
  return grid;
}

std::vector<std::uint32_t> BinaryMask::counts() const {
  std::vector<std::uint32_t> out;
  out.reserve(2 * runs_.size() + 1);
  std::uint64_t pos = 0;
  for (const Run& r : runs_) {
    out.push_back(static_cast<std::uint32_t>(r.begin - pos));
    out.push_back(static_cast<std::uint32_t>(r.length()));
    pos = r.end;
  }
  if (pos < pixel_count() || out.empty()) {
    out.push_back(static_cast<std::uint32_t>(pixel_count() - pos));
  }
  return out;
}

std::string BinaryMask::to_compressed() const {
  const std::vector<std::uint32_t> cnts = counts();
  std::string s;
  for (std::size_t i = 0; i < cnts.size(); ++i) {
    std::int64_t x = cnts[i];
    if (i > 2) x -= static_cast<std::int64_t>(cnts[i - 2]);
    bool more = true;
    while (more) {
      char c = static_cast<char>(x & 0x1f);
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      c += 48;
      s.push_back(c);
    }
  }
  return s;
}

bool BinaryMask::test(std::uint32_t row, std::uint32_t col) const {
  if (row >= height_ || col >= width_) return false;
  const std::uint64_t idx = static_cast<std::uint64_t>(col) * height_ + row;
  auto it = std::upper_bound(
      runs_.begin(), runs_.end(), idx,
      [](std::uint64_t v, const Run& r) { return v < r.begin; });
  return it != runs_.begin() && std::prev(it)->end > idx;
}

void require_same_dims(const BinaryMask& a, const BinaryMask& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw DimensionError("mask dimensions differ: " + dims(a) + " vs " +
                         dims(b));
  }
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
  if (ranges_disjoint(a, b)) {
    require_same_dims(a, b);
    return BinaryMask::empty(a.height(), a.width());
  }
  return BinaryMask::from_runs(a.height(), a.width(),
                               combine(a, b, [](bool x, bool y) { return x && y; }));
}

BinaryMask union_of(const BinaryMask& a, const BinaryMask& b) {
  return BinaryMask::from_runs(a.height(), a.width(),
                               combine(a, b, [](bool x, bool y) { return x || y; }));
}

BinaryMask subtract(const BinaryMask& a, const BinaryMask& b) {
  if (ranges_disjoint(a, b)) {
    require_same_dims(a, b);
    return a;
  }
  return BinaryMask::from_runs(a.height(), a.width(),
                               combine(a, b, [](bool x, bool y) { return x && !y; }));
}

std::uint64_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b);
  if (ranges_disjoint(a, b)) return 0;
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::uint64_t n = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ra.size() && j < rb.size()) {
    const std::uint64_t lo = std::max(ra[i].begin, rb[j].begin);
    const std::uint64_t hi = std::min(ra[i].end, rb[j].end);
    if (lo < hi) n += hi - lo;
    if (ra[i].end < rb[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

std::uint64_t union_area(const BinaryMask& a, const BinaryMask& b) {
  return a.area() + b.area() - intersection_area(a, b);
}

bool intersects(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b);
  if (ranges_disjoint(a, b)) return false;
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ra.size() && j < rb.size()) {
    if (std::max(ra[i].begin, rb[j].begin) < std::min(ra[i].end, rb[j].end)) {
      return true;
    }
    if (ra[i].end < rb[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

bool contains(const BinaryMask& outer, const BinaryMask& inner) {
  require_same_dims(outer, inner);
  const auto& ro = outer.runs();
  auto it = ro.begin();
  for (const Run& r : inner.runs()) {
    // First outer run that ends past r.begin; it must cover all of r.
    it = std::partition_point(it, ro.end(),
                              [&](const Run& o) { return o.end <= r.begin; });
    if (it == ro.end() || it->begin > r.begin || it->end < r.end) return false;
  }
  return true;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  const std::uint64_t inter = intersection_area(a, b);
  const std::uint64_t uni = a.area() + b.area() - inter;
  if (uni == 0) throw UndefinedRatioError("IoU of two empty masks is undefined");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double iop(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_dims(pred, gt);
  if (pred.area() == 0) {
    throw UndefinedRatioError("IoP is undefined for an empty prediction");
  }
  return static_cast<double>(intersection_area(pred, gt)) /
         static_cast<double>(pred.area());
}

double iog(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_dims(pred, gt);
  if (gt.area() == 0) {
    throw UndefinedRatioError("IoG is undefined for an empty ground truth");
  }
  return static_cast<double>(intersection_area(pred, gt)) /
         static_cast<double>(gt.area());
}

}  // namespace segdist
