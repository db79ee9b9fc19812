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

// Run-length encoded binary masks.
//
// Pixels are addressed in column-major order (index = col * height + row),
// matching the COCO "counts" convention: the first count is a run of zeros,
// then runs alternate between ones and zeros. Internally a mask stores only
// its one-runs as half-open [begin, end) pixel intervals, so every set
// operation is a linear merge of two interval lists and never touches a
// full raster.

#ifndef SEGDIST_MASK_HPP_
#define SEGDIST_MASK_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segdist {

// Dense boolean grid, row-major. Only used at the edges of the library
// (encode/decode, tests); the algebra below works on runs.
class Raster {
 public:
  Raster(std::uint32_t height, std::uint32_t width);

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }

  bool at(std::uint32_t row, std::uint32_t col) const {
    return pixels_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(std::uint32_t row, std::uint32_t col, bool value = true) {
    pixels_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::uint32_t height_;
  std::uint32_t width_;
  std::vector<std::uint8_t> pixels_;
};

// Half-open interval of set pixels in column-major linear order.
struct Run {
  std::uint64_t begin;
  std::uint64_t end;

  std::uint64_t length() const { return end - begin; }
  friend bool operator==(const Run&, const Run&) = default;
};

class BinaryMask {
 public:
  static BinaryMask empty(std::uint32_t height, std::uint32_t width);
  static BinaryMask full(std::uint32_t height, std::uint32_t width);

  // Uncompressed COCO counts. Zero-length runs in the interior are folded
  // into their neighbours, so any valid count list yields the canonical mask.
  // Throws MalformedMaskError if the counts do not sum to height * width.
  static BinaryMask from_counts(std::uint32_t height, std::uint32_t width,
                                std::span<const std::uint32_t> counts);

  // COCO compressed (character-packed) counts string.
  static BinaryMask from_compressed(std::uint32_t height, std::uint32_t width,
                                    std::string_view packed);

  // One-runs in ascending order. Adjacent or empty runs are allowed and are
  // normalized; overlapping or out-of-range runs throw MalformedMaskError.
  static BinaryMask from_runs(std::uint32_t height, std::uint32_t width,
                              std::vector<Run> runs);

  // Axis-aligned rectangle [row, row + rows) x [col, col + cols), clipped to
  // the grid.
  static BinaryMask rectangle(std::uint32_t height, std::uint32_t width,
                              std::int64_t row, std::int64_t col,
                              std::int64_t rows, std::int64_t cols);

  static BinaryMask encode(const Raster& grid);
  Raster decode() const;

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  std::uint64_t pixel_count() const {
    return static_cast<std::uint64_t>(height_) * width_;
  }

  // Number of set pixels, from the runs alone.
  std::uint64_t area() const { return area_; }
  bool is_empty() const { return runs_.empty(); }

  const std::vector<Run>& runs() const { return runs_; }
  std::vector<std::uint32_t> counts() const;
  std::string to_compressed() const;

  bool test(std::uint32_t row, std::uint32_t col) const;

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.runs_ == b.runs_;
  }

 private:
  BinaryMask(std::uint32_t height, std::uint32_t width, std::vector<Run> runs);

  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  std::uint64_t area_ = 0;
  std::vector<Run> runs_;
};

// Throws DimensionError unless a and b live on the same grid.
void require_same_dims(const BinaryMask& a, const BinaryMask& b);

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask union_of(const BinaryMask& a, const BinaryMask& b);
// Pixels of a that are not in b.
BinaryMask subtract(const BinaryMask& a, const BinaryMask& b);

std::uint64_t intersection_area(const BinaryMask& a, const BinaryMask& b);
std::uint64_t union_area(const BinaryMask& a, const BinaryMask& b);
bool intersects(const BinaryMask& a, const BinaryMask& b);

// True iff every set pixel of inner is set in outer.
bool contains(const BinaryMask& outer, const BinaryMask& inner);

// Overlap ratios. Integer pixel counts, divided once. A zero denominator
// throws UndefinedRatioError.
double iou(const BinaryMask& a, const BinaryMask& b);
// |pred & gt| / |pred|
double iop(const BinaryMask& pred, const BinaryMask& gt);
// |pred & gt| / |gt|
double iog(const BinaryMask& pred, const BinaryMask& gt);

}  // namespace segdist

#endif  // SEGDIST_MASK_HPP_
