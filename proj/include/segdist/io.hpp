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

// File formats.
//
// Ground truth: the COCO subset {images, annotations, categories}. A
// segmentation is either an RLE object {"size": [h, w], "counts": [...]}
// (counts may also be a COCO compressed string) or a list of polygons
// [[x0, y0, x1, y1, ...], ...] that is rasterized on load.
//
// Sample sets: a JSON array of
//   {"image_id", "width", "height", "mode": [instance...]?,
//    "samples": [[instance...], ...]}
// where instance = {"category_id", "score", "segmentation": RLE}.
//
// Predictions: a JSON array of {"image_id", "category_id", "score",
// "segmentation"}; confidence-mask outputs add "p" and "support".

#ifndef SEGDIST_IO_HPP_
#define SEGDIST_IO_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "segdist/confidence.hpp"
#include "segdist/model.hpp"
#include "segdist/synth.hpp"

namespace segdist {

using Json = nlohmann::ordered_json;

struct GroundTruthDataset {
  std::vector<GroundTruthImage> images;
  // Annotation id of every instance, parallel to images[i].instances.
  std::vector<std::vector<std::int64_t>> annotation_ids;
  std::map<CategoryId, std::string> categories;
  std::vector<std::string> warnings;

  const GroundTruthImage* find(ImageId id) const;
};

struct Prediction {
  ImageId image_id = 0;
  Instance instance;
  std::optional<double> p;  // set on confidence-mask outputs
};

// Polygons as flat [x0, y0, x1, y1, ...] vertex lists in pixel coordinates.
// A pixel is set when its centre is inside the polygon under the even-odd
// rule; multiple polygons are unioned. Self-intersections append a warning.
BinaryMask rasterize_polygons(std::uint32_t height, std::uint32_t width,
                              std::span<const std::vector<double>> polygons,
                              std::vector<std::string>* warnings = nullptr);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

// Segmentation <-> JSON. RLE output is always uncompressed counts.
Json mask_to_json(const BinaryMask& mask);
BinaryMask mask_from_json(const Json& seg, std::uint32_t height,
                          std::uint32_t width,
                          std::vector<std::string>* warnings = nullptr);

GroundTruthDataset parse_ground_truth(const Json& doc);
GroundTruthDataset load_ground_truth(const std::filesystem::path& path);
Json ground_truth_to_json(std::span<const GroundTruthImage> images,
                          const std::map<CategoryId, std::string>& categories);

std::vector<SampleSet> parse_samples(const Json& doc);
std::vector<SampleSet> load_samples(const std::filesystem::path& path);
Json samples_to_json(std::span<const SampleSet> sets);

std::vector<Prediction> parse_predictions(const Json& doc);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
Json predictions_to_json(std::span<const Prediction> predictions);
Json confidence_masks_to_json(ImageId image_id,
                              std::span<const ConfidenceMask> masks);

SceneSpec parse_scene_spec(const Json& doc);
SceneSpec load_scene_spec(const std::filesystem::path& path);
Json scene_spec_to_json(const SceneSpec& spec);
// Exact mixture of each scene, for oracle checks.
Json mixtures_to_json(std::span<const Scene> scenes);

}  // namespace segdist

#endif  // SEGDIST_IO_HPP_
