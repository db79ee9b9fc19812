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

// Instance-segmentation evaluation.
//
// All metrics share one matching rule: predictions are visited in canonical
// score order and each claims the unmatched ground truth (same category when
// class-aware) with the largest overlap, provided that overlap reaches the
// threshold. Overlap is IoU, IoP (intersection over prediction) or IoG
// (intersection over ground truth).
//
// Precision/recall curves have one point per distinct prediction score: the
// cutoff t keeps every prediction scoring >= t.

#ifndef SEGDIST_METRICS_HPP_
#define SEGDIST_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "segdist/model.hpp"

namespace segdist {

enum class Overlap { kIoU, kIoP, kIoG };

std::string to_string(Overlap kind);
// "iou", "iop", "iog" (case-insensitive). Throws InvalidArgumentError.
Overlap parse_overlap(const std::string& name);

double overlap(const BinaryMask& pred, const BinaryMask& gt, Overlap kind);

struct MatchSpec {
  Overlap overlap = Overlap::kIoU;
  double threshold = 0.5;
  bool class_aware = true;
};

struct MatchOutcome {
  // Per prediction, in input order.
  std::vector<bool> true_positive;
  std::vector<double> scores;
  std::vector<std::optional<std::size_t>> matched_gt;
  // Per ground truth.
  std::vector<bool> gt_matched;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;

  std::size_t tp_count() const;
};

// Intersection areas of every (prediction, ground truth) pair of one image,
// computed once and shared by every overlap kind and threshold.
class OverlapTable {
 public:
  OverlapTable(std::span<const Instance> predictions,
               std::span<const Instance> ground_truths);

  std::size_t n_pred() const { return pred_area_.size(); }
  std::size_t n_gt() const { return gt_area_.size(); }
  double ratio(std::size_t pred, std::size_t gt, Overlap kind) const;

 private:
  std::vector<std::uint64_t> inter_;
  std::vector<std::uint64_t> pred_area_;
  std::vector<std::uint64_t> gt_area_;
};

MatchOutcome match(std::span<const Instance> predictions,
                   std::span<const Instance> ground_truths,
                   const MatchSpec& spec);

// Same, reusing precomputed overlaps. `order` is the canonical order of the
// predictions.
MatchOutcome match(std::span<const Instance> predictions,
                   std::span<const Instance> ground_truths,
                   const OverlapTable& table, std::span<const std::size_t> order,
                   const MatchSpec& spec);

// Predictions and ground truth of one image.
struct EvalImage {
  std::vector<Instance> predictions;
  std::vector<Instance> ground_truth;
};

// 0.50, 0.55, ..., 0.95.
std::vector<double> standard_thresholds();
// 0.75, 0.80, 0.85, 0.90, 0.95.
std::vector<double> high_precision_grid();

struct PrPoint {
  double threshold;  // score cutoff
  double precision;
  double recall;
};

// One point per distinct score among the labels, in descending score order.
// Labels must already be in canonical order (descending score).
std::vector<PrPoint> pr_curve(std::span<const std::pair<double, bool>> labels,
                              std::size_t n_gt);

// Area under the precision envelope sampled at recall 0, 0.01, ..., 1.
double interpolated_ap(std::span<const PrPoint> curve);

struct ApResult {
  double mean_ap = 0.0;
  // Per category, averaged over thresholds.
  std::map<CategoryId, double> per_class;
  // Per category, one entry per threshold.
  std::map<CategoryId, std::vector<double>> per_class_threshold;
  std::map<CategoryId, std::vector<std::vector<PrPoint>>> curves;
  // Categories that only appear in predictions.
  std::vector<CategoryId> excluded;
};

// AP per category and threshold, averaged over thresholds, then over the
// categories that have ground truth. Throws InvalidArgumentError when no
// category has ground truth.
ApResult average_precision(std::span<const EvalImage> images, Overlap kind,
                           std::span<const double> thresholds);

// Matched ground truth over total ground truth, averaged over the thresholds.
// Throws InvalidArgumentError when there is no ground truth.
double average_recall(std::span<const EvalImage> images, Overlap kind,
                      std::span<const double> thresholds);
double average_recall(std::span<const EvalImage> images, Overlap kind);

// Max recall at high precision, matching by IoP. For each (precision bar,
// IoP threshold) cell: the largest recall over score cutoffs whose precision
// reaches the bar, or 0; averaged over the grid.
double mr_at_hp(std::span<const EvalImage> images,
                std::span<const double> precision_grid,
                std::span<const double> tau_grid);

// Mann-Whitney AUC with average ranks for ties. Throws InvalidArgumentError
// unless both labels occur.
double roc_auc(std::span<const std::pair<double, bool>> scored_labels);

// Fraction of predictions whose best IoP against any ground truth of its
// image exceeds `cut`; nothing for a bucket without predictions.
std::optional<double> iop_exceedance(std::span<const EvalImage> bucket,
                                     double cut = 0.95);
std::map<double, std::optional<double>> iop_exceedance(
    const std::map<double, std::vector<EvalImage>>& buckets, double cut = 0.95);

// (score, best-IoU >= iou_cut) for every prediction; input for roc_auc.
std::vector<std::pair<double, bool>> calibration_labels(
    std::span<const EvalImage> images, double iou_cut = 0.5);

struct EvalOptions {
  bool compute_map = true;
  bool compute_ar = true;      // AR with IoU
  bool compute_ar_iog = true;  // AR with IoG
  bool compute_mrhp = true;
  std::vector<double> map_thresholds = standard_thresholds();
  std::vector<double> p_grid = high_precision_grid();
  std::vector<double> tau_grid = high_precision_grid();
};

struct EvalReport {
  std::optional<double> mean_ap;
  std::optional<double> ar_iou;
  std::optional<double> ar_iog;
  std::optional<double> mr_at_hp;
  std::map<CategoryId, double> per_class_ap;
  std::map<CategoryId, std::vector<double>> per_class_threshold_ap;
  std::vector<CategoryId> excluded_classes;
  std::vector<double> map_thresholds;
  // (category, threshold index) -> PR curve at that IoU threshold.
  std::map<std::pair<CategoryId, std::size_t>, std::vector<PrPoint>> pr_curves;
  // Score vs. best-IoU >= 0.5; empty unless both outcomes occur.
  std::optional<double> calibration_auc;
  std::size_t n_images = 0;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
};

EvalReport evaluate(std::span<const EvalImage> images, const EvalOptions& options);

}  // namespace segdist

#endif  // SEGDIST_METRICS_HPP_
