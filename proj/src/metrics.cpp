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

#include "segdist/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "segdist/error.hpp"

namespace segdist {
namespace {

double ratio_of(std::uint64_t num, std::uint64_t den, const char* what) {
  if (den == 0) throw UndefinedRatioError(std::string(what) + " is undefined");
  return static_cast<double>(num) / static_cast<double>(den);
}

// Matching state shared by the dataset-level metrics: one overlap table and
// one canonical order per image, computed once.
struct PreparedImage {
  const EvalImage* image;
  OverlapTable table;
  std::vector<std::size_t> order;

  explicit PreparedImage(const EvalImage& im)
      : image(&im),
        table(im.predictions, im.ground_truth),
        order(canonical_order(im.predictions)) {}

  MatchOutcome run(const MatchSpec& spec) const {
    return match(image->predictions, image->ground_truth, table, order, spec);
  }
};

std::vector<PreparedImage> prepare(std::span<const EvalImage> images) {
  std::vector<PreparedImage> out;
  out.reserve(images.size());
  for (const EvalImage& im : images) out.emplace_back(im);
  return out;
}

// A prediction's position in the dataset-wide canonical order: descending
// score, then image index, then in-image canonical rank.
struct Entry {
  double score;
  std::size_t image;
  std::size_t pred;
};

std::vector<Entry> pooled_order(const std::vector<PreparedImage>& prepared,
                                std::optional<CategoryId> category) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const auto& preds = prepared[i].image->predictions;
    for (std::size_t p : prepared[i].order) {
      if (category && preds[p].category != *category) continue;
      entries.push_back({preds[p].score, i, p});
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.score > b.score; });
  return entries;
}

std::vector<std::pair<double, bool>> labels_for(
    const std::vector<Entry>& entries,
    const std::vector<MatchOutcome>& outcomes) {
  std::vector<std::pair<double, bool>> labels;
  labels.reserve(entries.size());
  for (const Entry& e : entries) {
    labels.emplace_back(e.score, outcomes[e.image].true_positive[e.pred]);
  }
  return labels;
}

std::vector<MatchOutcome> match_all(const std::vector<PreparedImage>& prepared,
                                    const MatchSpec& spec) {
  std::vector<MatchOutcome> out;
  out.reserve(prepared.size());
  for (const PreparedImage& p : prepared) out.push_back(p.run(spec));
  return out;
}

std::size_t total_gt(std::span<const EvalImage> images) {
  std::size_t n = 0;
  for (const EvalImage& im : images) n += im.ground_truth.size();
  return n;
}

std::vector<double> grid(int first, int last, int step) {
  std::vector<double> out;
  for (int v = first; v <= last; v += step) out.push_back(v / 100.0);
  return out;
}

}  // namespace

std::string to_string(Overlap kind) {
  switch (kind) {
    case Overlap::kIoU:
      return "iou";
    case Overlap::kIoP:
      return "iop";
    case Overlap::kIoG:
      return "iog";
  }
  return "?";
}

Overlap parse_overlap(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "iou") return Overlap::kIoU;
  if (s == "iop") return Overlap::kIoP;
  if (s == "iog") return Overlap::kIoG;
  throw InvalidArgumentError("unknown overlap kind '" + name + "'");
}

double overlap(const BinaryMask& pred, const BinaryMask& gt, Overlap kind) {
  switch (kind) {
    case Overlap::kIoU:
      return iou(pred, gt);
    case Overlap::kIoP:
      return iop(pred, gt);
    case Overlap::kIoG:
      return iog(pred, gt);
  }
  return 0.0;
}

std::size_t MatchOutcome::tp_count() const {
  return static_cast<std::size_t>(
      std::count(true_positive.begin(), true_positive.end(), true));
}

OverlapTable::OverlapTable(std::span<const Instance> predictions,
                           std::span<const Instance> ground_truths) {
  pred_area_.reserve(predictions.size());
  gt_area_.reserve(ground_truths.size());
  for (const Instance& p : predictions) pred_area_.push_back(p.mask.area());
  for (const Instance& g : ground_truths) gt_area_.push_back(g.mask.area());
  inter_.resize(predictions.size() * ground_truths.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t j = 0; j < ground_truths.size(); ++j) {
      inter_[i * ground_truths.size() + j] =
          intersection_area(predictions[i].mask, ground_truths[j].mask);
    }
  }
}

double OverlapTable::ratio(std::size_t pred, std::size_t gt,
                           Overlap kind) const {
  const std::uint64_t inter = inter_[pred * gt_area_.size() + gt];
  switch (kind) {
    case Overlap::kIoU:
      return ratio_of(inter, pred_area_[pred] + gt_area_[gt] - inter,
                      "IoU of two empty masks");
    case Overlap::kIoP:
      return ratio_of(inter, pred_area_[pred], "IoP of an empty prediction");
    case Overlap::kIoG:
      return ratio_of(inter, gt_area_[gt], "IoG of an empty ground truth");
  }
  return 0.0;
}

MatchOutcome match(std::span<const Instance> predictions,
                   std::span<const Instance> ground_truths,
                   const MatchSpec& spec) {
  const OverlapTable table(predictions, ground_truths);
  const std::vector<std::size_t> order = canonical_order(predictions);
  return match(predictions, ground_truths, table, order, spec);
}

MatchOutcome match(std::span<const Instance> predictions,
                   std::span<const Instance> ground_truths,
                   const OverlapTable& table, std::span<const std::size_t> order,
                   const MatchSpec& spec) {
  MatchOutcome out;
  out.n_pred = predictions.size();
  out.n_gt = ground_truths.size();
  out.true_positive.assign(out.n_pred, false);
  out.matched_gt.assign(out.n_pred, std::nullopt);
  out.gt_matched.assign(out.n_gt, false);
  out.scores.reserve(out.n_pred);
  for (const Instance& p : predictions) out.scores.push_back(p.score);

  for (std::size_t p : order) {
    std::optional<std::size_t> best;
    double best_overlap = -1.0;
    for (std::size_t g = 0; g < out.n_gt; ++g) {
      if (out.gt_matched[g]) continue;
      if (spec.class_aware &&
          predictions[p].category != ground_truths[g].category) {
        continue;
      }
      const double o = table.ratio(p, g, spec.overlap);
      if (o > best_overlap) {
        best_overlap = o;
        best = g;
      }
    }
    if (best && best_overlap >= spec.threshold) {
      out.true_positive[p] = true;
      out.matched_gt[p] = *best;
      out.gt_matched[*best] = true;
    }
  }
  return out;
}

std::vector<double> standard_thresholds() { return grid(50, 95, 5); }
std::vector<double> high_precision_grid() { return grid(75, 95, 5); }

std::vector<PrPoint> pr_curve(std::span<const std::pair<double, bool>> labels,
                              std::size_t n_gt) {
  if (n_gt == 0) {
    throw InvalidArgumentError("a precision/recall curve needs ground truth");
  }
  std::vector<PrPoint> curve;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].second) ++tp;
    const bool group_ends =
        i + 1 == labels.size() || labels[i + 1].first != labels[i].first;
    if (group_ends) {
      curve.push_back({labels[i].first,
                       static_cast<double>(tp) / static_cast<double>(i + 1),
                       static_cast<double>(tp) / static_cast<double>(n_gt)});
    }
  }
  return curve;
}

double interpolated_ap(std::span<const PrPoint> curve) {
  if (curve.empty()) return 0.0;
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double sum = 0.0;
  std::size_t j = 0;
  for (int r = 0; r <= 100; ++r) {
    const double level = r / 100.0;
    while (j < curve.size() && curve[j].recall < level) ++j;
    if (j == curve.size()) break;
    sum += envelope[j];
  }
  return sum / 101.0;
}

ApResult average_precision(std::span<const EvalImage> images, Overlap kind,
                           std::span<const double> thresholds) {
  if (thresholds.empty()) {
    throw InvalidArgumentError("average precision needs at least one threshold");
  }
  std::map<CategoryId, std::size_t> gt_per_class;
  std::set<CategoryId> pred_classes;
  for (const EvalImage& im : images) {
    for (const Instance& g : im.ground_truth) ++gt_per_class[g.category];
    for (const Instance& p : im.predictions) pred_classes.insert(p.category);
  }
  if (gt_per_class.empty()) {
    throw InvalidArgumentError("average precision needs ground truth");
  }

  ApResult result;
  for (CategoryId c : pred_classes) {
    if (!gt_per_class.contains(c)) result.excluded.push_back(c);
  }

  const std::vector<PreparedImage> prepared = prepare(images);
  std::map<CategoryId, std::vector<Entry>> order;
  for (const auto& [c, n] : gt_per_class) order[c] = pooled_order(prepared, c);

  for (double t : thresholds) {
    const std::vector<MatchOutcome> outcomes =
        match_all(prepared, {kind, t, true});
    for (const auto& [c, n] : gt_per_class) {
      const auto labels = labels_for(order[c], outcomes);
      auto curve = pr_curve(labels, n);
      result.per_class_threshold[c].push_back(interpolated_ap(curve));
      result.curves[c].push_back(std::move(curve));
    }
  }
  double total = 0.0;
  for (const auto& [c, aps] : result.per_class_threshold) {
    double s = 0.0;
    for (double a : aps) s += a;
    result.per_class[c] = s / static_cast<double>(aps.size());
    total += result.per_class[c];
  }
  result.mean_ap = total / static_cast<double>(result.per_class.size());
  return result;
}

double average_recall(std::span<const EvalImage> images, Overlap kind,
                      std::span<const double> thresholds) {
  const std::size_t n_gt = total_gt(images);
  if (n_gt == 0) throw InvalidArgumentError("average recall needs ground truth");
  if (thresholds.empty()) {
    throw InvalidArgumentError("average recall needs at least one threshold");
  }
  const std::vector<PreparedImage> prepared = prepare(images);
  double sum = 0.0;
  for (double t : thresholds) {
    std::size_t matched = 0;
    for (const MatchOutcome& o : match_all(prepared, {kind, t, true})) {
      matched += o.tp_count();
    }
    sum += static_cast<double>(matched) / static_cast<double>(n_gt);
  }
  return sum / static_cast<double>(thresholds.size());
}

double average_recall(std::span<const EvalImage> images, Overlap kind) {
  return average_recall(images, kind, standard_thresholds());
}

double mr_at_hp(std::span<const EvalImage> images,
                std::span<const double> precision_grid,
                std::span<const double> tau_grid) {
  const std::size_t n_gt = total_gt(images);
  if (n_gt == 0) throw InvalidArgumentError("MR@HP needs ground truth");
  if (precision_grid.empty() || tau_grid.empty()) {
    throw InvalidArgumentError("MR@HP grids must be non-empty");
  }
  const std::vector<PreparedImage> prepared = prepare(images);
  const std::vector<Entry> order = pooled_order(prepared, std::nullopt);
  double sum = 0.0;
  for (double tau : tau_grid) {
    const auto outcomes = match_all(prepared, {Overlap::kIoP, tau, true});
    const auto curve = pr_curve(labels_for(order, outcomes), n_gt);
    for (double p : precision_grid) {
      double best = 0.0;
      for (const PrPoint& pt : curve) {
        if (pt.precision >= p) best = std::max(best, pt.recall);
      }
      sum += best;
    }
  }
  return sum / static_cast<double>(precision_grid.size() * tau_grid.size());
}

double roc_auc(std::span<const std::pair<double, bool>> scored_labels) {
  std::size_t n_pos = 0;
  for (const auto& [s, l] : scored_labels) n_pos += l ? 1 : 0;
  const std::size_t n_neg = scored_labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw InvalidArgumentError("ROC AUC needs both positive and negative labels");
  }
  std::vector<std::size_t> idx(scored_labels.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scored_labels[a].first < scored_labels[b].first;
  });
  // Sum of (1-based, tie-averaged) ranks of the positives.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() &&
           scored_labels[idx[j]].first == scored_labels[idx[i]].first) {
      ++j;
    }
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t q = i; q < j; ++q) {
      if (scored_labels[idx[q]].second) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

std::optional<double> iop_exceedance(std::span<const EvalImage> bucket,
                                     double cut) {
  std::size_t n = 0;
  std::size_t above = 0;
  for (const EvalImage& im : bucket) {
    for (const Instance& p : im.predictions) {
      if (p.mask.is_empty()) {
        throw UndefinedRatioError("IoP is undefined for an empty prediction");
      }
      double best = 0.0;
      for (const Instance& g : im.ground_truth) {
        best = std::max(best, iop(p.mask, g.mask));
      }
      ++n;
      if (best > cut) ++above;
    }
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(above) / static_cast<double>(n);
}

std::map<double, std::optional<double>> iop_exceedance(
    const std::map<double, std::vector<EvalImage>>& buckets, double cut) {
  std::map<double, std::optional<double>> out;
  for (const auto& [p, images] : buckets) out[p] = iop_exceedance(images, cut);
  return out;
}

std::vector<std::pair<double, bool>> calibration_labels(
    std::span<const EvalImage> images, double iou_cut) {
  std::vector<std::pair<double, bool>> out;
  for (const EvalImage& im : images) {
    for (const Instance& p : im.predictions) {
      double best = 0.0;
      for (const Instance& g : im.ground_truth) {
        best = std::max(best, iou(p.mask, g.mask));
      }
      out.emplace_back(p.score, best >= iou_cut);
    }
  }
  return out;
}

EvalReport evaluate(std::span<const EvalImage> images,
                    const EvalOptions& options) {
  EvalReport report;
  report.n_images = images.size();
  for (const EvalImage& im : images) {
    report.n_gt += im.ground_truth.size();
    report.n_pred += im.predictions.size();
  }
  if (options.compute_map) {
    ApResult ap =
        average_precision(images, Overlap::kIoU, options.map_thresholds);
    report.mean_ap = ap.mean_ap;
    report.per_class_ap = ap.per_class;
    report.per_class_threshold_ap = ap.per_class_threshold;
    report.excluded_classes = ap.excluded;
    report.map_thresholds = options.map_thresholds;
    for (auto& [c, curves] : ap.curves) {
      for (std::size_t t = 0; t < curves.size(); ++t) {
        report.pr_curves[{c, t}] = std::move(curves[t]);
      }
    }
  }
  if (options.compute_ar) {
    report.ar_iou = average_recall(images, Overlap::kIoU, options.map_thresholds);
  }
  if (options.compute_ar_iog) {
    report.ar_iog = average_recall(images, Overlap::kIoG, options.map_thresholds);
  }
  if (options.compute_mrhp) {
    report.mr_at_hp = mr_at_hp(images, options.p_grid, options.tau_grid);
  }
  const auto labels = calibration_labels(images);
  const auto pos = std::count_if(labels.begin(), labels.end(),
                                 [](const auto& l) { return l.second; });
  if (pos > 0 && static_cast<std::size_t>(pos) < labels.size()) {
    report.calibration_auc = roc_auc(labels);
  }
  return report;
}

}  // namespace segdist
