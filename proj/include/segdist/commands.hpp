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

// File-level workflows behind the CLI subcommands. Each reads its inputs,
// runs one pipeline over every image in input order and writes its outputs;
// no function here keeps state between calls.

#ifndef SEGDIST_COMMANDS_HPP_
#define SEGDIST_COMMANDS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "segdist/confidence.hpp"
#include "segdist/io.hpp"
#include "segdist/metrics.hpp"
#include "segdist/picksim.hpp"
#include "segdist/synth.hpp"
#include "segdist/union_nms.hpp"

namespace segdist {

namespace fs = std::filesystem;

// Diagnostics sink. 0: silent, 1: warnings, 2: progress.
struct Log {
  int verbosity = 1;
  std::ostream* out = nullptr;  // nullptr: std::cerr

  void warn(const std::string& msg) const;
  void info(const std::string& msg) const;
};

// Runs fn(0) .. fn(n - 1) on up to `threads` workers (0: one per core). If
// any call throws, the exception of the lowest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

// Pairs every ground-truth image with its predictions. Predictions for an
// unknown image or with the wrong grid raise ValidationError.
std::vector<EvalImage> join(const GroundTruthDataset& gt,
                            const std::vector<Prediction>& predictions);

void run_confmask(const fs::path& samples, const ConfidenceParams& params,
                  const fs::path& out, const Log& log = {});
void run_union_nms(const fs::path& samples, const NmsParams& params,
                   const fs::path& out, const Log& log = {});
// Throws ValidationError when a record has no mode hypothesis.
void run_mode(const fs::path& samples, const fs::path& out,
              const Log& log = {});

// Report output: <prefix>.json and <prefix>.csv, plus <prefix>_pr.svg when
// `svg` is set. A trailing .json or .csv on the prefix is dropped.
EvalReport run_eval(const fs::path& gt, const fs::path& predictions,
                    const EvalOptions& options,
                    const std::optional<fs::path>& report_prefix, bool svg,
                    const Log& log = {});
Json report_to_json(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);
std::string pr_curves_svg(const EvalReport& report);

struct PickSimSummary {
  std::string predictions;  // source file
  PickSimConfig config;
  PickSimResult result;
  double pickable_area_fraction = 0.0;
};

// Image j of the ground truth uses probes [j * n_probes, (j + 1) * n_probes)
// of the seeded stream.
PickSimSummary run_picksim(const fs::path& gt, const fs::path& predictions,
                           const PickSimConfig& config, const Log& log = {});
Json picksim_to_json(const PickSimSummary& summary);
std::string picksim_csv(const std::vector<PickSimSummary>& summaries);
// Double-pick rate against pickable area, one point per prediction file.
std::string picksim_svg(const std::vector<PickSimSummary>& summaries);

// Writes ground_truth.json (realized components), samples.json and
// mixture.json into out_dir.
// Scene i uses seed stream_key(seed, 2i), its samples stream_key(seed, 2i+1).
void run_synth(const SceneSpec& spec, std::size_t k, std::uint64_t seed,
               std::size_t scenes, const fs::path& out_dir,
               const Log& log = {});

struct IopBucket {
  std::optional<double> p;  // empty for predictions without a p tag
  std::size_t count = 0;
  std::optional<double> exceedance;
  std::vector<std::pair<double, double>> quantiles;  // (q, IoP)
};

struct CalibrationReport {
  std::optional<double> auc;
  std::string auc_note;  // why the AUC is missing, if it is
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double iou_cut = 0.5;
  double iop_cut = 0.95;
  std::vector<IopBucket> buckets;
};

CalibrationReport run_calibrate(const fs::path& gt, const fs::path& predictions,
                                double iou_cut, double iop_cut,
                                const Log& log = {});
Json calibration_to_json(const CalibrationReport& report);
std::string calibration_csv(const CalibrationReport& report);
std::string calibration_svg(const CalibrationReport& report);

struct GuaranteeReport {
  std::size_t k = 0;
  double p = 0.0;
  std::size_t trials = 0;
  std::size_t required_support = 0;
  std::size_t masks = 0;
  std::size_t contained = 0;  // inside an instance of the realized truth
  double containment_fraction = 0.0;
  double threshold = 0.0;     // p - slack
  double mean_exact_containment = 0.0;
  double min_exact_containment = 1.0;
  std::size_t structural_violations = 0;
  double mean_total_area = 0.0;
  bool passed = false;
};

// End-to-end check of the containment guarantee on synthetic scenes: every
// emitted mask must have ceil(k p) distinct-sample support members that all
// contain it, and the fraction of masks inside the realized ground truth
// must reach p - slack.
GuaranteeReport verify_guarantee(const SceneSpec& spec, std::size_t k, double p,
                                 std::size_t trials, std::uint64_t seed,
                                 double slack = 0.05, double score_floor = 0.1,
                                 const Log& log = {});
Json guarantee_to_json(const GuaranteeReport& report);

// Structural violations of one extraction (support size, distinct samples,
// containment in each support mask, pairwise disjointness).
std::vector<std::string> check_structure(const SampleSet& set,
                                         const std::vector<ConfidenceMask>& masks,
                                         double p);

}  // namespace segdist

#endif  // SEGDIST_COMMANDS_HPP_
