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

#include "segdist/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "segdist/error.hpp"
#include "segdist/rng.hpp"

namespace segdist {

namespace {

// Fixed-precision text for CSV and SVG; JSON keeps full doubles.
std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v, 10) : std::string();
}

Json opt_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool line = true;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

// Static line/scatter plot. Axis ranges cover the data plus [0, 1] when
// `unit_axes` is set.
std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series,
                     bool unit_axes) {
  constexpr double W = 640, H = 480, L = 70, R = 170, T = 40, B = 60;
  double x0 = unit_axes ? 0 : INFINITY, x1 = unit_axes ? 1 : -INFINITY;
  double y0 = unit_axes ? 0 : INFINITY, y1 = unit_axes ? 1 : -INFINITY;
  for (const Series& s : series) {
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
    << "font-size=\"15\">" << xml_escape(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
    << "\" height=\"" << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4, fy = y0 + (y1 - y0) * i / 4;
    o << "<text x=\"" << fmt(px(fx), 1) << "\" y=\"" << H - B + 16
      << "\" text-anchor=\"middle\">" << fmt(fx, 2) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << fmt(py(fy) + 4, 1)
      << "\" text-anchor=\"end\">" << fmt(fy, 2) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18
    << "\" text-anchor=\"middle\">" << xml_escape(xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << (T + H - B) / 2
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (T + H - B) / 2
    << ")\">" << xml_escape(ylabel) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* colour = kPalette[i % std::size(kPalette)];
    if (s.line && s.points.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
      for (std::size_t j = 0; j < s.points.size(); ++j) {
        o << (j ? " " : "") << fmt(px(s.points[j].first), 2) << ','
          << fmt(py(s.points[j].second), 2);
      }
      o << "\"/>\n";
    }
    for (auto [x, y] : s.points) {
      o << "<circle cx=\"" << fmt(px(x), 2) << "\" cy=\"" << fmt(py(y), 2)
        << "\" r=\"" << (s.line ? 2 : 4) << "\" fill=\"" << colour << "\"/>\n";
    }
    const double ly = T + 14 + 16.0 * static_cast<double>(i);
    o << "<rect x=\"" << W - R + 10 << "\" y=\"" << ly - 9
      << "\" width=\"10\" height=\"10\" fill=\"" << colour << "\"/>\n";
    o << "<text x=\"" << W - R + 26 << "\" y=\"" << ly << "\">"
      << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  fs::path base = prefix;
  const auto ext = base.extension().string();
  if (ext == ".json" || ext == ".csv") base.replace_extension();
  return fs::path(base.string() + suffix);
}

std::vector<Prediction> to_predictions(ImageId id,
                                       const std::vector<Instance>& instances) {
  std::vector<Prediction> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) out.push_back({id, inst, std::nullopt});
  return out;
}

std::vector<SampleSet> load_valid_samples(const fs::path& path, const Log& log) {
  auto sets = load_samples(path);
  log.info("loaded " + std::to_string(sets.size()) + " sample sets from " +
           path.string());
  return sets;
}

GroundTruthDataset load_gt(const fs::path& path, const Log& log) {
  GroundTruthDataset gt = load_ground_truth(path);
  for (const std::string& w : gt.warnings) log.warn(w);
  log.info("loaded " + std::to_string(gt.images.size()) +
           " ground-truth images from " + path.string());
  return gt;
}

// Best IoP of each prediction against any ground truth of its image.
std::vector<double> best_iop(const EvalImage& im) {
  std::vector<double> out;
  out.reserve(im.predictions.size());
  for (const Instance& p : im.predictions) {
    double best = 0.0;
    for (const Instance& g : im.ground_truth) best = std::max(best, iop(p.mask, g.mask));
    out.push_back(best);
  }
  return out;
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

void Log::warn(const std::string& msg) const {
  if (verbosity >= 1) (out ? *out : std::cerr) << "warning: " << msg << '\n';
}

void Log::info(const std::string& msg) const {
  if (verbosity >= 2) (out ? *out : std::cerr) << msg << '\n';
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<EvalImage> join(const GroundTruthDataset& gt,
                            const std::vector<Prediction>& predictions) {
  std::map<ImageId, std::size_t> index;
  std::vector<EvalImage> images(gt.images.size());
  for (std::size_t i = 0; i < gt.images.size(); ++i) {
    index[gt.images[i].image_id] = i;
    images[i].ground_truth = gt.images[i].instances;
  }
  std::vector<Violation> problems;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Prediction& p = predictions[i];
    const auto it = index.find(p.image_id);
    const std::string where = "prediction " + std::to_string(i);
    if (it == index.end()) {
      problems.push_back({where, "image_id " + std::to_string(p.image_id) +
                                     " is not in the ground truth"});
      continue;
    }
    const GroundTruthImage& im = gt.images[it->second];
    if (p.instance.mask.height() != im.height || p.instance.mask.width() != im.width) {
      problems.push_back(
          {where, "mask is " + std::to_string(p.instance.mask.height()) + "x" +
                      std::to_string(p.instance.mask.width()) + ", image " +
                      std::to_string(im.image_id) + " is " +
                      std::to_string(im.height) + "x" + std::to_string(im.width)});
      continue;
    }
    images[it->second].predictions.push_back(p.instance);
  }
  if (!problems.empty()) throw ValidationError(describe(problems));
  return images;
}

void run_confmask(const fs::path& samples, const ConfidenceParams& params,
                  const fs::path& out, const Log& log) {
  validate_params(params);
  const auto sets = load_valid_samples(samples, log);
  std::vector<std::vector<ConfidenceMask>> results(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) {
    results[i] = extract(sets[i], params);
  });
  Json doc = Json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (auto& j : confidence_masks_to_json(sets[i].image_id, results[i])) {
      doc.push_back(std::move(j));
    }
    log.info("image " + std::to_string(sets[i].image_id) + ": " +
             std::to_string(results[i].size()) + " confidence masks");
  }
  write_json(out, doc);
}

void run_union_nms(const fs::path& samples, const NmsParams& params,
                   const fs::path& out, const Log& log) {
  validate_params(params);
  const auto sets = load_valid_samples(samples, log);
  std::vector<std::vector<Instance>> results(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) {
    const auto problems = validate(sets[i]);
    if (!problems.empty()) {
      throw ValidationError("image " + std::to_string(sets[i].image_id) + ": " +
                            describe(problems));
    }
    results[i] = union_nms(sets[i], params);
  });
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto p = to_predictions(sets[i].image_id, results[i]);
    preds.insert(preds.end(), p.begin(), p.end());
  }
  write_json(out, predictions_to_json(preds));
}

void run_mode(const fs::path& samples, const fs::path& out, const Log& log) {
  const auto sets = load_valid_samples(samples, log);
  std::vector<Violation> missing;
  std::vector<Prediction> preds;
  for (std::size_t r = 0; r < sets.size(); ++r) {
    if (!sets[r].mode) {
      missing.push_back({"record " + std::to_string(r),
                         "image_id " + std::to_string(sets[r].image_id) +
                             " has no mode hypothesis"});
      continue;
    }
    auto p = to_predictions(sets[r].image_id, sets[r].mode->instances);
    preds.insert(preds.end(), p.begin(), p.end());
  }
  if (!missing.empty()) throw ValidationError(describe(missing));
  write_json(out, predictions_to_json(preds));
}

Json report_to_json(const EvalReport& r) {
  Json doc;
  doc["n_images"] = r.n_images;
  doc["n_gt"] = r.n_gt;
  doc["n_pred"] = r.n_pred;
  Json m;
  m["map"] = opt_json(r.mean_ap);
  m["ar"] = opt_json(r.ar_iou);
  m["ar_iog"] = opt_json(r.ar_iog);
  m["mr_at_hp"] = opt_json(r.mr_at_hp);
  m["calibration_auc"] = opt_json(r.calibration_auc);
  doc["metrics"] = std::move(m);
  doc["map_thresholds"] = r.map_thresholds;
  Json per_class = Json::array();
  for (const auto& [c, ap] : r.per_class_ap) {
    Json j;
    j["category_id"] = c;
    j["ap"] = ap;
    if (auto it = r.per_class_threshold_ap.find(c); it != r.per_class_threshold_ap.end()) {
      j["ap_per_threshold"] = it->second;
    }
    per_class.push_back(std::move(j));
  }
  doc["per_class"] = std::move(per_class);
  doc["excluded_categories"] = r.excluded_classes;
  return doc;
}

std::string report_to_csv(const EvalReport& r) {
  std::ostringstream o;
  o << "metric,category_id,threshold,value\n";
  auto row = [&](const char* name, const std::optional<double>& v) {
    if (v) o << name << ",all,," << fmt(*v, 10) << '\n';
  };
  row("map", r.mean_ap);
  row("ar", r.ar_iou);
  row("ar_iog", r.ar_iog);
  row("mr_at_hp", r.mr_at_hp);
  row("calibration_auc", r.calibration_auc);
  for (const auto& [c, ap] : r.per_class_ap) {
    o << "ap," << c << ",," << fmt(ap, 10) << '\n';
    if (auto it = r.per_class_threshold_ap.find(c); it != r.per_class_threshold_ap.end()) {
      for (std::size_t t = 0; t < it->second.size() && t < r.map_thresholds.size(); ++t) {
        o << "ap," << c << ',' << fmt(r.map_thresholds[t], 2) << ','
          << fmt(it->second[t], 10) << '\n';
      }
    }
  }
  return o.str();
}

std::string pr_curves_svg(const EvalReport& r) {
  std::vector<Series> series;
  for (const auto& [key, curve] : r.pr_curves) {
    const auto [c, t] = key;
    const double thr = t < r.map_thresholds.size() ? r.map_thresholds[t] : 0.0;
    // Two representative thresholds per class keep the legend readable.
    if (std::abs(thr - 0.5) > 1e-9 && std::abs(thr - 0.75) > 1e-9) continue;
    Series s{"cat " + std::to_string(c) + " @IoU " + fmt(thr, 2), {}, true};
    for (const PrPoint& p : curve) s.points.emplace_back(p.recall, p.precision);
    series.push_back(std::move(s));
  }
  return svg_plot("Precision / recall", "recall", "precision", series, true);
}

EvalReport run_eval(const fs::path& gt_path, const fs::path& pred_path,
                    const EvalOptions& options,
                    const std::optional<fs::path>& report_prefix, bool svg,
                    const Log& log) {
  const GroundTruthDataset gt = load_gt(gt_path, log);
  const auto images = join(gt, load_predictions(pred_path));
  EvalReport report = evaluate(images, options);
  if (report_prefix) {
    write_json(with_suffix(*report_prefix, ".json"), report_to_json(report));
    write_text(with_suffix(*report_prefix, ".csv"), report_to_csv(report));
    if (svg) write_text(with_suffix(*report_prefix, "_pr.svg"), pr_curves_svg(report));
  }
  return report;
}

PickSimSummary run_picksim(const fs::path& gt_path, const fs::path& pred_path,
                           const PickSimConfig& config, const Log& log) {
  validate_config(config);
  const GroundTruthDataset gt = load_gt(gt_path, log);
  const auto images = join(gt, load_predictions(pred_path));
  std::vector<PickSimResult> parts(images.size());
  parallel_for(images.size(), [&](std::size_t j) {
    PickSimConfig c = config;
    c.first_probe = config.first_probe + j * config.n_probes;
    std::vector<BinaryMask> preds, gts;
    for (const Instance& p : images[j].predictions) preds.push_back(p.mask);
    for (const Instance& g : images[j].ground_truth) gts.push_back(g.mask);
    parts[j] = estimate_double_pick(preds, gts, gt.images[j].height,
                                    gt.images[j].width, c);
  });
  std::uint64_t pred_area = 0, gt_area = 0;
  for (const EvalImage& im : images) {
    for (const Instance& p : im.predictions) pred_area += p.mask.area();
    for (const Instance& g : im.ground_truth) gt_area += g.mask.area();
  }
  if (gt_area == 0) throw ValidationError("ground truth has no instances");
  PickSimSummary s;
  s.predictions = pred_path.filename().string();
  s.config = config;
  s.result = combine(parts);
  s.pickable_area_fraction =
      static_cast<double>(pred_area) / static_cast<double>(gt_area);
  return s;
}

Json picksim_to_json(const PickSimSummary& s) {
  Json j;
  j["rate"] = opt_json(s.result.rate);
  j["D"] = s.result.double_picks;
  j["N"] = s.result.valid;
  j["stderr"] = opt_json(s.result.stderr_rate);
  j["probes"] = s.result.probes;
  j["radius"] = s.config.radius;
  j["seed"] = s.config.seed;
  j["pickable_area_fraction"] = s.pickable_area_fraction;
  return j;
}

std::string picksim_csv(const std::vector<PickSimSummary>& summaries) {
  std::ostringstream o;
  o << "predictions,rate,D,N,stderr,probes,radius,seed,pickable_area_fraction\n";
  for (const PickSimSummary& s : summaries) {
    o << csv_escape(s.predictions) << ',' << fmt_opt(s.result.rate) << ','
      << s.result.double_picks << ',' << s.result.valid << ','
      << fmt_opt(s.result.stderr_rate) << ',' << s.result.probes << ','
      << fmt(s.config.radius, 3) << ',' << s.config.seed << ','
      << fmt(s.pickable_area_fraction, 10) << '\n';
  }
  return o.str();
}

std::string picksim_svg(const std::vector<PickSimSummary>& summaries) {
  Series s{"double-pick rate", {}, true};
  std::vector<PickSimSummary> sorted = summaries;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.pickable_area_fraction < b.pickable_area_fraction;
  });
  for (const PickSimSummary& p : sorted) {
    if (p.result.rate) s.points.emplace_back(p.pickable_area_fraction, *p.result.rate);
  }
  return svg_plot("Double picks vs pickable area", "pickable area fraction",
                  "double-pick rate", {s}, false);
}

void run_synth(const SceneSpec& spec, std::size_t k, std::uint64_t seed,
               std::size_t scenes, const fs::path& out_dir, const Log& log) {
  validate_spec(spec);
  if (k == 0) throw InvalidArgumentError("k must be at least 1");
  if (scenes == 0) throw InvalidArgumentError("scene count must be at least 1");
  std::vector<Scene> generated(scenes);
  std::vector<SampleSet> sets(scenes);
  parallel_for(scenes, [&](std::size_t i) {
    generated[i] = generate_scene(spec, stream_key(seed, 2 * i),
                                  static_cast<ImageId>(i + 1));
    sets[i] = sample_hypotheses(generated[i], k, stream_key(seed, 2 * i + 1));
  });
  std::vector<GroundTruthImage> truths;
  truths.reserve(scenes);
  for (const Scene& s : generated) truths.push_back(s.realized_truth());
  std::map<CategoryId, std::string> categories;
  for (std::uint32_t c = 1; c <= spec.categories; ++c) {
    categories[c] = "object_" + std::to_string(c);
  }
  fs::create_directories(out_dir);
  write_json(out_dir / "ground_truth.json", ground_truth_to_json(truths, categories));
  write_json(out_dir / "samples.json", samples_to_json(sets));
  write_json(out_dir / "mixture.json", mixtures_to_json(generated));
  log.info("wrote " + std::to_string(scenes) + " scenes to " + out_dir.string());
}

CalibrationReport run_calibrate(const fs::path& gt_path, const fs::path& pred_path,
                                double iou_cut, double iop_cut, const Log& log) {
  if (!(iou_cut > 0.0 && iou_cut <= 1.0) || !(iop_cut >= 0.0 && iop_cut <= 1.0)) {
    throw InvalidArgumentError("IoU cut must be in (0, 1], IoP cut in [0, 1]");
  }
  const GroundTruthDataset gt = load_gt(gt_path, log);
  const auto preds = load_predictions(pred_path);
  const auto images = join(gt, preds);

  CalibrationReport report;
  report.iou_cut = iou_cut;
  report.iop_cut = iop_cut;
  const auto labels = calibration_labels(images, iou_cut);
  for (const auto& [score, positive] : labels) {
    (positive ? report.positives : report.negatives) += 1;
  }
  try {
    report.auc = roc_auc(labels);
  } catch (const InvalidArgumentError& e) {
    report.auc_note = e.what();
  }

  // Buckets by p; predictions without p form their own bucket, listed first.
  std::map<std::optional<double>, std::vector<EvalImage>> buckets;
  std::map<ImageId, std::size_t> index;
  for (std::size_t i = 0; i < gt.images.size(); ++i) index[gt.images[i].image_id] = i;
  for (const Prediction& p : preds) {
    auto& bucket = buckets[p.p];
    if (bucket.empty()) {
      bucket.resize(images.size());
      for (std::size_t i = 0; i < images.size(); ++i) {
        bucket[i].ground_truth = images[i].ground_truth;
      }
    }
    bucket[index.at(p.image_id)].predictions.push_back(p.instance);
  }
  for (const auto& [p, bucket] : buckets) {
    IopBucket b;
    b.p = p;
    std::vector<double> best;
    for (const EvalImage& im : bucket) {
      const auto v = best_iop(im);
      best.insert(best.end(), v.begin(), v.end());
    }
    b.count = best.size();
    b.exceedance = iop_exceedance(bucket, iop_cut);
    if (!best.empty()) {
      for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        b.quantiles.emplace_back(q, quantile(best, q));
      }
    }
    report.buckets.push_back(std::move(b));
  }
  return report;
}

Json calibration_to_json(const CalibrationReport& r) {
  Json doc;
  doc["auc"] = opt_json(r.auc);
  if (!r.auc) doc["auc_note"] = r.auc_note;
  doc["positives"] = r.positives;
  doc["negatives"] = r.negatives;
  doc["iou_cut"] = r.iou_cut;
  doc["iop_cut"] = r.iop_cut;
  Json buckets = Json::array();
  for (const IopBucket& b : r.buckets) {
    Json j;
    j["p"] = opt_json(b.p);
    j["count"] = b.count;
    j["iop_exceedance"] = opt_json(b.exceedance);
    Json q = Json::object();
    for (auto [level, value] : b.quantiles) q[fmt(level, 2)] = value;
    j["iop_quantiles"] = std::move(q);
    buckets.push_back(std::move(j));
  }
  doc["buckets"] = std::move(buckets);
  return doc;
}

std::string calibration_csv(const CalibrationReport& r) {
  std::ostringstream o;
  o << "p,count,iop_exceedance,iop_q10,iop_q25,iop_q50,iop_q75,iop_q90,auc\n";
  for (const IopBucket& b : r.buckets) {
    o << (b.p ? fmt(*b.p, 6) : std::string("none")) << ',' << b.count << ','
      << fmt_opt(b.exceedance);
    for (std::size_t i = 0; i < 5; ++i) {
      o << ',' << (i < b.quantiles.size() ? fmt(b.quantiles[i].second, 10) : "");
    }
    o << ',' << fmt_opt(r.auc) << '\n';
  }
  return o.str();
}

std::string calibration_svg(const CalibrationReport& r) {
  std::vector<Series> series;
  const char* names[] = {"10%", "25%", "median", "75%", "90%"};
  for (std::size_t q = 0; q < 5; ++q) {
    Series s{std::string("IoP ") + names[q], {}, true};
    for (const IopBucket& b : r.buckets) {
      if (b.p && q < b.quantiles.size()) s.points.emplace_back(*b.p, b.quantiles[q].second);
    }
    series.push_back(std::move(s));
  }
  return svg_plot("IoP quantiles by confidence", "p", "IoP", series, true);
}

std::vector<std::string> check_structure(const SampleSet& set,
                                         const std::vector<ConfidenceMask>& masks,
                                         double p) {
  std::vector<std::string> out;
  const std::size_t need = required_support(set.k(), p);
  for (std::size_t m = 0; m < masks.size(); ++m) {
    const ConfidenceMask& cm = masks[m];
    const std::string where = "image " + std::to_string(set.image_id) + " mask " +
                              std::to_string(m) + ": ";
    if (cm.mask.is_empty()) out.push_back(where + "empty mask");
    if (cm.support.size() < need) {
      out.push_back(where + "support " + std::to_string(cm.support.size()) +
                    " < " + std::to_string(need));
    }
    std::vector<std::size_t> samples;
    for (const InstanceRef& ref : cm.support) {
      if (ref.sample >= set.k() || ref.instance >= set.samples[ref.sample].instances.size()) {
        out.push_back(where + "support reference out of range");
        continue;
      }
      samples.push_back(ref.sample);
      if (!contains(set.samples[ref.sample].instances[ref.instance].mask, cm.mask)) {
        out.push_back(where + "not contained in sample " + std::to_string(ref.sample) +
                      " instance " + std::to_string(ref.instance));
      }
    }
    std::sort(samples.begin(), samples.end());
    if (std::adjacent_find(samples.begin(), samples.end()) != samples.end()) {
      out.push_back(where + "support repeats a sample");
    }
    for (std::size_t o = m + 1; o < masks.size(); ++o) {
      if (intersects(cm.mask, masks[o].mask)) {
        out.push_back(where + "overlaps mask " + std::to_string(o));
      }
    }
  }
  return out;
}

GuaranteeReport verify_guarantee(const SceneSpec& spec, std::size_t k, double p,
                                 std::size_t trials, std::uint64_t seed,
                                 double slack, double score_floor, const Log& log) {
  validate_spec(spec);
  ConfidenceParams params;
  params.p = p;
  params.score_floor = score_floor;
  validate_params(params);
  if (k == 0) throw InvalidArgumentError("k must be at least 1");
  if (trials == 0) throw InvalidArgumentError("trials must be at least 1");
  if (!(slack >= 0.0)) throw InvalidArgumentError("slack must be non-negative");

  struct Trial {
    std::size_t masks = 0, contained = 0, violations = 0;
    double exact_sum = 0.0, exact_min = 1.0;
    std::uint64_t area = 0;
  };
  std::vector<Trial> per(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Scene scene = generate_scene(spec, stream_key(seed, 2 * t),
                                       static_cast<ImageId>(t + 1));
    const SampleSet set = sample_hypotheses(scene, k, stream_key(seed, 2 * t + 1));
    const auto masks = extract(set, params);
    Trial& r = per[t];
    r.masks = masks.size();
    r.violations = check_structure(set, masks, p).size();
    for (const ConfidenceMask& cm : masks) {
      r.area += cm.mask.area();
      const auto& truth = scene.realized_truth().instances;
      if (std::any_of(truth.begin(), truth.end(),
                      [&](const Instance& g) { return contains(g.mask, cm.mask); })) {
        ++r.contained;
      }
      const double exact = to_double(containment_probability(scene, cm.mask));
      r.exact_sum += exact;
      r.exact_min = std::min(r.exact_min, exact);
    }
  });

  GuaranteeReport rep;
  rep.k = k;
  rep.p = p;
  rep.trials = trials;
  rep.required_support = required_support(k, p);
  rep.threshold = p - slack;
  double exact_sum = 0.0, area_sum = 0.0;
  for (const Trial& r : per) {
    rep.masks += r.masks;
    rep.contained += r.contained;
    rep.structural_violations += r.violations;
    exact_sum += r.exact_sum;
    rep.min_exact_containment = std::min(rep.min_exact_containment, r.exact_min);
    area_sum += static_cast<double>(r.area);
  }
  rep.mean_total_area = area_sum / static_cast<double>(trials);
  if (rep.masks > 0) {
    rep.containment_fraction =
        static_cast<double>(rep.contained) / static_cast<double>(rep.masks);
    rep.mean_exact_containment = exact_sum / static_cast<double>(rep.masks);
  }
  rep.passed = rep.structural_violations == 0 &&
               (rep.masks == 0 || rep.containment_fraction >= rep.threshold);
  log.info("verify-guarantee: " + std::to_string(rep.contained) + "/" +
           std::to_string(rep.masks) + " masks contained");
  return rep;
}

Json guarantee_to_json(const GuaranteeReport& r) {
  Json j;
  j["k"] = r.k;
  j["p"] = r.p;
  j["trials"] = r.trials;
  j["required_support"] = r.required_support;
  j["masks"] = r.masks;
  j["contained"] = r.contained;
  j["containment_fraction"] =
      r.masks ? Json(r.containment_fraction) : Json(nullptr);
  j["threshold"] = r.threshold;
  j["mean_exact_containment"] =
      r.masks ? Json(r.mean_exact_containment) : Json(nullptr);
  j["min_exact_containment"] =
      r.masks ? Json(r.min_exact_containment) : Json(nullptr);
  j["structural_violations"] = r.structural_violations;
  j["mean_total_area"] = r.mean_total_area;
  j["passed"] = r.passed;
  return j;
}

}  // namespace segdist
