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

#include "segdist/segdist.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "segdist/commands.hpp"
#include "segdist/error.hpp"
#include "segdist/mask.hpp"
#include "segdist/rng.hpp"

struct segdist_mask {
  segdist::BinaryMask mask;
};

namespace {

thread_local std::string g_last_error;

segdist_status fail(segdist_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

// Maps the library's exception hierarchy onto status codes.
template <class F>
segdist_status guarded(F&& body) {
  try {
    body();
    return SEGDIST_OK;
  } catch (const segdist::DimensionError& e) {
    return fail(SEGDIST_ERR_DIMENSION, e.what());
  } catch (const segdist::MalformedMaskError& e) {
    return fail(SEGDIST_ERR_MALFORMED_MASK, e.what());
  } catch (const segdist::UndefinedRatioError& e) {
    return fail(SEGDIST_ERR_UNDEFINED_RATIO, e.what());
  } catch (const segdist::InvalidArgumentError& e) {
    return fail(SEGDIST_ERR_INVALID_ARGUMENT, e.what());
  } catch (const segdist::ValidationError& e) {
    return fail(SEGDIST_ERR_VALIDATION, e.what());
  } catch (const segdist::IoError& e) {
    return fail(SEGDIST_ERR_IO, e.what());
  } catch (const segdist::SchemaError& e) {
    return fail(SEGDIST_ERR_SCHEMA, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SEGDIST_ERR_SCHEMA, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SEGDIST_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SEGDIST_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SEGDIST_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SEGDIST_ERR_INTERNAL, "unknown error");
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw segdist::InvalidArgumentError(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit_json(const segdist::Json& j, char** json_out) {
  if (json_out) *json_out = dup_string(j.dump(1) + "\n");
}

segdist_mask* wrap(segdist::BinaryMask m) {
  return new segdist_mask{std::move(m)};
}

segdist::Log make_log(int verbosity) { return segdist::Log{verbosity, nullptr}; }

segdist::SceneSpec load_spec(const char* path, const std::uint64_t* seed,
                             std::uint64_t* effective_seed) {
  require(path != nullptr, "spec path is null");
  segdist::SceneSpec spec = segdist::load_scene_spec(path);
  *effective_seed = seed ? *seed : spec.seed;
  return spec;
}

}  // namespace

extern "C" {

const char* segdist_version(void) { return "1.0.0"; }

const char* segdist_last_error(void) { return g_last_error.c_str(); }

const char* segdist_status_string(segdist_status status) {
  switch (status) {
    case SEGDIST_OK: return "ok";
    case SEGDIST_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SEGDIST_ERR_DIMENSION: return "dimension mismatch";
    case SEGDIST_ERR_MALFORMED_MASK: return "malformed mask";
    case SEGDIST_ERR_UNDEFINED_RATIO: return "undefined ratio";
    case SEGDIST_ERR_VALIDATION: return "validation failed";
    case SEGDIST_ERR_IO: return "i/o error";
    case SEGDIST_ERR_SCHEMA: return "schema error";
    case SEGDIST_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int segdist_exit_code(segdist_status status) {
  switch (status) {
    case SEGDIST_OK: return 0;
    case SEGDIST_ERR_DIMENSION:
    case SEGDIST_ERR_MALFORMED_MASK:
    case SEGDIST_ERR_UNDEFINED_RATIO:
    case SEGDIST_ERR_VALIDATION: return 1;
    default: return 2;
  }
}

void segdist_string_free(char* s) { std::free(s); }

segdist_status segdist_mask_from_counts(uint32_t height, uint32_t width,
                                        const uint32_t* counts, size_t n,
                                        segdist_mask** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(counts != nullptr || n == 0, "counts is null");
    *out = wrap(segdist::BinaryMask::from_counts(
        height, width, std::span<const std::uint32_t>(counts, n)));
  });
}

segdist_status segdist_mask_from_raster(uint32_t height, uint32_t width,
                                        const uint8_t* pixels, segdist_mask** out) {
  return guarded([&] {
    require(out != nullptr && pixels != nullptr, "null argument");
    segdist::Raster grid(height, width);
    for (std::uint32_t r = 0; r < height; ++r) {
      for (std::uint32_t c = 0; c < width; ++c) {
        if (pixels[static_cast<std::size_t>(r) * width + c]) grid.set(r, c);
      }
    }
    *out = wrap(segdist::BinaryMask::encode(grid));
  });
}

segdist_status segdist_mask_from_compressed(uint32_t height, uint32_t width,
                                            const char* counts, segdist_mask** out) {
  return guarded([&] {
    require(out != nullptr && counts != nullptr, "null argument");
    *out = wrap(segdist::BinaryMask::from_compressed(height, width, counts));
  });
}

void segdist_mask_free(segdist_mask* mask) { delete mask; }

segdist_status segdist_mask_dims(const segdist_mask* mask, uint32_t* height,
                                 uint32_t* width) {
  return guarded([&] {
    require(mask && height && width, "null argument");
    *height = mask->mask.height();
    *width = mask->mask.width();
  });
}

segdist_status segdist_mask_area(const segdist_mask* mask, uint64_t* area) {
  return guarded([&] {
    require(mask && area, "null argument");
    *area = mask->mask.area();
  });
}

segdist_status segdist_mask_counts(const segdist_mask* mask, uint32_t* buf,
                                   size_t capacity, size_t* n) {
  return guarded([&] {
    require(mask && n, "null argument");
    const auto counts = mask->mask.counts();
    *n = counts.size();
    if (buf) std::copy_n(counts.begin(), std::min(capacity, counts.size()), buf);
  });
}

segdist_status segdist_mask_to_raster(const segdist_mask* mask, uint8_t* buf,
                                      size_t capacity) {
  return guarded([&] {
    require(mask && buf, "null argument");
    const auto h = mask->mask.height(), w = mask->mask.width();
    require(capacity >= static_cast<std::size_t>(h) * w, "buffer too small");
    const segdist::Raster grid = mask->mask.decode();
    for (std::uint32_t r = 0; r < h; ++r) {
      for (std::uint32_t c = 0; c < w; ++c) {
        buf[static_cast<std::size_t>(r) * w + c] = grid.at(r, c) ? 1 : 0;
      }
    }
  });
}

segdist_status segdist_mask_to_compressed(const segdist_mask* mask, char** out) {
  return guarded([&] {
    require(mask && out, "null argument");
    *out = dup_string(mask->mask.to_compressed());
  });
}

segdist_status segdist_mask_intersect(const segdist_mask* a, const segdist_mask* b,
                                      segdist_mask** out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = wrap(segdist::intersect(a->mask, b->mask));
  });
}

segdist_status segdist_mask_union(const segdist_mask* a, const segdist_mask* b,
                                  segdist_mask** out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = wrap(segdist::union_of(a->mask, b->mask));
  });
}

segdist_status segdist_mask_subtract(const segdist_mask* a, const segdist_mask* b,
                                     segdist_mask** out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = wrap(segdist::subtract(a->mask, b->mask));
  });
}

segdist_status segdist_mask_contains(const segdist_mask* outer, const segdist_mask* inner,
                                     int* result) {
  return guarded([&] {
    require(outer && inner && result, "null argument");
    *result = segdist::contains(outer->mask, inner->mask) ? 1 : 0;
  });
}

segdist_status segdist_mask_ratio(const segdist_mask* pred, const segdist_mask* gt,
                                  segdist_overlap kind, double* result) {
  return guarded([&] {
    require(pred && gt && result, "null argument");
    switch (kind) {
      case SEGDIST_IOU: *result = segdist::iou(pred->mask, gt->mask); break;
      case SEGDIST_IOP: *result = segdist::iop(pred->mask, gt->mask); break;
      case SEGDIST_IOG: *result = segdist::iog(pred->mask, gt->mask); break;
      default: throw segdist::InvalidArgumentError("unknown overlap kind");
    }
  });
}

segdist_status segdist_stream(uint64_t seed, uint64_t index, uint64_t* out, size_t n) {
  return guarded([&] {
    require(out != nullptr || n == 0, "out is null");
    segdist::SplitMix64 rng(segdist::stream_key(seed, index));
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.next();
  });
}

segdist_status segdist_probe_center(uint64_t seed, uint64_t index, uint32_t height,
                                    uint32_t width, uint32_t* row, uint32_t* col) {
  return guarded([&] {
    require(row && col, "null argument");
    require(height > 0 && width > 0, "empty grid");
    const segdist::PixelCoord c = segdist::probe_center(seed, index, height, width);
    *row = c.row;
    *col = c.col;
  });
}

segdist_status segdist_confmask(const char* samples, double p, double score_floor,
                                size_t max_outputs, const char* out, int verbosity) {
  return guarded([&] {
    require(samples && out, "null path");
    segdist::ConfidenceParams params;
    params.p = p;
    params.score_floor = score_floor;
    if (max_outputs > 0) params.max_outputs = max_outputs;
    segdist::run_confmask(samples, params, out, make_log(verbosity));
  });
}

segdist_status segdist_union_nms(const char* samples, double tau, int class_aware,
                                 const char* out, int verbosity) {
  return guarded([&] {
    require(samples && out, "null path");
    segdist::NmsParams params;
    params.tau = tau;
    params.class_aware = class_aware != 0;
    segdist::run_union_nms(samples, params, out, make_log(verbosity));
  });
}

segdist_status segdist_mode(const char* samples, const char* out, int verbosity) {
  return guarded([&] {
    require(samples && out, "null path");
    segdist::run_mode(samples, out, make_log(verbosity));
  });
}

segdist_status segdist_eval(const char* gt, const char* predictions, const char* metrics,
                            const double* p_grid, size_t p_grid_len,
                            const double* tau_grid, size_t tau_grid_len,
                            const char* report_prefix, int svg, int verbosity,
                            char** json_out) {
  return guarded([&] {
    require(gt && predictions, "null path");
    segdist::EvalOptions options;
    if (metrics) {
      options.compute_map = options.compute_ar = options.compute_ar_iog =
          options.compute_mrhp = false;
      std::stringstream list(metrics);
      for (std::string name; std::getline(list, name, ',');) {
        if (name == "map") options.compute_map = true;
        else if (name == "ar") options.compute_ar = true;
        else if (name == "ar-iog") options.compute_ar_iog = true;
        else if (name == "mrhp") options.compute_mrhp = true;
        else throw segdist::InvalidArgumentError("unknown metric '" + name + "'");
      }
    }
    auto grid = [](const double* v, std::size_t n, const char* what) {
      require(v != nullptr && n > 0, what);
      for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0.0 && v[i] <= 1.0)) {
          throw segdist::InvalidArgumentError(std::string(what) +
                                              " values must be in (0, 1]");
        }
      }
      return std::vector<double>(v, v + n);
    };
    if (p_grid) options.p_grid = grid(p_grid, p_grid_len, "precision grid");
    if (tau_grid) options.tau_grid = grid(tau_grid, tau_grid_len, "tau grid");
    std::optional<std::filesystem::path> prefix;
    if (report_prefix) prefix = report_prefix;
    const auto report = segdist::run_eval(gt, predictions, options, prefix, svg != 0,
                                          make_log(verbosity));
    emit_json(segdist::report_to_json(report), json_out);
  });
}

segdist_status segdist_picksim(const char* gt, const char* const* predictions,
                               size_t n_predictions, double radius, uint64_t probes,
                               uint64_t seed, const char* csv_out, const char* svg_out,
                               int verbosity, char** json_out) {
  return guarded([&] {
    require(gt && predictions && n_predictions > 0, "null path");
    segdist::PickSimConfig config;
    config.radius = radius;
    config.n_probes = probes;
    config.seed = seed;
    std::vector<segdist::PickSimSummary> runs;
    for (std::size_t i = 0; i < n_predictions; ++i) {
      require(predictions[i] != nullptr, "null path");
      runs.push_back(
          segdist::run_picksim(gt, predictions[i], config, make_log(verbosity)));
    }
    if (csv_out) segdist::write_text(csv_out, segdist::picksim_csv(runs));
    if (svg_out) segdist::write_text(svg_out, segdist::picksim_svg(runs));
    segdist::Json doc;
    if (runs.size() == 1) {
      doc = segdist::picksim_to_json(runs[0]);
    } else {
      doc = segdist::Json::array();
      for (const auto& r : runs) {
        segdist::Json j = segdist::picksim_to_json(r);
        j["predictions"] = r.predictions;
        doc.push_back(std::move(j));
      }
    }
    emit_json(doc, json_out);
  });
}

segdist_status segdist_synth(const char* spec, size_t k, const uint64_t* seed,
                             size_t scenes, const char* out_dir, int verbosity) {
  return guarded([&] {
    require(out_dir != nullptr, "null path");
    std::uint64_t s = 0;
    const segdist::SceneSpec parsed = load_spec(spec, seed, &s);
    segdist::run_synth(parsed, k, s, scenes, out_dir, make_log(verbosity));
  });
}

segdist_status segdist_calibrate(const char* gt, const char* predictions, double iou_cut,
                                 double iop_cut, const char* report_prefix, int svg,
                                 int verbosity, char** json_out) {
  return guarded([&] {
    require(gt && predictions, "null path");
    const auto report =
        segdist::run_calibrate(gt, predictions, iou_cut, iop_cut, make_log(verbosity));
    const segdist::Json doc = segdist::calibration_to_json(report);
    if (report_prefix) {
      std::string base = report_prefix;
      for (const char* ext : {".json", ".csv"}) {
        const std::size_t n = std::strlen(ext);
        if (base.size() > n && base.compare(base.size() - n, n, ext) == 0) {
          base.resize(base.size() - n);
        }
      }
      segdist::write_json(base + ".json", doc);
      segdist::write_text(base + ".csv", segdist::calibration_csv(report));
      if (svg) segdist::write_text(base + "_iop.svg", segdist::calibration_svg(report));
    }
    emit_json(doc, json_out);
  });
}

segdist_status segdist_verify_guarantee(const char* spec, size_t k, double p,
                                        size_t trials, const uint64_t* seed, double slack,
                                        double score_floor, int verbosity,
                                        char** json_out, int* passed) {
  return guarded([&] {
    std::uint64_t s = 0;
    const segdist::SceneSpec parsed = load_spec(spec, seed, &s);
    const auto report = segdist::verify_guarantee(parsed, k, p, trials, s, slack,
                                                  score_floor, make_log(verbosity));
    if (passed) *passed = report.passed ? 1 : 0;
    emit_json(segdist::guarantee_to_json(report), json_out);
  });
}

}  // extern "C"
