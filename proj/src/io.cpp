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

#include "segdist/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "segdist/error.hpp"

namespace segdist {
namespace {

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

template <typename T>
T get(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(where + ": field \"" + key + "\" has the wrong type");
  }
}

std::uint32_t get_dim(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0 ||
      v.get<std::int64_t>() > 0xFFFFFFFFLL) {
    throw SchemaError(where + ": \"" + key + "\" must be a positive integer");
  }
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

double get_score(const Json& obj, const std::string& where) {
  const Json& v = field(obj, "score", where);
  if (!v.is_number()) throw SchemaError(where + ": \"score\" must be a number");
  return v.get<double>();
}

// Proper crossings between non-adjacent edges.
bool self_intersects(const std::vector<double>& poly) {
  const std::size_t n = poly.size() / 2;
  if (n < 4) return false;
  auto pt = [&](std::size_t i) {
    return std::pair<double, double>{poly[2 * (i % n)], poly[2 * (i % n) + 1]};
  };
  auto orient = [](std::pair<double, double> a, std::pair<double, double> b,
                   std::pair<double, double> c) {
    const double v = (b.first - a.first) * (c.second - a.second) -
                     (b.second - a.second) * (c.first - a.first);
    return (v > 0) - (v < 0);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const auto a = pt(i), b = pt(i + 1), c = pt(j), d = pt(j + 1);
      if (orient(a, b, c) * orient(a, b, d) < 0 &&
          orient(c, d, a) * orient(c, d, b) < 0) {
        return true;
      }
    }
  }
  return false;
}

BinaryMask rasterize_one(std::uint32_t height, std::uint32_t width,
                         const std::vector<double>& poly) {
  const std::size_t n = poly.size() / 2;
  std::vector<Run> runs;
  if (n < 3) return BinaryMask::empty(height, width);
  double xmin = poly[0], xmax = poly[0];
  for (std::size_t i = 0; i < n; ++i) {
    xmin = std::min(xmin, poly[2 * i]);
    xmax = std::max(xmax, poly[2 * i]);
  }
  const auto c0 = static_cast<std::int64_t>(std::max(0.0, std::floor(xmin - 0.5)));
  const auto c1 = static_cast<std::int64_t>(
      std::min<double>(width - 1, std::ceil(xmax - 0.5)));
  std::vector<double> ys;
  for (std::int64_t c = c0; c <= c1; ++c) {
    const double x = static_cast<double>(c) + 0.5;
    ys.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double x1 = poly[2 * i], y1 = poly[2 * i + 1];
      const double x2 = poly[2 * ((i + 1) % n)], y2 = poly[2 * ((i + 1) % n) + 1];
      if ((x1 <= x && x < x2) || (x2 <= x && x < x1)) {
        ys.push_back(y1 + (x - x1) * (y2 - y1) / (x2 - x1));
      }
    }
    std::sort(ys.begin(), ys.end());
    const auto base = static_cast<std::uint64_t>(c) * height;
    for (std::size_t k = 0; k + 1 < ys.size(); k += 2) {
      // Rows whose centre r + 0.5 lies in [ys[k], ys[k + 1]).
      auto r0 = static_cast<std::int64_t>(std::ceil(ys[k] - 0.5));
      auto r1 = static_cast<std::int64_t>(std::ceil(ys[k + 1] - 0.5));
      r0 = std::clamp<std::int64_t>(r0, 0, height);
      r1 = std::clamp<std::int64_t>(r1, 0, height);
      if (r0 < r1) {
        runs.push_back({base + static_cast<std::uint64_t>(r0),
                        base + static_cast<std::uint64_t>(r1)});
      }
    }
  }
  return BinaryMask::from_runs(height, width, std::move(runs));
}

Instance parse_instance(const Json& obj, std::uint32_t height,
                        std::uint32_t width, const std::string& where) {
  Instance inst{mask_from_json(field(obj, "segmentation", where), height, width),
                get<CategoryId>(obj, "category_id", where),
                get_score(obj, where)};
  return inst;
}

Json instance_to_json(const Instance& inst) {
  Json j;
  j["category_id"] = inst.category;
  j["score"] = inst.score;
  j["segmentation"] = mask_to_json(inst.mask);
  return j;
}

Json hypothesis_to_json(const Hypothesis& h) {
  Json arr = Json::array();
  for (const Instance& i : h.instances) arr.push_back(instance_to_json(i));
  return arr;
}

std::array<std::uint64_t, 4> bounding_box(const BinaryMask& m) {
  if (m.is_empty()) return {0, 0, 0, 0};
  std::uint64_t rmin = m.height(), rmax = 0;
  const std::uint64_t h = m.height();
  for (const Run& r : m.runs()) {
    if (r.end - r.begin >= h) {
      rmin = 0;
      rmax = h - 1;
      break;
    }
    const std::uint64_t a = r.begin % h;
    const std::uint64_t b = (r.end - 1) % h;
    if (r.begin / h != (r.end - 1) / h) {
      rmin = 0;
      rmax = h - 1;
      break;
    }
    rmin = std::min(rmin, a);
    rmax = std::max(rmax, b);
  }
  const std::uint64_t cmin = m.runs().front().begin / h;
  const std::uint64_t cmax = (m.runs().back().end - 1) / h;
  return {cmin, rmin, cmax - cmin + 1, rmax - rmin + 1};
}

}  // namespace

const GroundTruthImage* GroundTruthDataset::find(ImageId id) const {
  for (const GroundTruthImage& im : images) {
    if (im.image_id == id) return &im;
  }
  return nullptr;
}

BinaryMask rasterize_polygons(std::uint32_t height, std::uint32_t width,
                              std::span<const std::vector<double>> polygons,
                              std::vector<std::string>* warnings) {
  BinaryMask out = BinaryMask::empty(height, width);
  for (const auto& poly : polygons) {
    if (poly.size() % 2 != 0) {
      throw SchemaError("polygon has an odd number of coordinates");
    }
    if (warnings && self_intersects(poly)) {
      warnings->push_back(
          "self-intersecting polygon rasterized with the even-odd rule");
    }
    out = union_of(out, rasterize_one(height, width, poly));
  }
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  write_text(path, doc.dump(1) + "\n");
}

Json mask_to_json(const BinaryMask& mask) {
  Json j;
  j["size"] = {mask.height(), mask.width()};
  j["counts"] = mask.counts();
  return j;
}

BinaryMask mask_from_json(const Json& seg, std::uint32_t height,
                          std::uint32_t width,
                          std::vector<std::string>* warnings) {
  if (seg.is_object()) {
    const Json& size = field(seg, "size", "segmentation");
    if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
        !size[1].is_number_integer()) {
      throw SchemaError("segmentation: \"size\" must be [height, width]");
    }
    const auto h = size[0].get<std::int64_t>();
    const auto w = size[1].get<std::int64_t>();
    if (h != height || w != width) {
      throw DimensionError("segmentation size " + std::to_string(h) + "x" +
                           std::to_string(w) + " does not match image " +
                           std::to_string(height) + "x" + std::to_string(width));
    }
    const Json& counts = field(seg, "counts", "segmentation");
    if (counts.is_string()) {
      return BinaryMask::from_compressed(height, width, counts.get<std::string>());
    }
    if (!counts.is_array()) {
      throw SchemaError("segmentation: \"counts\" must be a list or a string");
    }
    std::vector<std::uint32_t> c;
    c.reserve(counts.size());
    for (const Json& v : counts) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
          v.get<std::int64_t>() > 0xFFFFFFFFLL) {
        throw SchemaError("segmentation: counts must be non-negative integers");
      }
      c.push_back(static_cast<std::uint32_t>(v.get<std::int64_t>()));
    }
    return BinaryMask::from_counts(height, width, c);
  }
  if (seg.is_array()) {
    std::vector<std::vector<double>> polys;
    auto as_poly = [](const Json& arr) {
      std::vector<double> p;
      for (const Json& v : arr) {
        if (!v.is_number()) throw SchemaError("polygon coordinates must be numbers");
        p.push_back(v.get<double>());
      }
      return p;
    };
    if (!seg.empty() && seg[0].is_number()) {
      polys.push_back(as_poly(seg));
    } else {
      for (const Json& p : seg) {
        if (!p.is_array()) throw SchemaError("polygon must be a list of numbers");
        polys.push_back(as_poly(p));
      }
    }
    return rasterize_polygons(height, width, polys, warnings);
  }
  throw SchemaError("segmentation must be an RLE object or a polygon list");
}

GroundTruthDataset parse_ground_truth(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("ground truth must be a JSON object");
  GroundTruthDataset ds;
  std::map<ImageId, std::size_t> index;
  const Json& images = field(doc, "images", "ground truth");
  if (!images.is_array()) throw SchemaError("\"images\" must be a list");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    GroundTruthImage im;
    im.image_id = get<ImageId>(images[i], "id", where);
    im.height = get_dim(images[i], "height", where);
    im.width = get_dim(images[i], "width", where);
    if (!index.emplace(im.image_id, ds.images.size()).second) {
      throw SchemaError(where + ": duplicate image id " +
                        std::to_string(im.image_id));
    }
    ds.images.push_back(std::move(im));
    ds.annotation_ids.emplace_back();
  }
  if (auto it = doc.find("categories"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("\"categories\" must be a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "categories[" + std::to_string(i) + "]";
      const Json& c = (*it)[i];
      const auto id = get<CategoryId>(c, "id", where);
      ds.categories[id] = c.contains("name") && c["name"].is_string()
                              ? c["name"].get<std::string>()
                              : std::to_string(id);
    }
  }
  if (auto it = doc.find("annotations"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("\"annotations\" must be a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const Json& a = (*it)[i];
      std::string where = "annotations[" + std::to_string(i) + "]";
      const auto ann_id = a.contains("id") && a["id"].is_number_integer()
                              ? a["id"].get<std::int64_t>()
                              : static_cast<std::int64_t>(i);
      where += " (id " + std::to_string(ann_id) + ")";
      const auto image_id = get<ImageId>(a, "image_id", where);
      auto found = index.find(image_id);
      if (found == index.end()) {
        throw SchemaError(where + ": unknown image_id " + std::to_string(image_id));
      }
      GroundTruthImage& im = ds.images[found->second];
      const auto category = get<CategoryId>(a, "category_id", where);
      if (!ds.categories.empty() && !ds.categories.contains(category)) {
        throw SchemaError(where + ": category " + std::to_string(category) +
                          " is not in the category table");
      }
      std::vector<std::string> warnings;
      BinaryMask mask = [&] {
        try {
          return mask_from_json(field(a, "segmentation", where), im.height,
                                im.width, &warnings);
        } catch (const MalformedMaskError& e) {
          throw MalformedMaskError(where + ": " + e.what());
        } catch (const DimensionError& e) {
          throw DimensionError(where + ": " + e.what());
        } catch (const SchemaError& e) {
          throw SchemaError(where + ": " + e.what());
        }
      }();
      for (const std::string& w : warnings) ds.warnings.push_back(where + ": " + w);
      if (mask.is_empty()) {
        ds.warnings.push_back(where + ": empty mask skipped");
        continue;
      }
      im.instances.push_back({std::move(mask), category, 1.0});
      ds.annotation_ids[found->second].push_back(ann_id);
    }
  }
  return ds;
}

GroundTruthDataset load_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(read_json(path));
}

Json ground_truth_to_json(std::span<const GroundTruthImage> images,
                          const std::map<CategoryId, std::string>& categories) {
  Json doc;
  doc["images"] = Json::array();
  doc["annotations"] = Json::array();
  doc["categories"] = Json::array();
  std::int64_t next_id = 1;
  for (const GroundTruthImage& im : images) {
    doc["images"].push_back({{"id", im.image_id},
                             {"width", im.width},
                             {"height", im.height}});
    for (const Instance& inst : im.instances) {
      const auto box = bounding_box(inst.mask);
      Json a;
      a["id"] = next_id++;
      a["image_id"] = im.image_id;
      a["category_id"] = inst.category;
      a["segmentation"] = mask_to_json(inst.mask);
      a["area"] = inst.mask.area();
      a["bbox"] = box;
      a["iscrowd"] = 0;
      doc["annotations"].push_back(std::move(a));
    }
  }
  for (const auto& [id, name] : categories) {
    doc["categories"].push_back({{"id", id}, {"name", name}});
  }
  return doc;
}

std::vector<SampleSet> parse_samples(const Json& doc) {
  if (!doc.is_array()) throw SchemaError("sample file must be a JSON list");
  std::vector<SampleSet> out;
  std::vector<std::string> problems;
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const std::string where = "record " + std::to_string(r);
    const Json& rec = doc[r];
    SampleSet set;
    set.image_id = get<ImageId>(rec, "image_id", where);
    set.width = get_dim(rec, "width", where);
    set.height = get_dim(rec, "height", where);
    const Json& samples = field(rec, "samples", where);
    if (!samples.is_array()) throw SchemaError(where + ": \"samples\" must be a list");
    auto parse_hyp = [&](const Json& arr, const std::string& at) {
      if (!arr.is_array()) throw SchemaError(at + ": expected a list of instances");
      Hypothesis h;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string loc = at + " instance " + std::to_string(i);
        try {
          h.instances.push_back(parse_instance(arr[i], set.height, set.width, loc));
        } catch (const MalformedMaskError& e) {
          throw MalformedMaskError(loc + ": " + e.what());
        } catch (const DimensionError& e) {
          throw DimensionError(loc + ": " + e.what());
        }
      }
      return h;
    };
    for (std::size_t s = 0; s < samples.size(); ++s) {
      set.samples.push_back(
          parse_hyp(samples[s], where + " sample " + std::to_string(s)));
    }
    if (auto it = rec.find("mode"); it != rec.end() && !it->is_null()) {
      set.mode = parse_hyp(*it, where + " mode");
    }
    for (const Violation& v : validate(set)) {
      problems.push_back(where + ": " + v.location + ": " + v.message);
    }
    out.push_back(std::move(set));
  }
  if (!problems.empty()) {
    std::string msg;
    for (const std::string& p : problems) msg += (msg.empty() ? "" : "\n") + p;
    throw ValidationError(msg);
  }
  return out;
}

std::vector<SampleSet> load_samples(const std::filesystem::path& path) {
  return parse_samples(read_json(path));
}

Json samples_to_json(std::span<const SampleSet> sets) {
  Json arr = Json::array();
  for (const SampleSet& s : sets) {
    Json rec;
    rec["image_id"] = s.image_id;
    rec["width"] = s.width;
    rec["height"] = s.height;
    if (s.mode) rec["mode"] = hypothesis_to_json(*s.mode);
    rec["samples"] = Json::array();
    for (const Hypothesis& h : s.samples) rec["samples"].push_back(hypothesis_to_json(h));
    arr.push_back(std::move(rec));
  }
  return arr;
}

std::vector<Prediction> parse_predictions(const Json& doc) {
  if (!doc.is_array()) throw SchemaError("prediction file must be a JSON list");
  std::vector<Prediction> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "prediction " + std::to_string(i);
    const Json& obj = doc[i];
    const auto image_id = get<ImageId>(obj, "image_id", where);
    const Json& seg = field(obj, "segmentation", where);
    if (!seg.is_object()) {
      throw SchemaError(where + ": prediction segmentation must be RLE");
    }
    const Json& size = field(seg, "size", where);
    if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
        !size[1].is_number_integer() || size[0].get<std::int64_t>() <= 0 ||
        size[1].get<std::int64_t>() <= 0) {
      throw SchemaError(where + ": \"size\" must be [height, width]");
    }
    const auto h = static_cast<std::uint32_t>(size[0].get<std::int64_t>());
    const auto w = static_cast<std::uint32_t>(size[1].get<std::int64_t>());
    std::optional<double> conf;
    if (auto it = obj.find("p"); it != obj.end() && !it->is_null()) {
      if (!it->is_number()) throw SchemaError(where + ": \"p\" must be a number");
      conf = it->get<double>();
    }
    try {
      out.push_back({image_id, parse_instance(obj, h, w, where), conf});
    } catch (const MalformedMaskError& e) {
      throw MalformedMaskError(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_json(path));
}

Json predictions_to_json(std::span<const Prediction> predictions) {
  Json arr = Json::array();
  for (const Prediction& p : predictions) {
    Json j;
    j["image_id"] = p.image_id;
    j["category_id"] = p.instance.category;
    j["score"] = p.instance.score;
    j["segmentation"] = mask_to_json(p.instance.mask);
    if (p.p) j["p"] = *p.p;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json confidence_masks_to_json(ImageId image_id,
                              std::span<const ConfidenceMask> masks) {
  Json arr = Json::array();
  for (const ConfidenceMask& m : masks) {
    Json j;
    j["image_id"] = image_id;
    j["category_id"] = m.category;
    j["score"] = m.score;
    j["segmentation"] = mask_to_json(m.mask);
    j["p"] = m.p;
    Json support = Json::array();
    for (const InstanceRef& r : m.support) support.push_back({r.sample, r.instance});
    j["support"] = std::move(support);
    arr.push_back(std::move(j));
  }
  return arr;
}

SceneSpec parse_scene_spec(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("scene spec must be a JSON object");
  SceneSpec spec;
  auto u32 = [&](const char* key, std::uint32_t& out) {
    if (auto it = doc.find(key); it != doc.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw SchemaError(std::string("scene spec: \"") + key +
                          "\" must be a non-negative integer");
      }
      out = static_cast<std::uint32_t>(it->get<std::int64_t>());
    }
  };
  auto rational = [](const Json& v, const std::string& what) -> Rational {
    try {
      if (v.is_string()) return parse_rational(v.get<std::string>());
      if (v.is_number()) return rational_from_double(v.get<double>());
    } catch (const InvalidArgumentError& e) {
      throw SchemaError("scene spec: " + what + ": " + e.what());
    }
    throw SchemaError("scene spec: " + what + " must be a number or \"a/b\"");
  };
  u32("height", spec.height);
  u32("width", spec.width);
  u32("min_objects", spec.min_objects);
  u32("max_objects", spec.max_objects);
  if (doc.contains("objects")) {
    u32("objects", spec.min_objects);
    spec.max_objects = spec.min_objects;
  }
  u32("merge_pairs", spec.merge_pairs);
  u32("uncertain_boundaries", spec.uncertain_boundaries);
  u32("categories", spec.categories);
  if (auto it = doc.find("merge_probability"); it != doc.end()) {
    spec.merge_probability = rational(*it, "merge_probability");
  }
  if (auto it = doc.find("boundary_offsets"); it != doc.end()) {
    spec.boundary_offsets.clear();
    if (it->is_array()) {
      for (const Json& o : *it) {
        spec.boundary_offsets.push_back(
            {get<std::int32_t>(o, "offset", "boundary_offsets"),
             rational(field(o, "weight", "boundary_offsets"), "offset weight")});
      }
    } else if (it->is_object()) {
      for (const auto& [k, v] : it->items()) {
        try {
          spec.boundary_offsets.push_back({std::stoi(k), rational(v, "offset weight")});
        } catch (const std::logic_error&) {
          throw SchemaError("scene spec: offset key '" + k + "' is not an integer");
        }
      }
    } else {
      throw SchemaError("scene spec: boundary_offsets must be a list or an object");
    }
  }
  if (auto it = doc.find("enumeration_cap"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
      throw SchemaError("scene spec: enumeration_cap must be a positive integer");
    }
    spec.enumeration_cap = it->get<std::size_t>();
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_integer()) throw SchemaError("scene spec: seed must be an integer");
    spec.seed = it->get<std::uint64_t>();
  }
  try {
    validate_spec(spec);
  } catch (const InvalidArgumentError& e) {
    throw SchemaError(std::string("scene spec: ") + e.what());
  }
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  return parse_scene_spec(read_json(path));
}

Json scene_spec_to_json(const SceneSpec& spec) {
  Json j;
  j["height"] = spec.height;
  j["width"] = spec.width;
  j["min_objects"] = spec.min_objects;
  j["max_objects"] = spec.max_objects;
  j["merge_pairs"] = spec.merge_pairs;
  j["merge_probability"] = to_string(spec.merge_probability);
  j["boundary_offsets"] = Json::array();
  for (const auto& o : spec.boundary_offsets) {
    j["boundary_offsets"].push_back({{"offset", o.offset}, {"weight", to_string(o.weight)}});
  }
  j["uncertain_boundaries"] = spec.uncertain_boundaries;
  j["categories"] = spec.categories;
  j["enumeration_cap"] = spec.enumeration_cap;
  j["seed"] = spec.seed;
  return j;
}

Json mixtures_to_json(std::span<const Scene> scenes) {
  Json doc;
  doc["images"] = Json::array();
  for (const Scene& s : scenes) {
    Json im;
    im["image_id"] = s.image_id;
    im["width"] = s.width;
    im["height"] = s.height;
    im["realized"] = s.realized;
    im["components"] = Json::array();
    for (const MixtureComponent& c : s.components) {
      Json cj;
      cj["weight"] = to_string(c.weight);
      cj["weight_float"] = to_double(c.weight);
      cj["choices"] = c.choices;
      cj["instances"] = hypothesis_to_json(Hypothesis{c.truth.instances});
      im["components"].push_back(std::move(cj));
    }
    doc["images"].push_back(std::move(im));
  }
  return doc;
}

}  // namespace segdist
