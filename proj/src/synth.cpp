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

#include "segdist/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "segdist/error.hpp"
#include "segdist/rng.hpp"

namespace segdist {
namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(const std::string& s) {
  if (s.empty()) throw InvalidArgumentError("empty number");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw InvalidArgumentError("malformed number '" + s + "'");
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') {
      throw InvalidArgumentError("malformed number '" + s + "'");
    }
  }
  // cpp_int reads a leading 0 as an octal prefix.
  const std::size_t first = std::min(s.find_first_not_of('0', i), s.size() - 1);
  cpp_int v(s.substr(first));
  return s[0] == '-' ? cpp_int(-v) : v;
}

cpp_int pow10(long n) {
  cpp_int v = 1;
  for (long i = 0; i < n; ++i) v *= 10;
  return v;
}

struct Shape {
  bool ellipse = false;
  std::int64_t top = 0;
  std::int64_t left = 0;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
};

// Grows (offset > 0) or shrinks the shape by `offset` pixels on every side.
BinaryMask render(const Shape& s, std::int32_t offset, std::uint32_t height,
                  std::uint32_t width) {
  if (!s.ellipse) {
    return BinaryMask::rectangle(height, width, s.top - offset, s.left - offset,
                                 s.rows + 2 * offset, s.cols + 2 * offset);
  }
  // Ellipse inscribed in the (offset) bounding box, sampled at pixel centres.
  const double cy = static_cast<double>(s.top) + static_cast<double>(s.rows) / 2.0;
  const double cx = static_cast<double>(s.left) + static_cast<double>(s.cols) / 2.0;
  const double ry = static_cast<double>(s.rows) / 2.0 + offset;
  const double rx = static_cast<double>(s.cols) / 2.0 + offset;
  std::vector<Run> runs;
  const std::int64_t c0 = std::max<std::int64_t>(0, s.left - offset);
  const std::int64_t c1 =
      std::min<std::int64_t>(width, s.left + s.cols + offset);
  for (std::int64_t c = c0; c < c1; ++c) {
    const double dx = (static_cast<double>(c) + 0.5 - cx) / rx;
    if (dx * dx > 1.0) continue;
    const double half = ry * std::sqrt(1.0 - dx * dx);
    auto r0 = static_cast<std::int64_t>(std::ceil(cy - half - 0.5));
    auto r1 = static_cast<std::int64_t>(std::floor(cy + half - 0.5));
    r0 = std::max<std::int64_t>(r0, 0);
    r1 = std::min<std::int64_t>(r1, static_cast<std::int64_t>(height) - 1);
    if (r0 > r1) continue;
    const auto base = static_cast<std::uint64_t>(c) * height;
    runs.push_back({base + static_cast<std::uint64_t>(r0),
                    base + static_cast<std::uint64_t>(r1) + 1});
  }
  return BinaryMask::from_runs(height, width, std::move(runs));
}

struct Unit {
  bool pair = false;
  Shape first;
  Shape second;  // pairs only; abuts `first` on its right edge
  CategoryId category = 1;
  bool uncertain = false;
};

// One independent ambiguity factor: its alternatives and their weights.
struct Factor {
  std::size_t unit;
  std::vector<Rational> weights;
  std::vector<std::int32_t> values;  // 0 split / 1 merged, or an offset
};

struct Layout {
  std::vector<Unit> units;
  std::vector<Factor> factors;
};

std::int32_t max_abs_offset(const SceneSpec& spec) {
  std::int32_t m = 0;
  for (const auto& o : spec.boundary_offsets) m = std::max(m, std::abs(o.offset));
  return m;
}

std::vector<Factor> make_factors(const SceneSpec& spec, std::uint32_t pairs,
                                 std::uint32_t uncertain) {
  std::vector<Factor> factors;
  const Rational& pm = spec.merge_probability;
  for (std::uint32_t i = 0; i < pairs; ++i) {
    Factor f{i, {}, {}};
    if (pm < 1) {
      f.weights.push_back(1 - pm);
      f.values.push_back(0);
    }
    if (pm > 0) {
      f.weights.push_back(pm);
      f.values.push_back(1);
    }
    factors.push_back(std::move(f));
  }
  for (std::uint32_t i = 0; i < uncertain; ++i) {
    Factor f{pairs + i, {}, {}};
    for (const auto& o : spec.boundary_offsets) {
      if (o.weight > 0) {
        f.weights.push_back(o.weight);
        f.values.push_back(o.offset);
      }
    }
    factors.push_back(std::move(f));
  }
  return factors;
}

std::uint32_t pair_count(const SceneSpec& spec, std::uint32_t objects) {
  return std::min(spec.merge_pairs, objects / 2);
}

std::uint32_t uncertain_count(const SceneSpec& spec, std::uint32_t objects) {
  return std::min(spec.uncertain_boundaries,
                  objects - 2 * pair_count(spec, objects));
}

Layout make_layout(const SceneSpec& spec, std::uint32_t objects,
                   SplitMix64& rng) {
  const std::uint32_t pairs = pair_count(spec, objects);
  const std::uint32_t singles = objects - 2 * pairs;
  const std::uint32_t slots = objects;

  auto cols = static_cast<std::uint32_t>(
      std::ceil(std::sqrt(static_cast<double>(slots))));
  if (pairs > 0 && cols % 2 == 1) ++cols;
  const std::uint32_t rows = (slots + cols - 1) / cols;
  const std::int64_t slot_h = spec.height / rows;
  const std::int64_t slot_w = spec.width / cols;

  const std::int64_t margin = max_abs_offset(spec) + 1;
  std::int64_t shrink = 0;
  for (const auto& o : spec.boundary_offsets) {
    shrink = std::max<std::int64_t>(shrink, -o.offset);
  }
  const std::int64_t min_extent = 2 * shrink + 3;
  const std::int64_t avail_h = slot_h - 2 * margin;
  const std::int64_t avail_w = slot_w - 2 * margin;
  if (avail_h < min_extent || avail_w < min_extent) {
    throw InvalidArgumentError(
        "grid " + std::to_string(spec.height) + "x" +
        std::to_string(spec.width) + " is too small for " +
        std::to_string(objects) + " objects; enlarge it or lower max_objects");
  }

  auto category = [&]() -> CategoryId {
    return spec.categories <= 1 ? 1 : rng.uniform_int(1, spec.categories);
  };

  Layout layout;
  std::uint32_t slot = 0;
  for (std::uint32_t i = 0; i < pairs; ++i, slot += 2) {
    const std::int64_t r = slot / cols;
    const std::int64_t c = slot % cols;
    const std::int64_t h = rng.uniform_int(min_extent, avail_h);
    const std::int64_t top = r * slot_h + margin + rng.uniform_int(0, avail_h - h);
    const std::int64_t seam = (c + 1) * slot_w;
    const std::int64_t wa = rng.uniform_int(min_extent, slot_w - margin);
    const std::int64_t wb = rng.uniform_int(min_extent, slot_w - margin);
    Unit u;
    u.pair = true;
    u.first = {false, top, seam - wa, h, wa};
    u.second = {false, top, seam, h, wb};
    u.category = category();
    layout.units.push_back(u);
  }
  const std::uint32_t uncertain = uncertain_count(spec, objects);
  for (std::uint32_t i = 0; i < singles; ++i, ++slot) {
    const std::int64_t r = slot / cols;
    const std::int64_t c = slot % cols;
    const std::int64_t h = rng.uniform_int(min_extent, avail_h);
    const std::int64_t w = rng.uniform_int(min_extent, avail_w);
    Unit u;
    u.first.ellipse = rng.uniform(2) == 1;
    u.first.top = r * slot_h + margin + rng.uniform_int(0, avail_h - h);
    u.first.left = c * slot_w + margin + rng.uniform_int(0, avail_w - w);
    u.first.rows = h;
    u.first.cols = w;
    u.category = category();
    u.uncertain = i < uncertain;
    layout.units.push_back(u);
  }
  layout.factors = make_factors(spec, pairs, uncertain);
  return layout;
}

// Next point of the mixed-radix lattice, last factor fastest. False once all
// points have been visited.
bool advance(std::vector<std::uint32_t>& choice,
             const std::vector<Factor>& factors) {
  for (std::size_t f = choice.size(); f-- > 0;) {
    if (++choice[f] < factors[f].weights.size()) return true;
    choice[f] = 0;
  }
  return false;
}

std::size_t draw_component(const std::vector<double>& cumulative,
                           SplitMix64& rng) {
  const double u = rng.unit();
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    if (u < cumulative[i]) return i;
  }
  return cumulative.size() - 1;
}

std::vector<double> cumulative_weights(const Scene& scene) {
  std::vector<double> out;
  Rational acc = 0;
  for (const auto& c : scene.components) {
    acc += c.weight;
    out.push_back(to_double(acc));
  }
  return out;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (auto slash = text.find('/'); slash != std::string::npos) {
    const cpp_int num = parse_integer(text.substr(0, slash));
    const cpp_int den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw InvalidArgumentError("zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  std::string mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mantissa = text.substr(0, e);
    const std::string exp_text = text.substr(e + 1);
    char* end = nullptr;
    exponent = std::strtol(exp_text.c_str(), &end, 10);
    if (exp_text.empty() || *end != '\0' || std::labs(exponent) > 400) {
      throw InvalidArgumentError("malformed number '" + text + "'");
    }
  }
  std::string digits = mantissa;
  if (auto dot = mantissa.find('.'); dot != std::string::npos) {
    digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
    exponent -= static_cast<long>(mantissa.size() - dot - 1);
    if (digits == "" || digits == "-" || digits == "+") {
      throw InvalidArgumentError("malformed number '" + text + "'");
    }
  }
  const cpp_int n = parse_integer(digits);
  if (exponent >= 0) return Rational(n * pow10(exponent));
  return Rational(n, pow10(-exponent));
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw InvalidArgumentError("non-finite probability");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return parse_rational(std::string(buf, end));
}

std::string to_string(const Rational& r) {
  const cpp_int num = boost::multiprecision::numerator(r);
  const cpp_int den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

void validate_spec(const SceneSpec& spec) {
  if (spec.height == 0 || spec.width == 0) {
    throw InvalidArgumentError("scene grid must be non-empty");
  }
  if (spec.min_objects < 1 || spec.min_objects > spec.max_objects) {
    throw InvalidArgumentError("object count range must satisfy 1 <= min <= max");
  }
  if (spec.merge_probability < 0 || spec.merge_probability > 1) {
    throw InvalidArgumentError("merge_probability must lie in [0, 1]");
  }
  if (spec.boundary_offsets.empty()) {
    throw InvalidArgumentError("boundary_offsets needs at least one entry");
  }
  Rational total = 0;
  for (const auto& o : spec.boundary_offsets) {
    if (o.weight < 0 || o.weight > 1) {
      throw InvalidArgumentError("boundary offset weights must lie in [0, 1]");
    }
    total += o.weight;
  }
  if (total != 1) {
    throw InvalidArgumentError("boundary offset weights sum to " +
                               to_string(total) + ", not 1");
  }
  if (spec.categories < 1 || spec.categories > 2) {
    throw InvalidArgumentError("scenes support one or two categories");
  }
  if (spec.enumeration_cap < 1) {
    throw InvalidArgumentError("enumeration cap must be positive");
  }
}

std::size_t Scene::mode_component() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < components.size(); ++i) {
    if (components[i].weight > components[best].weight) best = i;
  }
  return best;
}

std::size_t component_count(const SceneSpec& spec, std::uint32_t objects) {
  const auto factors = make_factors(spec, pair_count(spec, objects),
                                    uncertain_count(spec, objects));
  std::size_t n = 1;
  for (const Factor& f : factors) {
    n *= f.weights.size();
    if (n > spec.enumeration_cap) return n;
  }
  return n;
}

Scene generate_scene(const SceneSpec& spec, std::uint64_t seed,
                     ImageId image_id) {
  validate_spec(spec);
  SplitMix64 rng(seed);
  const auto objects = static_cast<std::uint32_t>(
      rng.uniform_int(spec.min_objects, spec.max_objects));
  if (const std::size_t n = component_count(spec, objects);
      n > spec.enumeration_cap) {
    throw InvalidArgumentError(
        "scene would have more than " + std::to_string(spec.enumeration_cap) +
        " mixture components; reduce merge_pairs, uncertain_boundaries or the "
        "number of offsets");
  }
  const Layout layout = make_layout(spec, objects, rng);

  // Per-unit renderings of every alternative.
  const std::size_t n_units = layout.units.size();
  std::vector<std::int32_t> unit_factor(n_units, -1);
  for (std::size_t f = 0; f < layout.factors.size(); ++f) {
    unit_factor[layout.factors[f].unit] = static_cast<std::int32_t>(f);
  }

  Scene scene;
  scene.image_id = image_id;
  scene.height = spec.height;
  scene.width = spec.width;

  std::vector<std::uint32_t> choice(layout.factors.size(), 0);
  do {
    MixtureComponent comp;
    comp.weight = 1;
    comp.choices = choice;
    comp.truth.image_id = image_id;
    comp.truth.height = spec.height;
    comp.truth.width = spec.width;
    for (std::size_t f = 0; f < choice.size(); ++f) {
      comp.weight *= layout.factors[f].weights[choice[f]];
    }
    for (std::size_t u = 0; u < n_units; ++u) {
      const Unit& unit = layout.units[u];
      const std::int32_t f = unit_factor[u];
      if (unit.pair) {
        const bool merged = f < 0 ? spec.merge_probability == 1
                                  : layout.factors[f].values[choice[f]] == 1;
        BinaryMask a = render(unit.first, 0, spec.height, spec.width);
        BinaryMask b = render(unit.second, 0, spec.height, spec.width);
        if (merged) {
          comp.truth.instances.push_back({union_of(a, b), unit.category, 1.0});
        } else {
          comp.truth.instances.push_back({std::move(a), unit.category, 1.0});
          comp.truth.instances.push_back({std::move(b), unit.category, 1.0});
        }
      } else {
        const std::int32_t offset =
            f < 0 ? 0 : layout.factors[f].values[choice[f]];
        comp.truth.instances.push_back(
            {render(unit.first, offset, spec.height, spec.width), unit.category,
             1.0});
      }
    }
    scene.components.push_back(std::move(comp));
  } while (advance(choice, layout.factors));

  scene.realized = draw_component(cumulative_weights(scene), rng);
  return scene;
}

SampleSet sample_hypotheses(const Scene& scene, std::size_t k,
                            std::uint64_t seed) {
  if (k < 1) throw InvalidArgumentError("k must be at least 1");
  SplitMix64 rng(seed);
  const std::vector<double> cumulative = cumulative_weights(scene);
  SampleSet set;
  set.image_id = scene.image_id;
  set.height = scene.height;
  set.width = scene.width;
  set.samples.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t c = draw_component(cumulative, rng);
    set.samples.push_back({scene.components[c].truth.instances});
  }
  set.mode = Hypothesis{scene.components[scene.mode_component()].truth.instances};
  return set;
}

Rational containment_probability(const Scene& scene, const BinaryMask& mask) {
  if (mask.height() != scene.height || mask.width() != scene.width) {
    throw DimensionError("query mask does not match the scene grid");
  }
  Rational p = 0;
  for (const MixtureComponent& c : scene.components) {
    for (const Instance& inst : c.truth.instances) {
      if (contains(inst.mask, mask)) {
        p += c.weight;
        break;
      }
    }
  }
  return p;
}

}  // namespace segdist
