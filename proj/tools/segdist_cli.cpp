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

// segdist: command-line front end over the C API.
//
// Exit status: 0 success, 1 validation failure (including a failed
// verify-guarantee check), 2 I/O, schema or usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "segdist/segdist.h"

namespace {

int report(segdist_status st) {
  if (st != SEGDIST_OK) {
    std::cerr << "segdist: " << segdist_status_string(st) << ": "
              << segdist_last_error() << '\n';
  }
  return segdist_exit_code(st);
}

// Prints a returned JSON string (and optionally saves it), then frees it.
int finish(segdist_status st, char* json, const std::string& out_path) {
  if (st == SEGDIST_OK && json) {
    std::fputs(json, stdout);
    if (!out_path.empty()) {
      std::ofstream f(out_path, std::ios::binary);
      f << json;
      if (!f) {
        segdist_string_free(json);
        std::cerr << "segdist: i/o error: cannot write " << out_path << '\n';
        return 2;
      }
    }
  }
  segdist_string_free(json);
  return report(st);
}

const uint64_t* opt_ptr(const std::optional<uint64_t>& v) {
  return v ? &*v : nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional instance-segmentation post-processing and evaluation",
               "segdist"};
  app.require_subcommand(1);
  int verbosity = 1;
  app.add_option("--verbosity", verbosity, "0 silent, 1 warnings, 2 progress")
      ->check(CLI::Range(0, 2));
  app.set_version_flag("--version", std::string(segdist_version()));

  int code = 0;

  // confmask
  auto* confmask = app.add_subcommand("confmask", "emit p-confidence masks per image");
  std::string cm_samples, cm_out;
  double cm_p = 0.9, cm_floor = 0.1;
  std::size_t cm_max = 0;
  confmask->add_option("--samples", cm_samples, "sample-set JSON")->required();
  confmask->add_option("--p", cm_p, "confidence requirement in (0, 1]")->required();
  confmask->add_option("--score-floor", cm_floor, "stop below this score")
      ->capture_default_str();
  confmask->add_option("--max-outputs", cm_max, "cap per image (0: none)");
  confmask->add_option("--out", cm_out, "output predictions JSON")->required();
  confmask->callback([&] {
    code = report(segdist_confmask(cm_samples.c_str(), cm_p, cm_floor, cm_max,
                                   cm_out.c_str(), verbosity));
  });

  // union-nms
  auto* unms = app.add_subcommand("union-nms", "emit Union-NMS predictions");
  std::string un_samples, un_out;
  double un_tau = 0.5;
  bool un_agnostic = false;
  unms->add_option("--samples", un_samples, "sample-set JSON")->required();
  unms->add_option("--tau", un_tau, "IoU suppression threshold in (0, 1)")->required();
  unms->add_flag("--class-agnostic", un_agnostic, "suppress across categories");
  unms->add_option("--out", un_out, "output predictions JSON")->required();
  unms->callback([&] {
    code = report(segdist_union_nms(un_samples.c_str(), un_tau, un_agnostic ? 0 : 1,
                                    un_out.c_str(), verbosity));
  });

  // mode
  auto* mode = app.add_subcommand("mode", "emit the point-estimate hypothesis");
  std::string mo_samples, mo_out;
  mode->add_option("--samples", mo_samples, "sample-set JSON")->required();
  mode->add_option("--out", mo_out, "output predictions JSON")->required();
  mode->callback([&] {
    code = report(segdist_mode(mo_samples.c_str(), mo_out.c_str(), verbosity));
  });

  // eval
  auto* eval = app.add_subcommand("eval", "mAP, AR, AR-IoG and MR@HP");
  std::string ev_gt, ev_pred, ev_report;
  std::vector<std::string> ev_metrics;
  std::vector<double> ev_pgrid, ev_taugrid;
  bool ev_svg = false;
  eval->add_option("--gt", ev_gt, "ground-truth JSON")->required();
  eval->add_option("--pred", ev_pred, "predictions JSON")->required();
  eval->add_option("--metric", ev_metrics, "map, ar, ar-iog or mrhp (repeatable)")
      ->check(CLI::IsMember({"map", "ar", "ar-iog", "mrhp"}))
      ->delimiter(',');
  eval->add_option("--p-grid", ev_pgrid, "precision bars for MR@HP")->delimiter(',');
  eval->add_option("--tau-grid", ev_taugrid, "IoP thresholds for MR@HP")->delimiter(',');
  eval->add_option("--report", ev_report, "report prefix (.json and .csv)");
  eval->add_flag("--svg", ev_svg, "also write PR curves as SVG");
  eval->callback([&] {
    std::string metrics;
    for (const auto& m : ev_metrics) metrics += (metrics.empty() ? "" : ",") + m;
    char* json = nullptr;
    const auto st = segdist_eval(
        ev_gt.c_str(), ev_pred.c_str(), ev_metrics.empty() ? nullptr : metrics.c_str(),
        ev_pgrid.empty() ? nullptr : ev_pgrid.data(), ev_pgrid.size(),
        ev_taugrid.empty() ? nullptr : ev_taugrid.data(), ev_taugrid.size(),
        ev_report.empty() ? nullptr : ev_report.c_str(), ev_svg ? 1 : 0, verbosity,
        &json);
    code = finish(st, json, "");
  });

  // picksim
  auto* picksim = app.add_subcommand("picksim", "Monte-Carlo double-pick estimate");
  std::string ps_gt, ps_out, ps_csv, ps_svg;
  std::vector<std::string> ps_pred;
  double ps_radius = 8.0;
  std::uint64_t ps_probes = 100000, ps_seed = 0;
  picksim->add_option("--gt", ps_gt, "ground-truth JSON")->required();
  picksim->add_option("--pred", ps_pred, "predictions JSON (repeatable)")->required();
  picksim->add_option("--radius", ps_radius, "gripper radius in pixels")
      ->capture_default_str();
  picksim->add_option("--probes", ps_probes, "probes per image")->capture_default_str();
  picksim->add_option("--seed", ps_seed, "probe stream seed")->capture_default_str();
  picksim->add_option("--out", ps_out, "also write the JSON result here");
  picksim->add_option("--csv", ps_csv, "CSV rows, one per prediction file");
  picksim->add_option("--svg", ps_svg, "double-pick vs pickable-area plot");
  picksim->callback([&] {
    std::vector<const char*> preds;
    for (const auto& p : ps_pred) preds.push_back(p.c_str());
    char* json = nullptr;
    const auto st = segdist_picksim(
        ps_gt.c_str(), preds.data(), preds.size(), ps_radius, ps_probes, ps_seed,
        ps_csv.empty() ? nullptr : ps_csv.c_str(),
        ps_svg.empty() ? nullptr : ps_svg.c_str(), verbosity, &json);
    code = finish(st, json, ps_out);
  });

  // synth
  auto* synth = app.add_subcommand("synth", "generate oracle scenes and samples");
  std::string sy_spec, sy_out;
  std::size_t sy_k = 0, sy_scenes = 100;
  std::optional<std::uint64_t> sy_seed;
  synth->add_option("--spec", sy_spec, "scene spec JSON")->required();
  synth->add_option("--k", sy_k, "samples per scene")->required();
  synth->add_option("--seed", sy_seed, "seed (default: the spec's)");
  synth->add_option("--scenes", sy_scenes, "number of scenes")->capture_default_str();
  synth->add_option("--out-dir", sy_out, "output directory")->required();
  synth->callback([&] {
    code = report(segdist_synth(sy_spec.c_str(), sy_k, opt_ptr(sy_seed), sy_scenes,
                                sy_out.c_str(), verbosity));
  });

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "ROC-AUC and IoP exceedance");
  std::string ca_gt, ca_pred, ca_report;
  double ca_iou = 0.5, ca_iop = 0.95;
  bool ca_svg = false;
  calibrate->add_option("--gt", ca_gt, "ground-truth JSON")->required();
  calibrate->add_option("--pred", ca_pred, "predictions JSON")->required();
  calibrate->add_option("--iou-cut", ca_iou, "positive when best IoU >= this")
      ->capture_default_str();
  calibrate->add_option("--iop-cut", ca_iop, "exceedance threshold")
      ->capture_default_str();
  calibrate->add_option("--report", ca_report, "report prefix (.json and .csv)");
  calibrate->add_flag("--svg", ca_svg, "also write IoP quantiles as SVG");
  calibrate->callback([&] {
    char* json = nullptr;
    const auto st = segdist_calibrate(ca_gt.c_str(), ca_pred.c_str(), ca_iou, ca_iop,
                                      ca_report.empty() ? nullptr : ca_report.c_str(),
                                      ca_svg ? 1 : 0, verbosity, &json);
    code = finish(st, json, "");
  });

  // verify-guarantee
  auto* verify =
      app.add_subcommand("verify-guarantee", "check the containment guarantee");
  std::string vg_spec, vg_out;
  std::size_t vg_k = 0, vg_trials = 0;
  double vg_p = 0.9, vg_slack = 0.05, vg_floor = 0.1;
  std::optional<std::uint64_t> vg_seed;
  verify->add_option("--spec", vg_spec, "scene spec JSON")->required();
  verify->add_option("--k", vg_k, "samples per scene")->required();
  verify->add_option("--p", vg_p, "confidence requirement")->required();
  verify->add_option("--trials", vg_trials, "number of scenes")->required();
  verify->add_option("--seed", vg_seed, "seed (default: the spec's)");
  verify->add_option("--slack", vg_slack, "allowed shortfall below p")
      ->capture_default_str();
  verify->add_option("--score-floor", vg_floor, "extraction score floor")
      ->capture_default_str();
  verify->add_option("--out", vg_out, "also write the JSON result here");
  verify->callback([&] {
    char* json = nullptr;
    int passed = 0;
    const auto st =
        segdist_verify_guarantee(vg_spec.c_str(), vg_k, vg_p, vg_trials, opt_ptr(vg_seed),
                                 vg_slack, vg_floor, verbosity, &json, &passed);
    code = finish(st, json, vg_out);
    if (code == 0 && !passed) {
      std::cerr << "segdist: containment guarantee check failed\n";
      code = 1;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }
  return code;
}
