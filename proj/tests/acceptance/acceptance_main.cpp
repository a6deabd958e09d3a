// Copyright 2026 The sotif_kitti Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "iou_oracle.hpp"
#include "random_records.hpp"
#include "test_support.hpp"

#include <sotif_kitti/dataset_index.hpp>
#include <sotif_kitti/errors.hpp>
#include <sotif_kitti/eval_metrics.hpp>
#include <sotif_kitti/evaluation.hpp>
#include <sotif_kitti/hashing.hpp>
#include <sotif_kitti/lidar_sim.hpp>
#include <sotif_kitti/report_format.hpp>
#include <sotif_kitti/scenario.hpp>
#include <sotif_kitti/weather.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sk = sotif_kitti;
namespace fs = std::filesystem;
using sk::test::quote;

namespace
{

struct Outcome
{
  bool pass{false};
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string cli()
{
#ifdef SOTIF_KITTI_CLI
  return quote(sk::test::cli_path());
#else
  throw std::runtime_error("command line tool was not built");
#endif
}

int run_cli(const std::string & args, const fs::path & log)
{
  return sk::test::run_command(cli() + " " + args + " >" + quote(log) + " 2>&1");
}

class Acceptance
{
public:
  Acceptance() : configs_(sk::test::source_dir() / "configs") {}

  Outcome dataset_shape()
  {
    const auto t0 = Clock::now();
    const int status = run_cli(
      "generate --config " + quote(configs_ / "default.toml") + " --out " + quote(tmp_ / "default_a"),
      tmp_ / "generate_a.log");
    const double elapsed = seconds_since(t0);
    if (status != 0) {
      return {false, fmt::format("generate exited {}", status)};
    }
    generated_ = true;
    sk::DatasetIndex index;
    const auto violations = sk::find_violations(tmp_ / "default_a", index);
    const auto test_ids = index.ids_in(sk::Split::Test).size();
    const auto val_ids = index.ids_in(sk::Split::Val).size();
    const bool ok = violations.empty() && index.frame_ids.size() == 547 && test_ids == 492 &&
                    val_ids == 55 && elapsed <= 600.0;
    return {ok, fmt::format(
                  "{} frames ({} test / {} val), {} violations, {:.1f} s single-threaded (limit 600 s)",
                  index.frame_ids.size(), test_ids, val_ids, violations.size(), elapsed)};
  }

  Outcome determinism()
  {
    if (!generated_) {
      return {false, "first dataset missing"};
    }
    const int status = run_cli(
      "generate --jobs 4 --config " + quote(configs_ / "default.toml") + " --out " +
        quote(tmp_ / "default_b"),
      tmp_ / "generate_b.log");
    if (status != 0) {
      return {false, fmt::format("second generate exited {}", status)};
    }
    const std::string a = sk::tree_hash(tmp_ / "default_a");
    const std::string b = sk::tree_hash(tmp_ / "default_b");
    return {a == b, fmt::format("tree hashes {} and {} (second run with 4 jobs)", a.substr(0, 16), b.substr(0, 16))};
  }

  Outcome identity_oracle()
  {
    std::vector<fs::path> roots{sk::test::fixture_dir() / "dataset"};
    if (generated_) {
      roots.push_back(tmp_ / "default_a");
    }
    std::size_t buckets = 0;
    for (const auto & root : roots) {
      const sk::FrameLabels gt = sk::load_ground_truth(sk::validate_dataset(root));
      sk::FrameLabels self;
      for (const auto & [id, recs] : gt) {
        for (auto r : recs) {
          r.score = 1.0;
          self[id].push_back(r);
        }
      }
      const sk::EvalReport report = sk::evaluate(gt, self, sk::EvalConfig{});
      for (const auto & r : report.ap) {
        if (r.num_ground_truth == 0) {
          continue;
        }
        ++buckets;
        if (!(r.ap11 && *r.ap11 == 100.0 && r.ap40 && *r.ap40 == 100.0)) {
          return {false, fmt::format("{} {} AP is not 100", root.filename().string(), sk::to_string(r.bucket))};
        }
      }
      for (const auto & r : report.recall) {
        if (r.num_ground_truth > 0 && !(r.recall && *r.recall == 1.0)) {
          return {false, fmt::format("{} recall {} at {:.2f} is not 1", root.filename().string(),
                                     sk::to_string(r.bucket), r.threshold)};
        }
      }
    }
    return {true, fmt::format("{} non-empty buckets over {} datasets: AP11 = AP40 = 100, recall 1.0 at 0.30/0.50",
                              buckets, roots.size())};
  }

  static Outcome hand_computed_ap()
  {
    // One true positive over two ground truths: precision 1.0 up to recall 0.5.
    const sk::PRCurve curve = sk::pr_curve({{0.9, true}}, 2);
    const double a11 = sk::ap11(curve);
    const double a40 = sk::ap40(curve);

    // The same situation through the full evaluation path.
    sk::LabelRecord g;
    g.bbox = {100, 100, 200, 160};
    g.dims = {1.5, 1.8, 4.5};
    g.location = {0, 1.6, 20};
    sk::LabelRecord g2 = g;
    g2.location = {5, 1.6, 40};
    sk::LabelRecord p = g;
    p.score = 0.9;
    const sk::EvalReport r = sk::evaluate({{"000000", {g, g2}}}, {{"000000", {p}}}, sk::EvalConfig{});
    const auto * easy = r.find_ap(sk::Bucket::Easy, 0.7);
    const bool ok = std::abs(a11 - 54.5455) <= 1e-4 && std::abs(a40 - 50.0) <= 1e-4 && easy &&
                    std::abs(*easy->ap11 - 54.5455) <= 1e-4 && std::abs(*easy->ap40 - 50.0) <= 1e-4;
    return {ok, fmt::format("AP11 = {:.4f}, AP40 = {:.4f} (evaluate: {:.4f}, {:.4f})", a11, a40,
                            easy ? *easy->ap11 : -1.0, easy ? *easy->ap40 : -1.0)};
  }

  static Outcome monte_carlo_iou()
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240117);
    double worst = 0.0;
    std::size_t overlapping = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto [a, b] = sk::test::random_overlapping_pair(rng);
      const double exact = sk::iou_3d(a, b);
      overlapping += exact > 0.0;
      worst = std::max(worst, std::abs(exact - sk::test::monte_carlo_iou(a, b, 100000, rng)));
    }
    const double elapsed = seconds_since(t0);
    return {worst <= 0.02 && elapsed <= 60.0,
            fmt::format("1000 pairs ({} overlapping), max |iou_3d - MC| = {:.4f} (limit 0.02), {:.1f} s",
                        overlapping, worst, elapsed)};
  }

  static Outcome closed_form_iou()
  {
    sk::Box3D unit;
    unit.frame = sk::Frame::KittiLidar;
    unit.dims = {1, 1, 1};
    sk::Box3D shifted = unit;
    shifted.center.x() = 0.5;
    sk::Box3D car = unit;
    car.dims = {4.5, 1.9, 1.4};
    car.center = {3, -2, 0.1};
    car.yaw = 0.7;
    sk::Box3D flipped = car;
    flipped.yaw += M_PI;
    const double same = sk::iou_3d(car, car);
    const double third = sk::iou_3d(unit, shifted);
    const double flip = sk::iou_3d(car, flipped);
    const bool ok = same == 1.0 && std::abs(third - 1.0 / 3.0) <= 1e-9 && std::abs(flip - 1.0) <= 1e-9;
    return {ok, fmt::format("identical {:.17g}, half-shift {:.12f}, yaw+pi {:.12f}", same, third, flip)};
  }

  Outcome round_trips()
  {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> cloud_size(0, 256);
    std::size_t mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
      const bool with_score = i % 2 == 1;
      const sk::LabelRecord rec = sk::test::random_label(rng, with_score);
      const std::string line = sk::serialize_label(rec);
      const sk::LabelRecord back = sk::parse_label_line(line, with_score);
      mismatches += !(back == rec) || sk::serialize_label(back) != line;

      const sk::PointCloud cloud = sk::test::random_cloud(rng, cloud_size(rng));
      if (i % 100 == 0) {
        const fs::path p = tmp_ / "roundtrip.bin";
        sk::write_velodyne(cloud, p);
        mismatches += !(sk::read_velodyne(p) == cloud);
      } else {
        mismatches += !(sk::decode_velodyne(sk::encode_velodyne(cloud)) == cloud);
      }

      const sk::CalibrationSet calib = sk::test::random_calibration(rng);
      const std::string text = sk::serialize_calib(calib);
      const sk::CalibrationSet calib_back = sk::parse_calib(text);
      mismatches += !sk::test::calib_close(calib_back, calib) || sk::serialize_calib(calib_back) != text;
    }
    return {mismatches == 0,
            fmt::format("10000 label, point cloud and calibration round trips, {} mismatches", mismatches)};
  }

  static Outcome weather_monotonicity()
  {
    const sk::ScenarioConfig scenario;
    const auto timeline = sk::build_timeline(scenario);
    const sk::LidarConfig lidar;
    const auto & table = sk::builtin_weather_presets();
    constexpr std::uint64_t kSeed = 1234;
    std::size_t checks = 0;
    for (const std::size_t step : {std::size_t{0}, std::size_t{500}, std::size_t{2000}}) {
      for (const sk::TimeOfDay t : sk::kTimesOfDay) {
        std::optional<std::pair<std::size_t, double>> prev;
        std::string prev_name;
        for (const sk::Condition c : sk::kSeverityOrder) {
          const auto & preset = sk::find_preset(table, sk::preset_name(c, t));
          const sk::PointCloud cloud = sk::simulate_lidar(timeline[step], lidar, preset, kSeed);
          double sum = 0.0;
          for (const auto & p : cloud.points) {
            sum += p.intensity;
          }
          const double mean = cloud.empty() ? 0.0 : sum / static_cast<double>(cloud.size());
          if (prev && (cloud.size() > prev->first || mean > prev->second)) {
            return {false, fmt::format("step {}: {} ({} pts, {:.6f}) after {} ({} pts, {:.6f})", step,
                                       preset.name, cloud.size(), mean, prev_name, prev->first, prev->second)};
          }
          prev = {cloud.size(), mean};
          prev_name = preset.name;
          ++checks;
        }
      }
    }
    return {true, fmt::format("{} scans: point count and mean intensity non-increasing Clear -> HardRain in every column",
                              checks)};
  }

  Outcome end_to_end()
  {
    const auto t0 = Clock::now();
    const fs::path ds = tmp_ / "e2e";
    if (const int s = run_cli(
          "generate --config " + quote(configs_ / "e2e_clearnoon.toml") + " --out " + quote(ds),
          tmp_ / "e2e_generate.log"))
    {
      return {false, fmt::format("generate exited {}", s)};
    }
    if (const int s = run_cli(
          "detect --dataset " + quote(ds) + " --out " + quote(tmp_ / "e2e_pred"), tmp_ / "e2e_detect.log"))
    {
      return {false, fmt::format("detect exited {}", s)};
    }
    if (const int s = run_cli(
          "evaluate --dataset " + quote(ds) + " --predictions " + quote(tmp_ / "e2e_pred") + " --out " +
            quote(tmp_ / "e2e_report"),
          tmp_ / "e2e_evaluate.log"))
    {
      return {false, fmt::format("evaluate exited {}", s)};
    }
    const double elapsed = seconds_since(t0);
    const sk::EvalReport report =
      sk::report_from_json(sk::read_file_text(tmp_ / "e2e_report" / "report.json"));
    const sk::RecallResult * easy = report.find_recall(sk::Bucket::Easy, 0.30);
    if (!easy || !easy->recall) {
      return {false, "no Easy ground truth in the end-to-end dataset"};
    }
    return {*easy->recall >= 0.9 && elapsed <= 180.0,
            fmt::format("Easy recall@0.30 = {:.4f} ({} / {} objects, limit >= 0.9), {:.1f} s (limit 180 s)",
                        *easy->recall, easy->counts.tp, easy->num_ground_truth, elapsed)};
  }

  Outcome report_fidelity()
  {
    const fs::path out = tmp_ / "fixture_report";
    const int status = run_cli(
      "evaluate --dataset " + quote(sk::test::fixture_dir() / "dataset") + " --predictions " +
        quote(sk::test::fixture_dir() / "predictions") + " --method fixture --reference --out " + quote(out),
      tmp_ / "fixture_evaluate.log");
    if (status != 0) {
      return {false, fmt::format("evaluate exited {}", status)};
    }
    const auto golden = sk::test::golden_dir();
    const bool ap = sk::read_file_text(out / "ap_table.txt") == sk::read_file_text(golden / "ap_table.txt");
    const bool recall =
      sk::read_file_text(out / "recall_table.txt") == sk::read_file_text(golden / "recall_table.txt");
    return {ap && recall, fmt::format("AP table {}, recall table {} against golden files",
                                      ap ? "identical" : "differs", recall ? "identical" : "differs")};
  }

private:
  sk::test::TempDir tmp_;
  fs::path configs_;
  bool generated_{false};
};

}  // namespace

int main()
{
  Acceptance acceptance;
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
    {"dataset shape", [&] { return acceptance.dataset_shape(); }},
    {"determinism", [&] { return acceptance.determinism(); }},
    {"metric identity oracle", [&] { return acceptance.identity_oracle(); }},
    {"hand-computed AP fixture", [] { return Acceptance::hand_computed_ap(); }},
    {"IoU Monte-Carlo oracle", [] { return Acceptance::monte_carlo_iou(); }},
    {"closed-form IoU cases", [] { return Acceptance::closed_form_iou(); }},
    {"round-trip suite", [&] { return acceptance.round_trips(); }},
    {"weather monotonicity", [] { return Acceptance::weather_monotonicity(); }},
    {"end-to-end loop", [&] { return acceptance.end_to_end(); }},
    {"report-format fidelity", [&] { return acceptance.report_fidelity(); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("{} [{:>2}] {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
