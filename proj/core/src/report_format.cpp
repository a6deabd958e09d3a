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

#include "sotif_kitti/report_format.hpp"

#include "sotif_kitti/atomic_file.hpp"
#include "sotif_kitti/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace sotif_kitti
{

namespace
{

constexpr std::array<ApReferenceRow, 6> kApReference{{
  {"Part-A2", {85.5935, 75.9445, 75.4239, 86.5662, 77.8658, 75.6141}},
  {"PV-RCNN", {89.7738, 88.0915, 87.3886, 89.7959, 82.2261, 79.5364}},
  {"PointPillars", {86.2029, 76.9022, 74.0742, 94.8259, 90.9872, 87.7803}},
  {"MVX-Net", {81.9914, 70.9114, 71.7628, 82.8947, 70.6838, 70.3484}},
  {"Dynamic Voxelization", {89.4193, 87.8190, 85.8189, 93.2262, 80.2123, 70.8684}},
  {"SECOND", {87.0021, 76.9475, 74.8431, 88.5588, 81.4183, 75.3544}},
}};

constexpr std::array<RecallReferenceRow, 3> kRecallReference{{
  {"Part-A2", {0.516, 0.515, 0.354, 0.346}},
  {"PointRCNN", {0.450, 0.460, 0.232, 0.288}},
  {"SECOND", {0.515, 0.5158, 0.369, 0.369}},
}};

constexpr int kCell = 10;
constexpr std::size_t kMinNameWidth = 20;
constexpr std::array<Bucket, 3> kLevels{Bucket::Easy, Bucket::Moderate, Bucket::Hard};

std::string bucket_key(Bucket b)
{
  std::string s = to_string(b);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Bucket bucket_from_key(const std::string & s)
{
  for (const Bucket b : {Bucket::Easy, Bucket::Moderate, Bucket::Hard, Bucket::All}) {
    if (bucket_key(b) == s) {
      return b;
    }
  }
  throw IoFailure("report: unknown bucket '" + s + "'");
}

const char * mode_label(IouMode m)
{
  return m == IouMode::ThreeD ? "3D" : "BEV";
}

std::string rstrip(std::string s)
{
  while (!s.empty() && s.back() == ' ') {
    s.pop_back();
  }
  return s;
}

std::string pad_right(std::string_view s, std::size_t width)
{
  return fmt::format("{:<{}}", s, width);
}

std::string cell(const std::optional<double> & v)
{
  return fmt::format("{:>{}}", v ? fmt::format("{:.4f}", *v) : std::string("-"), kCell);
}

std::string cells(std::initializer_list<std::string> texts)
{
  std::string out;
  for (const auto & t : texts) {
    if (!out.empty()) {
      out += ' ';
    }
    out += fmt::format("{:>{}}", t, kCell);
  }
  return out;
}

std::size_t name_width(std::string_view method, bool with_reference, bool ap)
{
  std::size_t w = std::max(kMinNameWidth, method.size());
  if (with_reference) {
    if (ap) {
      for (const auto & r : kApReference) {
        w = std::max(w, std::string(r.method).size() + 12);
      }
    } else {
      for (const auto & r : kRecallReference) {
        w = std::max(w, std::string(r.method).size() + 12);
      }
    }
  }
  return w;
}

std::string reference_label(const char * method)
{
  return std::string(method) + " (reference)";
}

ordered_json counts_json(const ConfusionCounts & c)
{
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

ConfusionCounts counts_from(const ordered_json & j)
{
  return {
    j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>(),
    j.at("tn").get<std::size_t>()};
}

ordered_json optional_json(const std::optional<double> & v)
{
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> optional_from(const ordered_json & j)
{
  if (j.is_null()) {
    return std::nullopt;
  }
  return j.get<double>();
}

std::string threshold_tag(double t)
{
  return fmt::format("{:03d}", static_cast<int>(std::lround(t * 100.0)));
}

}  // namespace

std::span<const ApReferenceRow> ap_reference_rows()
{
  return kApReference;
}

std::span<const RecallReferenceRow> recall_reference_rows()
{
  return kRecallReference;
}

std::string report_to_json(const EvalReport & report)
{
  ordered_json doc;
  doc["dataset_id"] = report.dataset_id;
  doc["predictions_id"] = report.predictions_id;
  ordered_json levels = ordered_json::array();
  for (const Bucket b : report.config.difficulties) {
    levels.push_back(bucket_key(b));
  }
  doc["config"] = {
    {"ap_thresholds", report.config.ap_thresholds},
    {"recall_thresholds", report.config.recall_thresholds},
    {"iou_mode", report.config.iou_mode == IouMode::ThreeD ? "3d" : "bev"},
    {"difficulties", levels},
    {"interpolation", to_string(report.config.interpolation)}};
  ordered_json ap = ordered_json::array();
  for (const auto & r : report.ap) {
    ordered_json curve = ordered_json::array();
    for (const auto & p : r.curve.points) {
      curve.push_back({{"score", p.score}, {"recall", p.recall}, {"precision", p.precision}});
    }
    ap.push_back(
      {{"bucket", bucket_key(r.bucket)},
       {"iou_threshold", r.threshold},
       {"num_ground_truth", r.num_ground_truth},
       {"ap11", optional_json(r.ap11)},
       {"ap40", optional_json(r.ap40)},
       {"counts", counts_json(r.counts)},
       {"pr_curve", curve}});
  }
  doc["ap"] = ap;
  ordered_json recall = ordered_json::array();
  for (const auto & r : report.recall) {
    recall.push_back(
      {{"bucket", bucket_key(r.bucket)},
       {"iou_threshold", r.threshold},
       {"num_ground_truth", r.num_ground_truth},
       {"recall", optional_json(r.recall)},
       {"counts", counts_json(r.counts)}});
  }
  doc["recall"] = recall;
  ordered_json frames = ordered_json::array();
  for (const auto & f : report.frames) {
    frames.push_back(
      {{"frame_id", f.frame_id},
       {"ground_truths", f.ground_truths},
       {"predictions", f.predictions},
       {"counts", counts_json(f.counts)}});
  }
  doc["frames"] = frames;
  return doc.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text)
{
  EvalReport report;
  try {
    const auto doc = ordered_json::parse(text);
    report.dataset_id = doc.at("dataset_id").get<std::string>();
    report.predictions_id = doc.at("predictions_id").get<std::string>();
    const auto & cfg = doc.at("config");
    report.config.ap_thresholds = cfg.at("ap_thresholds").get<std::vector<double>>();
    report.config.recall_thresholds = cfg.at("recall_thresholds").get<std::vector<double>>();
    report.config.iou_mode = iou_mode_from_string(cfg.at("iou_mode").get<std::string>());
    report.config.difficulties.clear();
    for (const auto & d : cfg.at("difficulties")) {
      report.config.difficulties.push_back(bucket_from_key(d.get<std::string>()));
    }
    report.config.interpolation =
      interpolation_from_string(cfg.at("interpolation").get<std::string>());
    for (const auto & j : doc.at("ap")) {
      ApResult r;
      r.bucket = bucket_from_key(j.at("bucket").get<std::string>());
      r.threshold = j.at("iou_threshold").get<double>();
      r.num_ground_truth = j.at("num_ground_truth").get<std::size_t>();
      r.ap11 = optional_from(j.at("ap11"));
      r.ap40 = optional_from(j.at("ap40"));
      r.counts = counts_from(j.at("counts"));
      r.curve.num_ground_truth = r.num_ground_truth;
      for (const auto & p : j.at("pr_curve")) {
        r.curve.points.push_back(
          {p.at("score").get<double>(), p.at("recall").get<double>(),
           p.at("precision").get<double>()});
      }
      report.ap.push_back(std::move(r));
    }
    for (const auto & j : doc.at("recall")) {
      RecallResult r;
      r.bucket = bucket_from_key(j.at("bucket").get<std::string>());
      r.threshold = j.at("iou_threshold").get<double>();
      r.num_ground_truth = j.at("num_ground_truth").get<std::size_t>();
      r.recall = optional_from(j.at("recall"));
      r.counts = counts_from(j.at("counts"));
      report.recall.push_back(r);
    }
    for (const auto & j : doc.at("frames")) {
      report.frames.push_back(
        {j.at("frame_id").get<std::string>(), j.at("ground_truths").get<std::size_t>(),
         j.at("predictions").get<std::size_t>(), counts_from(j.at("counts"))});
    }
  } catch (const nlohmann::json::exception & e) {
    throw IoFailure(std::string("malformed report: ") + e.what());
  } catch (const ConfigError & e) {
    throw IoFailure(std::string("malformed report: ") + e.what());
  }
  return report;
}

std::string format_ap_table(const EvalReport & report, std::string_view method, bool with_reference)
{
  const std::size_t w = name_width(method, with_reference, true);
  const std::size_t group = 3 * kCell + 2;
  std::string out;
  for (std::size_t k = 0; k < report.config.ap_thresholds.size(); ++k) {
    const double t = report.config.ap_thresholds[k];
    if (k > 0) {
      out += '\n';
    }
    out += fmt::format("Car AP (%), {} boxes, IoU={:.2f}\n", mode_label(report.config.iou_mode), t);
    out += rstrip(fmt::format(
             "{} | {} | {}", pad_right("Method", w), pad_right(fmt::format("AP11 (IoU={:.2f})", t), group),
             fmt::format("AP40 (IoU={:.2f})", t))) +
           '\n';
    const std::string levels = cells({"Easy", "Moderate", "Hard"});
    out += fmt::format("{} | {} | {}\n", std::string(w, ' '), levels, levels);
    const std::string rule =
      fmt::format("{}-+-{}-+-{}\n", std::string(w, '-'), std::string(group, '-'), std::string(group, '-'));
    out += rule;

    std::array<std::optional<double>, 6> v;
    for (std::size_t i = 0; i < kLevels.size(); ++i) {
      if (const ApResult * r = report.find_ap(kLevels[i], t)) {
        v[i] = r->ap11;
        v[i + 3] = r->ap40;
      }
    }
    out += fmt::format(
      "{} | {} {} {} | {} {} {}\n", pad_right(method, w), cell(v[0]), cell(v[1]), cell(v[2]),
      cell(v[3]), cell(v[4]), cell(v[5]));

    if (with_reference && std::abs(t - 0.70) < 1e-12) {
      out += rule;
      for (const auto & row : kApReference) {
        const auto & r = row.values;
        out += fmt::format(
          "{} | {} {} {} | {} {} {}\n", pad_right(reference_label(row.method), w), cell(r[0]),
          cell(r[1]), cell(r[2]), cell(r[3]), cell(r[4]), cell(r[5]));
      }
    }
  }
  return out;
}

std::string format_recall_table(
  const EvalReport & report, std::string_view method, bool with_reference)
{
  const std::size_t w = name_width(method, with_reference, false);
  const std::size_t group = 2 * kCell + 1;
  const auto & thresholds = report.config.recall_thresholds;
  std::string out =
    fmt::format("Car recall, all difficulties, {} boxes\n", mode_label(report.config.iou_mode));

  std::string head1 = pad_right("Method", w);
  std::string head2(w, ' ');
  std::string rule(w, '-');
  std::string row = pad_right(method, w);
  for (const double t : thresholds) {
    head1 += " | " + pad_right(fmt::format("Recall (IoU={:.2f})", t), group);
    head2 += " | " + cells({"RoI", "RCNN"});
    rule += "-+-" + std::string(group, '-');
    const RecallResult * r = report.find_recall(Bucket::All, t);
    const std::optional<double> v = r ? r->recall : std::nullopt;
    row += " | " + cell(v) + ' ' + cell(v);
  }
  out += rstrip(head1) + '\n' + head2 + '\n' + rule + '\n' + row + '\n';

  const bool reference_layout = thresholds.size() == 2 && std::abs(thresholds[0] - 0.30) < 1e-12 &&
                                std::abs(thresholds[1] - 0.50) < 1e-12;
  if (with_reference && reference_layout) {
    out += rule + '\n';
    for (const auto & ref : kRecallReference) {
      const auto & r = ref.values;
      out += fmt::format(
        "{} | {} {} | {} {}\n", pad_right(reference_label(ref.method), w), cell(r[0]), cell(r[1]),
        cell(r[2]), cell(r[3]));
    }
  }
  out += "RoI and RCNN both report the recall of the final detections.\n";
  return out;
}

std::string pr_curves_csv(const EvalReport & report)
{
  std::string out = "bucket,iou_threshold,score,recall,precision\n";
  for (const auto & r : report.ap) {
    for (const auto & p : r.curve.points) {
      out += fmt::format(
        "{},{:.2f},{:.4f},{:.6f},{:.6f}\n", bucket_key(r.bucket), r.threshold, p.score, p.recall,
        p.precision);
    }
  }
  return out;
}

std::string pr_curve_svg(const EvalReport & report, double threshold)
{
  constexpr double kWidth = 480.0;
  constexpr double kHeight = 360.0;
  constexpr double kMargin = 50.0;
  constexpr double kPlotW = kWidth - 2 * kMargin;
  constexpr double kPlotH = kHeight - 2 * kMargin;
  constexpr std::array<const char *, 4> kColors{"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};
  const auto px = [&](double recall) { return kMargin + recall * kPlotW; };
  const auto py = [&](double precision) { return kHeight - kMargin - precision * kPlotH; };

  std::string svg = fmt::format(
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
    "viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
    kWidth, kHeight);
  svg += fmt::format(
    "<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg += fmt::format(
    "<text x=\"{:.1f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" "
    "text-anchor=\"middle\">Car PR curve, {} IoU={:.2f}</text>\n",
    kWidth / 2, mode_label(report.config.iou_mode), threshold);
  svg += fmt::format(
    "<path d=\"M{:.2f} {:.2f} L{:.2f} {:.2f} L{:.2f} {:.2f}\" stroke=\"black\" fill=\"none\"/>\n",
    px(0), py(1), px(0), py(0), px(1), py(0));
  for (int i = 0; i <= 10; i += 2) {
    const double v = i / 10.0;
    svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
      "text-anchor=\"middle\">{:.1f}</text>\n",
      px(v), py(0) + 14, v);
    svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
      "text-anchor=\"end\">{:.1f}</text>\n",
      px(0) - 4, py(v) + 3, v);
  }
  svg += fmt::format(
    "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" "
    "text-anchor=\"middle\">recall</text>\n",
    px(0.5), kHeight - 12);
  svg += fmt::format(
    "<text x=\"14\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" "
    "text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2f})\">precision</text>\n",
    py(0.5), py(0.5));

  std::size_t legend = 0;
  for (const auto & r : report.ap) {
    if (std::abs(r.threshold - threshold) > 1e-12 || r.curve.points.empty()) {
      continue;
    }
    const char * color = kColors[static_cast<std::size_t>(r.bucket) % kColors.size()];
    std::string points;
    for (const auto & p : r.curve.points) {
      points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", px(p.recall), py(p.precision));
    }
    svg += fmt::format(
      "<polyline points=\"{}\" stroke=\"{}\" stroke-width=\"2\" fill=\"none\"/>\n", points, color);
    svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
      "fill=\"{}\">{}</text>\n",
      px(0.75), py(0.95) + 14.0 * static_cast<double>(legend), color, to_string(r.bucket));
    ++legend;
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<fs::path> write_plots(const EvalReport & report, const fs::path & out_dir)
{
  std::vector<fs::path> written;
  written.push_back(out_dir / "pr_curves.csv");
  write_file_atomic(written.back(), pr_curves_csv(report));
  for (const double t : report.config.ap_thresholds) {
    written.push_back(out_dir / ("pr_iou" + threshold_tag(t) + ".svg"));
    write_file_atomic(written.back(), pr_curve_svg(report, t));
  }
  return written;
}

std::vector<fs::path> write_report_bundle(
  const EvalReport & report, const fs::path & out_dir, std::string_view method, bool with_reference)
{
  std::vector<fs::path> written;
  written.push_back(out_dir / "report.json");
  write_file_atomic(written.back(), report_to_json(report));
  written.push_back(out_dir / "ap_table.txt");
  write_file_atomic(written.back(), format_ap_table(report, method, with_reference));
  written.push_back(out_dir / "recall_table.txt");
  write_file_atomic(written.back(), format_recall_table(report, method, with_reference));
  for (auto & p : write_plots(report, out_dir)) {
    written.push_back(std::move(p));
  }
  return written;
}

}  // namespace sotif_kitti
