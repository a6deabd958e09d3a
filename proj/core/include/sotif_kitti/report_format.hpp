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

#ifndef SOTIF_KITTI__REPORT_FORMAT_HPP_
#define SOTIF_KITTI__REPORT_FORMAT_HPP_

#include "sotif_kitti/evaluation.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sotif_kitti
{

/// Published AP11 then AP40 values (Easy, Moderate, Hard) at IoU 0.70.
struct ApReferenceRow
{
  const char * method;
  std::array<double, 6> values;
};

/// Published recall: RoI and RCNN at IoU 0.30, then RoI and RCNN at IoU 0.50.
struct RecallReferenceRow
{
  const char * method;
  std::array<double, 4> values;
};

std::span<const ApReferenceRow> ap_reference_rows();
std::span<const RecallReferenceRow> recall_reference_rows();

std::string report_to_json(const EvalReport & report);

/// Throws IoFailure on malformed input.
EvalReport report_from_json(std::string_view text);

/// Method | AP11 (Easy, Moderate, Hard) | AP40 (Easy, Moderate, Hard), one block
/// per AP threshold, values in percent with 4 decimals.
std::string format_ap_table(
  const EvalReport & report, std::string_view method, bool with_reference = false);

/// Method | per recall threshold: RoI, RCNN. Both columns carry the recall of
/// the final detections over all difficulties.
std::string format_recall_table(
  const EvalReport & report, std::string_view method, bool with_reference = false);

/// bucket,iou_threshold,score,recall,precision
std::string pr_curves_csv(const EvalReport & report);

/// Precision over recall for every bucket at one AP threshold.
std::string pr_curve_svg(const EvalReport & report, double threshold);

/// report.json, ap_table.txt, recall_table.txt, pr_curves.csv and one
/// pr_iou<NNN>.svg per AP threshold. Returns the written paths.
std::vector<std::filesystem::path> write_report_bundle(
  const EvalReport & report, const std::filesystem::path & out_dir, std::string_view method,
  bool with_reference = false);

/// Plot files only (CSV and SVG).
std::vector<std::filesystem::path> write_plots(
  const EvalReport & report, const std::filesystem::path & out_dir);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__REPORT_FORMAT_HPP_
