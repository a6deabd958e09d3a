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

#ifndef SOTIF_KITTI__EVALUATION_HPP_
#define SOTIF_KITTI__EVALUATION_HPP_

#include "sotif_kitti/box_geometry.hpp"
#include "sotif_kitti/dataset_index.hpp"
#include "sotif_kitti/eval_metrics.hpp"
#include "sotif_kitti/kitti_io.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sotif_kitti
{

enum class Interpolation { Ap11, Ap40, Both };

const char * to_string(Interpolation i);
Interpolation interpolation_from_string(const std::string & s);
IouMode iou_mode_from_string(const std::string & s);

struct EvalConfig
{
  std::vector<double> ap_thresholds{0.70};
  std::vector<double> recall_thresholds{0.30, 0.50};
  IouMode iou_mode{IouMode::ThreeD};
  std::vector<Bucket> difficulties{Bucket::Easy, Bucket::Moderate, Bucket::Hard};
  Interpolation interpolation{Interpolation::Both};

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const EvalConfig &, const EvalConfig &) = default;
};

/// Frame id -> records, ordered by id.
using FrameLabels = std::map<std::string, std::vector<LabelRecord>>;

struct ApResult
{
  Bucket bucket{Bucket::Easy};
  double threshold{0.0};
  std::size_t num_ground_truth{0};
  std::optional<double> ap11;  // empty when the bucket has no ground truth
  std::optional<double> ap40;
  ConfusionCounts counts;  // with every prediction kept
  PRCurve curve;
};

struct RecallResult
{
  Bucket bucket{Bucket::All};
  double threshold{0.0};
  std::size_t num_ground_truth{0};
  std::optional<double> recall;
  ConfusionCounts counts;
};

struct FrameDiagnostics
{
  std::string frame_id;
  std::size_t ground_truths{0};
  std::size_t predictions{0};
  ConfusionCounts counts;  // All bucket at the first AP threshold
};

struct EvalReport
{
  std::string dataset_id;
  std::string predictions_id;
  EvalConfig config;
  std::vector<ApResult> ap;
  std::vector<RecallResult> recall;
  std::vector<FrameDiagnostics> frames;

  const ApResult * find_ap(Bucket bucket, double threshold) const;
  const RecallResult * find_recall(Bucket bucket, double threshold) const;
};

FrameLabels load_ground_truth(const DatasetIndex & index);

/// Reads every NNNNNN.txt under `dir` as 16-field predictions. Throws
/// PredictionForUnknownFrame for ids outside `index` and MissingScore for
/// 15-field lines.
FrameLabels load_predictions(const std::filesystem::path & dir, const DatasetIndex & index);

/// SHA-256 over the frame ids and the serialized records, independent of paths.
std::string labels_digest(const FrameLabels & labels);

/// IoU of two label records through their KittiCamera boxes.
double label_iou(const LabelRecord & a, const LabelRecord & b, IouMode mode);

/// Frames missing from `predictions` contribute only false negatives. Only "Car"
/// records take part; other classes (DontCare included) are dropped on both sides.
/// Throws PredictionForUnknownFrame and MissingScore.
EvalReport evaluate(
  const FrameLabels & ground_truth, const FrameLabels & predictions, const EvalConfig & config);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__EVALUATION_HPP_
