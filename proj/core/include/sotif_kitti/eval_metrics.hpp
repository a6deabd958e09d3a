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

#ifndef SOTIF_KITTI__EVAL_METRICS_HPP_
#define SOTIF_KITTI__EVAL_METRICS_HPP_

#include "sotif_kitti/kitti_io.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sotif_kitti
{

enum class Difficulty { Easy, Moderate, Hard, Ignored };

const char * to_string(Difficulty d);

/// KITTI cutoffs: minimum 2D height (px), maximum occlusion, maximum truncation.
struct DifficultyCutoffs
{
  double min_height;
  int max_occlusion;
  double max_truncation;
};

inline constexpr DifficultyCutoffs kEasyCutoffs{40.0, 0, 0.15};
inline constexpr DifficultyCutoffs kModerateCutoffs{25.0, 1, 0.30};
inline constexpr DifficultyCutoffs kHardCutoffs{25.0, 2, 0.50};

/// Easiest level whose cutoffs the record meets. Non-"Car" records are Ignored.
Difficulty assign_difficulty(const LabelRecord & rec);

/// Evaluation scopes. Levels are nested (an Easy object also counts for Moderate
/// and Hard); All holds every "Car" ground truth regardless of difficulty.
enum class Bucket { Easy, Moderate, Hard, All };

const char * to_string(Bucket b);

bool in_bucket(Difficulty d, Bucket b);

struct ConfusionCounts
{
  std::size_t tp{0};
  std::size_t fp{0};
  std::size_t fn{0};
  std::size_t tn{0};  // undefined for detection, always 0

  ConfusionCounts & operator+=(const ConfusionCounts & o);
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

enum class Outcome { TruePositive, FalsePositive, Ignored };

/// Greedy assignment of one frame. Indices refer to the caller's input order.
struct FrameMatch
{
  std::vector<int> pred_to_gt;  // -1 when unmatched
  std::vector<int> gt_to_pred;  // -1 when unmatched
  std::vector<double> pred_iou;  // IoU with the claimed ground truth, 0 if none

  /// Outcomes and counts for one scope: predictions matched to a ground truth
  /// outside the scope are Ignored, ground truths outside it never count as FN.
  std::vector<Outcome> outcomes(const std::vector<bool> & gt_in_scope) const;
  ConfusionCounts counts(const std::vector<bool> & gt_in_scope) const;
};

/// Processes predictions by descending score (ties: ascending `tie_keys`, then
/// index); each claims the unmatched ground truth of highest IoU (ties: lowest
/// index) provided IoU >= threshold. `iou` is predictions x ground truths.
FrameMatch match_scored(
  std::span<const double> scores, std::span<const std::string> tie_keys, const Eigen::MatrixXd & iou,
  double threshold);

using IouFn = std::function<double(const LabelRecord & pred, const LabelRecord & gt)>;

/// Throws MissingScore when a prediction has no score. Ties in score fall back
/// to the serialized record text.
FrameMatch match_frame(
  std::span<const LabelRecord> preds, std::span<const LabelRecord> gts, const IouFn & iou_fn,
  double threshold);

/// One scored, non-ignored prediction, for dataset-wide curve construction.
struct ScoredDetection
{
  double score{0.0};
  bool true_positive{false};
};

struct PrPoint
{
  double score{0.0};
  double recall{0.0};
  double precision{0.0};
};

/// Points ordered by descending score threshold: one point per distinct score.
struct PRCurve
{
  std::vector<PrPoint> points;
  std::size_t num_ground_truth{0};
};

/// Throws NoGroundTruth when num_ground_truth is 0.
PRCurve pr_curve(std::vector<ScoredDetection> detections, std::size_t num_ground_truth);

/// Maximum precision among points with recall >= r, 0 when there are none.
double interp_precision(const PRCurve & curve, double r);

/// Percentages: levels {0, 0.1, ..., 1} and {1/40, 2/40, ..., 1}.
double ap11(const PRCurve & curve);
double ap40(const PRCurve & curve);

/// tp / (tp + fn); throws NoGroundTruth on an empty scope.
double recall_at(const ConfusionCounts & counts);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__EVAL_METRICS_HPP_
