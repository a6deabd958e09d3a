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

#include "sotif_kitti/eval_metrics.hpp"

#include "sotif_kitti/errors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sotif_kitti
{

namespace
{

bool meets(const LabelRecord & rec, const DifficultyCutoffs & c)
{
  return rec.bbox.height() >= c.min_height && rec.occlusion <= c.max_occlusion &&
         rec.truncation <= c.max_truncation;
}

}  // namespace

const char * to_string(Difficulty d)
{
  switch (d) {
    case Difficulty::Easy:
      return "Easy";
    case Difficulty::Moderate:
      return "Moderate";
    case Difficulty::Hard:
      return "Hard";
    case Difficulty::Ignored:
      break;
  }
  return "Ignored";
}

const char * to_string(Bucket b)
{
  switch (b) {
    case Bucket::Easy:
      return "Easy";
    case Bucket::Moderate:
      return "Moderate";
    case Bucket::Hard:
      return "Hard";
    case Bucket::All:
      break;
  }
  return "All";
}

Difficulty assign_difficulty(const LabelRecord & rec)
{
  if (rec.class_name != "Car") {
    return Difficulty::Ignored;
  }
  if (meets(rec, kEasyCutoffs)) {
    return Difficulty::Easy;
  }
  if (meets(rec, kModerateCutoffs)) {
    return Difficulty::Moderate;
  }
  if (meets(rec, kHardCutoffs)) {
    return Difficulty::Hard;
  }
  return Difficulty::Ignored;
}

bool in_bucket(Difficulty d, Bucket b)
{
  switch (b) {
    case Bucket::Easy:
      return d == Difficulty::Easy;
    case Bucket::Moderate:
      return d == Difficulty::Easy || d == Difficulty::Moderate;
    case Bucket::Hard:
      return d != Difficulty::Ignored;
    case Bucket::All:
      return true;
  }
  return false;
}

ConfusionCounts & ConfusionCounts::operator+=(const ConfusionCounts & o)
{
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

std::vector<Outcome> FrameMatch::outcomes(const std::vector<bool> & gt_in_scope) const
{
  std::vector<Outcome> out(pred_to_gt.size(), Outcome::FalsePositive);
  for (std::size_t i = 0; i < pred_to_gt.size(); ++i) {
    const int g = pred_to_gt[i];
    if (g >= 0) {
      out[i] = gt_in_scope.at(static_cast<std::size_t>(g)) ? Outcome::TruePositive : Outcome::Ignored;
    }
  }
  return out;
}

ConfusionCounts FrameMatch::counts(const std::vector<bool> & gt_in_scope) const
{
  ConfusionCounts c;
  for (const Outcome o : outcomes(gt_in_scope)) {
    if (o == Outcome::TruePositive) {
      ++c.tp;
    } else if (o == Outcome::FalsePositive) {
      ++c.fp;
    }
  }
  for (std::size_t g = 0; g < gt_to_pred.size(); ++g) {
    if (gt_in_scope.at(g) && gt_to_pred[g] < 0) {
      ++c.fn;
    }
  }
  return c;
}

FrameMatch match_scored(
  std::span<const double> scores, std::span<const std::string> tie_keys, const Eigen::MatrixXd & iou,
  double threshold)
{
  const auto n_pred = static_cast<Eigen::Index>(scores.size());
  if (iou.rows() != n_pred || tie_keys.size() != scores.size()) {
    throw std::invalid_argument("match_scored: input sizes disagree");
  }
  const Eigen::Index n_gt = iou.cols();
  FrameMatch m;
  m.pred_to_gt.assign(scores.size(), -1);
  m.gt_to_pred.assign(static_cast<std::size_t>(n_gt), -1);
  m.pred_iou.assign(scores.size(), 0.0);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return scores[a] > scores[b];
    }
    if (tie_keys[a] != tie_keys[b]) {
      return tie_keys[a] < tie_keys[b];
    }
    return a < b;
  });

  for (const std::size_t p : order) {
    int best = -1;
    double best_iou = threshold;
    for (Eigen::Index g = 0; g < n_gt; ++g) {
      if (m.gt_to_pred[static_cast<std::size_t>(g)] >= 0) {
        continue;
      }
      const double v = iou(static_cast<Eigen::Index>(p), g);
      if (v >= best_iou && (best < 0 || v > best_iou)) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      m.pred_to_gt[p] = best;
      m.gt_to_pred[static_cast<std::size_t>(best)] = static_cast<int>(p);
      m.pred_iou[p] = best_iou;
    }
  }
  return m;
}

FrameMatch match_frame(
  std::span<const LabelRecord> preds, std::span<const LabelRecord> gts, const IouFn & iou_fn,
  double threshold)
{
  std::vector<double> scores;
  std::vector<std::string> keys;
  scores.reserve(preds.size());
  keys.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!preds[i].score) {
      throw MissingScore("prediction " + std::to_string(i) + " has no score");
    }
    scores.push_back(*preds[i].score);
    keys.push_back(serialize_label(preds[i]));
  }
  Eigen::MatrixXd iou(static_cast<Eigen::Index>(preds.size()), static_cast<Eigen::Index>(gts.size()));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      iou(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g)) = iou_fn(preds[p], gts[g]);
    }
  }
  return match_scored(scores, keys, iou, threshold);
}

PRCurve pr_curve(std::vector<ScoredDetection> detections, std::size_t num_ground_truth)
{
  if (num_ground_truth == 0) {
    throw NoGroundTruth();
  }
  std::sort(detections.begin(), detections.end(), [](const auto & a, const auto & b) {
    return a.score > b.score;
  });
  PRCurve curve;
  curve.num_ground_truth = num_ground_truth;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    (detections[i].true_positive ? tp : fp) += 1;
    const bool last_of_score =
      i + 1 == detections.size() || detections[i + 1].score != detections[i].score;
    if (last_of_score) {
      curve.points.push_back(
        {detections[i].score, static_cast<double>(tp) / static_cast<double>(num_ground_truth),
         static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
  }
  return curve;
}

double interp_precision(const PRCurve & curve, double r)
{
  double best = 0.0;
  for (const auto & p : curve.points) {
    if (p.recall >= r) {
      best = std::max(best, p.precision);
    }
  }
  return best;
}

double ap11(const PRCurve & curve)
{
  double sum = 0.0;
  for (int i = 0; i <= 10; ++i) {
    sum += interp_precision(curve, i / 10.0);
  }
  return sum / 11.0 * 100.0;
}

double ap40(const PRCurve & curve)
{
  double sum = 0.0;
  for (int i = 1; i <= 40; ++i) {
    sum += interp_precision(curve, i / 40.0);
  }
  return sum / 40.0 * 100.0;
}

double recall_at(const ConfusionCounts & counts)
{
  const std::size_t denom = counts.tp + counts.fn;
  if (denom == 0) {
    throw NoGroundTruth();
  }
  return static_cast<double>(counts.tp) / static_cast<double>(denom);
}

}  // namespace sotif_kitti
