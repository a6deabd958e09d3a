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

#include "sotif_kitti/evaluation.hpp"

#include "sotif_kitti/errors.hpp"
#include "sotif_kitti/hashing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace fs = std::filesystem;

namespace sotif_kitti
{

namespace
{

struct FrameData
{
  const std::string * id;
  std::vector<LabelRecord> preds;
  std::vector<LabelRecord> gts;
  std::vector<Difficulty> difficulty;
  std::vector<double> scores;
  std::vector<std::string> tie_keys;
  Eigen::MatrixXd iou;
  std::vector<FrameMatch> matches;  // one per threshold
};

std::vector<bool> scope_mask(const FrameData & f, Bucket b)
{
  std::vector<bool> mask(f.difficulty.size());
  for (std::size_t g = 0; g < mask.size(); ++g) {
    mask[g] = in_bucket(f.difficulty[g], b);
  }
  return mask;
}

std::size_t count_in_scope(const std::vector<bool> & mask)
{
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

}  // namespace

const char * to_string(Interpolation i)
{
  switch (i) {
    case Interpolation::Ap11:
      return "ap11";
    case Interpolation::Ap40:
      return "ap40";
    case Interpolation::Both:
      break;
  }
  return "both";
}

Interpolation interpolation_from_string(const std::string & s)
{
  if (s == "ap11") {
    return Interpolation::Ap11;
  }
  if (s == "ap40") {
    return Interpolation::Ap40;
  }
  if (s == "both") {
    return Interpolation::Both;
  }
  throw ConfigError("interpolation must be one of ap11, ap40, both (got '" + s + "')");
}

IouMode iou_mode_from_string(const std::string & s)
{
  if (s == "3d") {
    return IouMode::ThreeD;
  }
  if (s == "bev") {
    return IouMode::Bev;
  }
  throw ConfigError("iou mode must be 3d or bev (got '" + s + "')");
}

void EvalConfig::validate() const
{
  for (const auto * list : {&ap_thresholds, &recall_thresholds}) {
    for (const double t : *list) {
      if (!(t > 0.0 && t <= 1.0)) {
        throw ConfigError(fmt::format("eval: IoU threshold {} is outside (0, 1]", t));
      }
    }
  }
  if (ap_thresholds.empty() && recall_thresholds.empty()) {
    throw ConfigError("eval: at least one IoU threshold is required");
  }
  for (const Bucket b : difficulties) {
    if (b == Bucket::All) {
      throw ConfigError("eval: difficulties may only list easy, moderate and hard");
    }
  }
}

const ApResult * EvalReport::find_ap(Bucket bucket, double threshold) const
{
  for (const auto & r : ap) {
    if (r.bucket == bucket && r.threshold == threshold) {
      return &r;
    }
  }
  return nullptr;
}

const RecallResult * EvalReport::find_recall(Bucket bucket, double threshold) const
{
  for (const auto & r : recall) {
    if (r.bucket == bucket && r.threshold == threshold) {
      return &r;
    }
  }
  return nullptr;
}

FrameLabels load_ground_truth(const DatasetIndex & index)
{
  FrameLabels out;
  for (const auto & id : index.frame_ids) {
    out[id] = read_label_file(index.label_path(id), false);
  }
  return out;
}

FrameLabels load_predictions(const fs::path & dir, const DatasetIndex & index)
{
  if (!fs::is_directory(dir)) {
    throw IoFailure("prediction directory not found: " + dir.string());
  }
  const std::set<std::string> known(index.frame_ids.begin(), index.frame_ids.end());
  FrameLabels out;
  for (const auto & entry : fs::directory_iterator(dir)) {
    const fs::path & path = entry.path();
    if (!entry.is_regular_file() || path.extension() != ".txt" ||
        !is_valid_frame_id(path.stem().string()))
    {
      continue;
    }
    const std::string id = path.stem().string();
    if (known.count(id) == 0) {
      throw PredictionForUnknownFrame(id);
    }
    try {
      out[id] = read_label_file(path, true);
    } catch (const FieldCountMismatch & e) {
      if (e.actual() == kLabelFieldCount) {
        throw MissingScore(fmt::format("{}: prediction line without score", path.string()));
      }
      throw;
    }
  }
  return out;
}

std::string labels_digest(const FrameLabels & labels)
{
  std::string text;
  for (const auto & [id, recs] : labels) {
    text += id;
    text += '\n';
    text += serialize_label_text(recs);
  }
  return sha256_hex(text);
}

double label_iou(const LabelRecord & a, const LabelRecord & b, IouMode mode)
{
  return box_iou(box_from_label(a), box_from_label(b), mode);
}

EvalReport evaluate(
  const FrameLabels & ground_truth, const FrameLabels & predictions, const EvalConfig & config)
{
  config.validate();
  for (const auto & [id, recs] : predictions) {
    if (ground_truth.count(id) == 0) {
      throw PredictionForUnknownFrame(id);
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (!recs[i].score) {
        throw MissingScore(fmt::format("frame {}: prediction {} has no score", id, i));
      }
    }
  }

  std::vector<double> thresholds = config.ap_thresholds;
  thresholds.insert(thresholds.end(), config.recall_thresholds.begin(), config.recall_thresholds.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const auto threshold_slot = [&](double t) {
    return static_cast<std::size_t>(
      std::lower_bound(thresholds.begin(), thresholds.end(), t) - thresholds.begin());
  };

  std::vector<FrameData> frames;
  frames.reserve(ground_truth.size());
  for (const auto & [id, all_gts] : ground_truth) {
    FrameData f;
    f.id = &id;
    for (const auto & g : all_gts) {
      if (g.class_name == "Car") {
        f.gts.push_back(g);
      }
    }
    const auto & gts = f.gts;
    if (const auto it = predictions.find(id); it != predictions.end()) {
      for (const auto & p : it->second) {
        if (p.class_name == "Car") {
          f.preds.push_back(p);
        }
      }
    }
    for (const auto & g : gts) {
      f.difficulty.push_back(assign_difficulty(g));
    }
    f.iou.resize(static_cast<Eigen::Index>(f.preds.size()), static_cast<Eigen::Index>(gts.size()));
    for (std::size_t p = 0; p < f.preds.size(); ++p) {
      f.scores.push_back(*f.preds[p].score);
      f.tie_keys.push_back(serialize_label(f.preds[p]));
      const Box3D pb = box_from_label(f.preds[p]);
      for (std::size_t g = 0; g < gts.size(); ++g) {
        f.iou(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g)) =
          box_iou(pb, box_from_label(gts[g]), config.iou_mode);
      }
    }
    for (const double t : thresholds) {
      f.matches.push_back(match_scored(f.scores, f.tie_keys, f.iou, t));
    }
    frames.push_back(std::move(f));
  }

  EvalReport report;
  report.dataset_id = labels_digest(ground_truth);
  report.predictions_id = labels_digest(predictions);
  report.config = config;

  for (const Bucket bucket : config.difficulties) {
    for (const double t : config.ap_thresholds) {
      ApResult r;
      r.bucket = bucket;
      r.threshold = t;
      std::vector<ScoredDetection> detections;
      for (const auto & f : frames) {
        const auto mask = scope_mask(f, bucket);
        const FrameMatch & m = f.matches[threshold_slot(t)];
        r.num_ground_truth += count_in_scope(mask);
        r.counts += m.counts(mask);
        const auto outcomes = m.outcomes(mask);
        for (std::size_t p = 0; p < outcomes.size(); ++p) {
          if (outcomes[p] != Outcome::Ignored) {
            detections.push_back({f.scores[p], outcomes[p] == Outcome::TruePositive});
          }
        }
      }
      if (r.num_ground_truth > 0) {
        r.curve = pr_curve(std::move(detections), r.num_ground_truth);
        if (config.interpolation != Interpolation::Ap40) {
          r.ap11 = ap11(r.curve);
        }
        if (config.interpolation != Interpolation::Ap11) {
          r.ap40 = ap40(r.curve);
        }
      }
      report.ap.push_back(std::move(r));
    }
  }

  std::vector<Bucket> recall_buckets = config.difficulties;
  recall_buckets.push_back(Bucket::All);
  for (const Bucket bucket : recall_buckets) {
    for (const double t : config.recall_thresholds) {
      RecallResult r;
      r.bucket = bucket;
      r.threshold = t;
      for (const auto & f : frames) {
        const auto mask = scope_mask(f, bucket);
        r.num_ground_truth += count_in_scope(mask);
        r.counts += f.matches[threshold_slot(t)].counts(mask);
      }
      if (r.num_ground_truth > 0) {
        r.recall = recall_at(r.counts);
      }
      report.recall.push_back(r);
    }
  }

  const double diag_threshold =
    config.ap_thresholds.empty() ? config.recall_thresholds.front() : config.ap_thresholds.front();
  for (const auto & f : frames) {
    const auto mask = scope_mask(f, Bucket::All);
    report.frames.push_back(
      {*f.id, f.gts.size(), f.preds.size(), f.matches[threshold_slot(diag_threshold)].counts(mask)});
  }
  return report;
}

}  // namespace sotif_kitti
