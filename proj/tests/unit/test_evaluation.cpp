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


#include "test_support.hpp"

#include <sotif_kitti/dataset_index.hpp>
#include <sotif_kitti/errors.hpp>
#include <sotif_kitti/evaluation.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <random>

namespace sotif_kitti
{
namespace
{

using test::TempDir;

Bucket bucket_named(const std::string & s)
{
  for (const Bucket b : {Bucket::Easy, Bucket::Moderate, Bucket::Hard, Bucket::All}) {
    std::string n = to_string(b);
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == s) {
      return b;
    }
  }
  throw std::runtime_error("bucket " + s);
}

void expect_counts(const nlohmann::json & j, const ConfusionCounts & c)
{
  EXPECT_EQ(j.at("tp").get<std::size_t>(), c.tp);
  EXPECT_EQ(j.at("fp").get<std::size_t>(), c.fp);
  EXPECT_EQ(j.at("fn").get<std::size_t>(), c.fn);
  EXPECT_EQ(c.tn, 0u);
}

class Fixture : public ::testing::Test
{
protected:
  void SetUp() override
  {
    index_ = validate_dataset(test::fixture_dir() / "dataset");
    gt_ = load_ground_truth(index_);
    preds_ = load_predictions(test::fixture_dir() / "predictions", index_);
  }
  DatasetIndex index_;
  FrameLabels gt_;
  FrameLabels preds_;
};

TEST_F(Fixture, MatchesIndependentReference)
{
  const EvalReport report = evaluate(gt_, preds_, EvalConfig{});
  std::ifstream in(test::golden_dir() / "expected_report.json");
  const nlohmann::json expected = nlohmann::json::parse(in);

  ASSERT_EQ(report.ap.size(), expected.at("ap").size());
  for (const auto & e : expected.at("ap")) {
    const Bucket b = bucket_named(e.at("bucket"));
    const double t = e.at("iou_threshold");
    const ApResult * r = report.find_ap(b, t);
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->num_ground_truth, e.at("num_ground_truth").get<std::size_t>());
    expect_counts(e.at("counts"), r->counts);
    ASSERT_TRUE(r->ap11 && r->ap40);
    EXPECT_NEAR(*r->ap11, e.at("ap11").get<double>(), 1e-9);
    EXPECT_NEAR(*r->ap40, e.at("ap40").get<double>(), 1e-9);
    const auto & pts = e.at("pr_curve");
    ASSERT_EQ(r->curve.points.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_DOUBLE_EQ(r->curve.points[i].score, pts[i].at("score").get<double>());
      EXPECT_NEAR(r->curve.points[i].recall, pts[i].at("recall").get<double>(), 1e-12);
      EXPECT_NEAR(r->curve.points[i].precision, pts[i].at("precision").get<double>(), 1e-12);
    }
  }
  ASSERT_EQ(report.recall.size(), expected.at("recall").size());
  for (const auto & e : expected.at("recall")) {
    const RecallResult * r = report.find_recall(bucket_named(e.at("bucket")), e.at("iou_threshold"));
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->num_ground_truth, e.at("num_ground_truth").get<std::size_t>());
    expect_counts(e.at("counts"), r->counts);
    ASSERT_TRUE(r->recall.has_value());
    EXPECT_NEAR(*r->recall, e.at("recall").get<double>(), 1e-12);
  }
}

TEST_F(Fixture, IdentityOracle)
{
  FrameLabels self;
  for (const auto & [id, recs] : gt_) {
    for (LabelRecord r : recs) {
      r.score = 1.0;
      self[id].push_back(r);
    }
  }
  const EvalReport report = evaluate(gt_, self, EvalConfig{});
  for (const auto & r : report.ap) {
    ASSERT_GT(r.num_ground_truth, 0u);
    EXPECT_EQ(*r.ap11, 100.0);
    EXPECT_EQ(*r.ap40, 100.0);
    EXPECT_EQ(r.counts.fp, 0u);
  }
  for (const auto & r : report.recall) {
    EXPECT_EQ(*r.recall, 1.0);
  }
}

TEST_F(Fixture, EmptyPredictions)
{
  const EvalReport report = evaluate(gt_, FrameLabels{}, EvalConfig{});
  for (const auto & r : report.ap) {
    EXPECT_EQ(*r.ap11, 0.0);
    EXPECT_EQ(*r.ap40, 0.0);
    EXPECT_EQ(r.counts.fn, r.num_ground_truth);
  }
  for (const auto & r : report.recall) {
    EXPECT_EQ(*r.recall, 0.0);
    EXPECT_EQ(r.counts.fn, r.num_ground_truth);
  }
}

TEST_F(Fixture, ShuffledInputGivesSameReport)
{
  const EvalReport base = evaluate(gt_, preds_, EvalConfig{});
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    FrameLabels shuffled = preds_;
    for (auto & [id, recs] : shuffled) {
      std::shuffle(recs.begin(), recs.end(), rng);
    }
    const EvalReport r = evaluate(gt_, shuffled, EvalConfig{});
    for (std::size_t i = 0; i < base.ap.size(); ++i) {
      EXPECT_EQ(r.ap[i].ap11, base.ap[i].ap11);
      EXPECT_EQ(r.ap[i].ap40, base.ap[i].ap40);
      EXPECT_EQ(r.ap[i].counts, base.ap[i].counts);
    }
    for (std::size_t i = 0; i < base.recall.size(); ++i) {
      EXPECT_EQ(r.recall[i].recall, base.recall[i].recall);
    }
  }
}

TEST_F(Fixture, RecallOrderedByThreshold)
{
  const EvalReport report = evaluate(gt_, preds_, EvalConfig{});
  for (const Bucket b : {Bucket::Easy, Bucket::Moderate, Bucket::Hard, Bucket::All}) {
    EXPECT_LE(*report.find_recall(b, 0.5)->recall, *report.find_recall(b, 0.3)->recall);
  }
}

TEST_F(Fixture, BevModeIsAtLeast3d)
{
  EvalConfig bev;
  bev.iou_mode = IouMode::Bev;
  const EvalReport a = evaluate(gt_, preds_, EvalConfig{});
  const EvalReport b = evaluate(gt_, preds_, bev);
  EXPECT_GE(b.find_recall(Bucket::All, 0.5)->counts.tp, a.find_recall(Bucket::All, 0.5)->counts.tp);
}

TEST_F(Fixture, FrameWithoutPredictionsOnlyAddsFalseNegatives)
{
  const EvalReport report = evaluate(gt_, preds_, EvalConfig{});
  const auto it = std::find_if(report.frames.begin(), report.frames.end(), [](const auto & f) {
    return f.frame_id == "000011";
  });
  ASSERT_NE(it, report.frames.end());
  EXPECT_EQ(it->predictions, 0u);
  EXPECT_EQ(it->counts.fn, it->ground_truths);
  EXPECT_EQ(it->counts.fp, 0u);
}

TEST_F(Fixture, InterpolationSelection)
{
  EvalConfig only11;
  only11.interpolation = Interpolation::Ap11;
  const EvalReport r = evaluate(gt_, preds_, only11);
  EXPECT_TRUE(r.ap.front().ap11.has_value());
  EXPECT_FALSE(r.ap.front().ap40.has_value());
}

TEST_F(Fixture, PredictionForUnknownFrame)
{
  FrameLabels extra = preds_;
  extra["000099"] = preds_.begin()->second;
  EXPECT_THROW(evaluate(gt_, extra, EvalConfig{}), PredictionForUnknownFrame);

  TempDir tmp;
  std::filesystem::copy(test::fixture_dir() / "predictions", tmp / "p");
  std::ofstream(tmp / "p" / "000099.txt") << "";
  EXPECT_THROW(load_predictions(tmp / "p", index_), PredictionForUnknownFrame);
}

TEST_F(Fixture, MissingScoreInPredictionFile)
{
  TempDir tmp;
  std::filesystem::create_directories(tmp / "p");
  std::ofstream(tmp / "p" / "000000.txt")
    << "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n";
  EXPECT_THROW(load_predictions(tmp / "p", index_), MissingScore);
}

TEST_F(Fixture, NonCarRecordsAreDropped)
{
  // Frame 000007 carries a Pedestrian prediction, frame 000005 a DontCare label.
  ASSERT_TRUE(std::any_of(preds_.at("000007").begin(), preds_.at("000007").end(), [](const auto & r) {
    return r.class_name == "Pedestrian";
  }));
  FrameLabels cars_only = preds_;
  for (auto & [id, recs] : cars_only) {
    std::erase_if(recs, [](const LabelRecord & r) { return r.class_name != "Car"; });
  }
  const EvalReport a = evaluate(gt_, preds_, EvalConfig{});
  const EvalReport b = evaluate(gt_, cars_only, EvalConfig{});
  for (std::size_t i = 0; i < a.ap.size(); ++i) {
    EXPECT_EQ(a.ap[i].counts, b.ap[i].counts);
    EXPECT_EQ(a.ap[i].ap40, b.ap[i].ap40);
  }
}

TEST(EvalConfig, Validation)
{
  EvalConfig c;
  EXPECT_NO_THROW(c.validate());
  c.ap_thresholds = {0.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ap_thresholds = {1.2};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ap_thresholds = {1.0};
  EXPECT_NO_THROW(c.validate());
}

TEST(EvalConfig, NamesParse)
{
  EXPECT_EQ(interpolation_from_string("ap11"), Interpolation::Ap11);
  EXPECT_EQ(interpolation_from_string("ap40"), Interpolation::Ap40);
  EXPECT_EQ(interpolation_from_string("both"), Interpolation::Both);
  EXPECT_EQ(iou_mode_from_string("bev"), IouMode::Bev);
  EXPECT_EQ(iou_mode_from_string("3d"), IouMode::ThreeD);
  EXPECT_THROW(interpolation_from_string("ap7"), ConfigError);
  EXPECT_THROW(iou_mode_from_string("2d"), ConfigError);
}

TEST(Digest, DependsOnContentOnly)
{
  FrameLabels a;
  a["000000"].push_back(parse_label_line(
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59", false));
  FrameLabels b = a;
  EXPECT_EQ(labels_digest(a), labels_digest(b));
  b["000000"][0].location.x() = 1.0;
  EXPECT_NE(labels_digest(a), labels_digest(b));
}

}  // namespace
}  // namespace sotif_kitti
