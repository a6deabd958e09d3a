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

#include <sotif_kitti/baseline_detector.hpp>
#include <sotif_kitti/dataset_index.hpp>
#include <sotif_kitti/errors.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace sotif_kitti
{
namespace
{

constexpr float kGround = -1.73f;

PointCloud flat_ground(std::mt19937_64 & rng, std::size_t n)
{
  std::uniform_real_distribution<float> xy(-40.0f, 40.0f);
  std::normal_distribution<float> noise(0.0f, 0.01f);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({xy(rng), xy(rng), kGround + noise(rng), 0.3f});
  }
  return c;
}

// Samples the four sides and the roof of an upright box whose bottom floats
// `clearance` above the ground.
PointCloud box_surface(
  std::mt19937_64 & rng, std::size_t n, double cx, double cy, double l, double w, double h,
  double yaw, double clearance = 0.3)
{
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_int_distribution<int> face(0, 4);
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double z0 = kGround + clearance;
  PointCloud out;
  for (std::size_t i = 0; i < n; ++i) {
    double a = u(rng) * l;
    double b = u(rng) * w;
    double z = z0 + (u(rng) + 0.5) * h;
    switch (face(rng)) {
      case 0: a = l / 2; break;
      case 1: a = -l / 2; break;
      case 2: b = w / 2; break;
      case 3: b = -w / 2; break;
      default: z = z0 + h; break;
    }
    out.points.push_back(
      {static_cast<float>(cx + c * a - s * b), static_cast<float>(cy + s * a + c * b),
       static_cast<float>(z), 0.8f});
  }
  return out;
}

PointCloud join(PointCloud a, const PointCloud & b)
{
  a.points.insert(a.points.end(), b.points.begin(), b.points.end());
  return a;
}

double axis_error(double yaw, double expected)
{
  return std::abs(std::remainder(yaw - expected, M_PI));
}

TEST(DetectorConfig, DefaultsAndValidation)
{
  const DetectorConfig c;
  EXPECT_EQ(c.ground_z_band, 0.2);
  EXPECT_EQ(c.cluster_radius, 0.7);
  EXPECT_EQ(c.min_cluster_points, 15u);
  EXPECT_EQ(c.score_norm, 200.0);
  EXPECT_NO_THROW(c.validate());
  DetectorConfig bad;
  bad.cluster_radius = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Ground, FlatCloudIsRemoved)
{
  std::mt19937_64 rng(1);
  const PointCloud ground = flat_ground(rng, 20000);
  const PointCloud rest = remove_ground(ground, DetectorConfig{});
  EXPECT_LE(rest.size(), ground.size() / 100);
  const GroundPlane p = fit_ground_plane(ground, DetectorConfig{});
  EXPECT_NEAR(p.height_at(0, 0), kGround, 0.02);
  EXPECT_NEAR(p.a, 0.0, 1e-3);
  EXPECT_NEAR(p.b, 0.0, 1e-3);
}

TEST(Ground, BoxPointsSurvive)
{
  std::mt19937_64 rng(2);
  const PointCloud car = box_surface(rng, 2000, 15, 3, 4.5, 1.8, 1.3, 0.4);
  const PointCloud rest = remove_ground(join(flat_ground(rng, 20000), car), DetectorConfig{});
  std::size_t kept = 0;
  for (const auto & p : rest.points) {
    kept += p.intensity == 0.8f;
  }
  EXPECT_GE(kept, car.size() * 95 / 100);
}

TEST(Ground, TooFewPoints)
{
  PointCloud c;
  for (int i = 0; i < 5; ++i) {
    c.points.push_back({float(i), 0, kGround, 0});
  }
  EXPECT_THROW(remove_ground(c, DetectorConfig{}), DegenerateCloud);
  EXPECT_THROW(fit_ground_plane(c, DetectorConfig{}), DegenerateCloud);
}

TEST(Cluster, TwoBlobsTenMetresApart)
{
  std::mt19937_64 rng(3);
  const PointCloud blobs =
    join(box_surface(rng, 300, 10, 0, 2, 2, 1, 0), box_surface(rng, 300, 20, 0, 2, 2, 1, 0));
  const auto clusters = cluster(blobs, DetectorConfig{});
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].size() + clusters[1].size(), blobs.size());
  for (std::size_t i : clusters[0]) {
    for (std::size_t j : clusters[1]) {
      ASSERT_NE(i, j);
    }
  }
}

TEST(Cluster, SingleBlob)
{
  std::mt19937_64 rng(4);
  const PointCloud blob = box_surface(rng, 400, 10, 0, 4, 2, 1.5, 0);
  const auto clusters = cluster(blob, DetectorConfig{});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].size(), blob.size());
}

TEST(Cluster, SparseNoiseHasNoClusters)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-50.0f, 50.0f);
  PointCloud noise;
  for (int i = 0; i < 200; ++i) {
    noise.points.push_back({u(rng), u(rng), u(rng) / 50.0f, 0.1f});
  }
  EXPECT_TRUE(cluster(noise, DetectorConfig{}).empty());
}

TEST(FitBox, AxisAlignedSampling)
{
  std::mt19937_64 rng(6);
  const PointCloud pts = box_surface(rng, 3000, 12, -2, 4.5, 1.8, 1.4, 0.0);
  const Box3D b = fit_box(pts.points, DetectorConfig{});
  EXPECT_EQ(b.frame, Frame::KittiLidar);
  EXPECT_LT(axis_error(b.yaw, 0.0), 0.05);
  EXPECT_NEAR(b.dims.length, 4.5, 0.05 * 4.5);
  EXPECT_NEAR(b.dims.width, 1.8, 0.05 * 1.8);
  EXPECT_NEAR(b.dims.height, 1.4, 0.05 * 1.4);
  for (const auto & p : pts.points) {
    ASSERT_TRUE(contains(b, Eigen::Vector3d(p.x, p.y, p.z), 0.01));
  }
}

TEST(FitBox, RotatedThirtyDegrees)
{
  std::mt19937_64 rng(7);
  const double yaw = 30.0 * M_PI / 180.0;
  const PointCloud pts = box_surface(rng, 3000, 12, -2, 4.5, 1.8, 1.4, yaw);
  const Box3D b = fit_box(pts.points, DetectorConfig{});
  EXPECT_LT(axis_error(b.yaw, yaw), 0.05);
  EXPECT_GT(b.yaw, -M_PI / 2);
  EXPECT_LE(b.yaw, M_PI / 2);
  for (const auto & p : pts.points) {
    ASSERT_TRUE(contains(b, Eigen::Vector3d(p.x, p.y, p.z), 0.01));
  }
}

TEST(FitBox, MinimalClusterScore)
{
  std::mt19937_64 rng(8);
  const DetectorConfig cfg;
  const PointCloud pts = box_surface(rng, cfg.min_cluster_points, 8, 1, 2, 1, 1, 0.2);
  const Box3D b = fit_box(pts.points, cfg);
  ASSERT_TRUE(b.score.has_value());
  EXPECT_DOUBLE_EQ(*b.score, 15.0 / 200.0);
  EXPECT_GT(b.dims.length, 0.0);
  EXPECT_GT(b.dims.width, 0.0);
  EXPECT_GT(b.dims.height, 0.0);
}

TEST(FitBox, ScoreSaturatesAtOne)
{
  std::mt19937_64 rng(9);
  const PointCloud pts = box_surface(rng, 500, 8, 1, 4, 2, 1, 0.0);
  EXPECT_EQ(*fit_box(pts.points, DetectorConfig{}).score, 1.0);
}

TEST(Prior, NeverShrinksAndReachesGround)
{
  std::mt19937_64 rng(10);
  const DetectorConfig cfg;
  const PointCloud pts = box_surface(rng, 400, 15, 0, 1.2, 1.8, 1.2, M_PI / 2);
  const Box3D fitted = fit_box(pts.points, cfg);
  const GroundPlane ground{0.0, 0.0, kGround};
  const Box3D done = complete_with_prior(fitted, ground, cfg);
  EXPECT_GE(done.dims.length, cfg.prior_length - 1e-9);
  EXPECT_GE(done.dims.width, cfg.prior_width - 1e-9);
  EXPECT_NEAR(done.center.z() - done.dims.height / 2, kGround, 1e-6);
  for (const auto & p : pts.points) {
    ASSERT_TRUE(contains(done, Eigen::Vector3d(p.x, p.y, p.z), 0.011));
  }
}

TEST(Detect, FindsCarsDeterministically)
{
  std::mt19937_64 rng(11);
  PointCloud cloud = flat_ground(rng, 30000);
  cloud = join(cloud, box_surface(rng, 800, 12, 0, 4.5, 1.8, 1.3, 0.0));
  cloud = join(cloud, box_surface(rng, 300, 25, 6, 4.5, 1.8, 1.3, 0.3));
  const auto a = detect(cloud, DetectorConfig{});
  const auto b = detect(cloud, DetectorConfig{});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a, b);
  EXPECT_GE(*a[0].score, *a[1].score);
  EXPECT_NEAR(a[0].center.x(), 12.0, 1.0);
  const auto labels = detections_to_labels(a, CalibrationSet::default_calibration());
  ASSERT_EQ(labels.size(), 2u);
  for (const auto & l : labels) {
    EXPECT_TRUE(l.score.has_value());
    EXPECT_EQ(l.class_name, "Car");
    EXPECT_EQ(parse_label_line(serialize_label(l), true).score, l.score);
  }
}

TEST(Detect, BoxesBehindTheCameraAreNotLabelled)
{
  Box3D b;
  b.frame = Frame::KittiLidar;
  b.center = {-15, 0, -1};
  b.dims = {4.5, 1.8, 1.4};
  b.score = 0.5;
  const std::vector<Box3D> boxes{b};
  EXPECT_TRUE(detections_to_labels(boxes, CalibrationSet::default_calibration()).empty());
}

TEST(Detect, DatasetRunWritesOneFilePerFrame)
{
  test::TempDir tmp;
  const DatasetIndex index = validate_dataset(test::fixture_dir() / "dataset");
  detect_dataset(index, tmp / "pred", DetectorConfig{}, 3);
  std::size_t files = 0;
  for (const auto & e : std::filesystem::directory_iterator(tmp / "pred")) {
    files += e.path().extension() == ".txt";
    EXPECT_EQ(std::filesystem::file_size(e.path()), 0u);
  }
  EXPECT_EQ(files, index.frame_ids.size());
}

}  // namespace
}  // namespace sotif_kitti
