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

#ifndef SOTIF_KITTI__BASELINE_DETECTOR_HPP_
#define SOTIF_KITTI__BASELINE_DETECTOR_HPP_

#include "sotif_kitti/box_geometry.hpp"
#include "sotif_kitti/dataset_index.hpp"
#include "sotif_kitti/kitti_io.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sotif_kitti
{

struct DetectorConfig
{
  double ground_z_band{0.2};
  double cluster_radius{0.7};
  std::size_t min_cluster_points{15};
  double score_norm{200.0};

  // Fraction of lowest points used for the ground fit.
  double ground_quantile{0.3};
  // Car size prior for clusters that expose only one or two faces.
  double prior_length{4.8};
  double prior_width{1.9};
  // A cluster no longer than this along its principal axis is read as a single
  // rear or front face.
  double max_face_width{2.6};
  // Clusters with a longer footprint side are not reported.
  double max_extent{12.0};

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const DetectorConfig &, const DetectorConfig &) = default;
};

/// z = a x + b y + c in the sensor frame.
struct GroundPlane
{
  double a{0.0};
  double b{0.0};
  double c{0.0};

  double height_at(double x, double y) const { return a * x + b * y + c; }
};

inline constexpr std::size_t kMinDetectorPoints = 10;

/// Least-squares plane through the lowest `ground_quantile` of the points.
/// Throws DegenerateCloud below kMinDetectorPoints points.
GroundPlane fit_ground_plane(const PointCloud & cloud, const DetectorConfig & config);

/// Drops points within ground_z_band of the fitted plane.
PointCloud remove_ground(const PointCloud & cloud, const DetectorConfig & config);

/// Connected components under the cluster_radius relation; components smaller
/// than min_cluster_points are dropped. Each set is sorted, sets are ordered by
/// their smallest index.
std::vector<std::vector<std::size_t>> cluster(const PointCloud & cloud, const DetectorConfig & config);

/// Principal-axis box in the KittiLidar frame: yaw from the dominant BEV
/// direction resolved into (-pi/2, pi/2], extents from the rotated min/max,
/// score = min(1, n / score_norm).
Box3D fit_box(std::span<const LidarPoint> points, const DetectorConfig & config);

/// Grows a fitted box to the car size prior away from the sensor and down to the
/// ground. A short single-face cluster has its heading turned perpendicular to
/// the face. Never shrinks the box.
Box3D complete_with_prior(const Box3D & fitted, const GroundPlane & ground, const DetectorConfig & config);

/// Ground removal, clustering and box fitting. Boxes are in the KittiLidar frame,
/// ordered by descending score then by cluster order.
std::vector<Box3D> detect(const PointCloud & cloud, const DetectorConfig & config);

/// Prediction records for boxes whose projection is inside the image.
std::vector<LabelRecord> detections_to_labels(
  std::span<const Box3D> lidar_boxes, const CalibrationSet & calib, const ImageSize & image = {});

/// Runs the detector on every frame and writes NNNNNN.txt prediction files into out_dir.
void detect_dataset(
  const DatasetIndex & index, const std::filesystem::path & out_dir, const DetectorConfig & config,
  std::size_t jobs = 1);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__BASELINE_DETECTOR_HPP_
