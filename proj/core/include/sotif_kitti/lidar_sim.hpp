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

#ifndef SOTIF_KITTI__LIDAR_SIM_HPP_
#define SOTIF_KITTI__LIDAR_SIM_HPP_

#include "sotif_kitti/box_geometry.hpp"
#include "sotif_kitti/kitti_io.hpp"
#include "sotif_kitti/scenario.hpp"
#include "sotif_kitti/weather.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sotif_kitti
{

/// Spinning multi-channel LiDAR mounted above the ego center. Defaults approximate
/// the HDL-64E used for KITTI.
struct LidarConfig
{
  int channels{64};
  double vertical_fov_min_deg{-24.8};
  double vertical_fov_max_deg{2.0};
  double horizontal_resolution_deg{0.2};
  double max_range{120.0};
  double mount_height{1.73};

  void validate() const;
  std::size_t azimuth_count() const;
  double elevation_deg(int channel) const;

  friend bool operator==(const LidarConfig &, const LidarConfig &) = default;
};

inline constexpr std::size_t kMinVisibleReturns = 8;

/// Boxes of all non-ego vehicles relative to the sensor, in the KittiLidar frame.
std::vector<Box3D> sensor_boxes(const SceneState & state, const LidarConfig & lidar);

/// Ray casts the channel x azimuth grid against the ground plane and `boxes`
/// (KittiLidar frame) and corrupts each hit with the weather model. Every ray
/// consumes the same number of random draws, so for a fixed seed the dropped set
/// only grows with dropout probability.
PointCloud simulate_scan(
  std::span<const Box3D> boxes, const LidarConfig & lidar, const WeatherPreset & weather,
  std::uint64_t seed);

PointCloud simulate_lidar(
  const SceneState & state, const LidarConfig & lidar, const WeatherPreset & weather,
  std::uint64_t seed);

struct Visibility
{
  bool visible{false};
  int occlusion{0};  // 0: <10 % blocked, 1: <50 %, 2: otherwise
  std::size_t hit_count{0};
  double blocked_fraction{0.0};
};

/// Noise-free visibility of `box` (KittiLidar frame) among the vehicles of `state`.
Visibility visibility_filter(
  const SceneState & state, const LidarConfig & lidar, const Box3D & box,
  std::size_t min_returns = kMinVisibleReturns);

/// Same, against an explicit obstacle list (KittiLidar frame).
Visibility visibility_among(
  std::span<const Box3D> obstacles, const LidarConfig & lidar, const Box3D & box,
  std::size_t min_returns = kMinVisibleReturns);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__LIDAR_SIM_HPP_
