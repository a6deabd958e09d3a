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

#ifndef SOTIF_KITTI__DATASET_WRITER_HPP_
#define SOTIF_KITTI__DATASET_WRITER_HPP_

#include "sotif_kitti/box_geometry.hpp"
#include "sotif_kitti/dataset_index.hpp"
#include "sotif_kitti/kitti_io.hpp"
#include "sotif_kitti/lidar_sim.hpp"
#include "sotif_kitti/scenario.hpp"
#include "sotif_kitti/weather.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sotif_kitti
{

struct GenerationOptions
{
  std::size_t jobs{1};
  CalibrationSet calib{CalibrationSet::default_calibration()};
  ImageSize image{};
  std::size_t min_label_returns{kMinVisibleReturns};
  // Slack around a label box when counting the returns it contains; absorbs
  // range noise and the 2-decimal label quantization.
  double label_margin{0.10};
};

/// Per-frame LiDAR seed derived from the scenario seed.
std::uint64_t frame_seed(std::uint64_t base_seed, std::size_t frame_index);

/// One "Car" record per vehicle that is visible, in front of the camera, not fully
/// truncated, and whose quantized label box holds at least `min_label_returns`
/// points of `cloud`. Records are already at serialization precision.
std::vector<LabelRecord> build_labels(
  const SceneState & state, const PointCloud & cloud, const LidarConfig & lidar,
  const GenerationOptions & options);

struct FrameArtifacts
{
  PointCloud cloud;
  std::vector<LabelRecord> labels;
  std::vector<std::byte> png;
};

FrameArtifacts render_frame(
  const SceneState & state, const LidarConfig & lidar, const WeatherPreset & weather,
  std::uint64_t seed, const GenerationOptions & options);

struct ManifestEntry
{
  std::string weather;
  std::string state_hash;
  std::size_t sim_step{0};
};

/// Simulates config.total_recorded_frames frames, frame i under
/// per_frame_weather[i], writes the KITTI tree plus manifest.json under out_root
/// and returns the validated index.
DatasetIndex generate_dataset(
  const ScenarioConfig & config, const LidarConfig & lidar,
  std::span<const WeatherPreset> per_frame_weather, const std::filesystem::path & out_root,
  const GenerationOptions & options = {});

std::vector<std::pair<std::string, ManifestEntry>> read_manifest(const std::filesystem::path & root);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__DATASET_WRITER_HPP_
