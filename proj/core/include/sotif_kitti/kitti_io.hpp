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

#ifndef SOTIF_KITTI__KITTI_IO_HPP_
#define SOTIF_KITTI__KITTI_IO_HPP_

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sotif_kitti
{

/// One LiDAR return in the sensor frame. Stored on disk as four little-endian float32.
struct LidarPoint
{
  float x{0.0f};
  float y{0.0f};
  float z{0.0f};
  float intensity{0.0f};

  friend bool operator==(const LidarPoint &, const LidarPoint &) = default;
};

struct PointCloud
{
  std::vector<LidarPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  friend bool operator==(const PointCloud &, const PointCloud &) = default;
};

inline constexpr std::size_t kVelodyneStride = 16;

std::vector<std::byte> encode_velodyne(const PointCloud & cloud);
PointCloud decode_velodyne(std::span<const std::byte> bytes);

PointCloud read_velodyne(const std::filesystem::path & path);
void write_velodyne(const PointCloud & cloud, const std::filesystem::path & path);

// ---- labels ------------------------------------------------------------------

struct BBox2D
{
  double left{0.0};
  double top{0.0};
  double right{0.0};
  double bottom{0.0};

  double width() const noexcept { return right - left; }
  double height() const noexcept { return bottom - top; }

  friend bool operator==(const BBox2D &, const BBox2D &) = default;
};

/// Object extents in KITTI label order.
struct LabelDims
{
  double height{0.0};
  double width{0.0};
  double length{0.0};

  friend bool operator==(const LabelDims &, const LabelDims &) = default;
};

/// One line of a KITTI label_2 file. `location` is the bottom-face center in the
/// rectified camera frame; `score` is present iff the record is a prediction.
struct LabelRecord
{
  std::string class_name{"Car"};
  double truncation{0.0};
  int occlusion{0};
  double alpha{0.0};
  BBox2D bbox;
  LabelDims dims;
  Eigen::Vector3d location{Eigen::Vector3d::Zero()};
  double rotation_y{0.0};
  std::optional<double> score;

  bool is_prediction() const noexcept { return score.has_value(); }

  friend bool operator==(const LabelRecord &, const LabelRecord &) = default;
};

inline constexpr std::size_t kLabelFieldCount = 15;
inline constexpr std::size_t kPredictionFieldCount = 16;
inline constexpr int kGeometryDecimals = 2;
inline constexpr int kScoreDecimals = 4;

/// Parses one label line. `expect_score` selects the 16-field prediction layout.
/// Prediction and DontCare lines may carry the -1 sentinel for truncation and
/// occlusion, as written by common detection toolkits.
LabelRecord parse_label_line(std::string_view line, bool expect_score);

/// Geometry fields use 2 decimals, the score 4 decimals.
std::string serialize_label(const LabelRecord & rec);

std::vector<LabelRecord> parse_label_text(std::string_view text, bool expect_score);
std::string serialize_label_text(std::span<const LabelRecord> records);

std::vector<LabelRecord> read_label_file(const std::filesystem::path & path, bool expect_score);
void write_label_file(std::span<const LabelRecord> records, const std::filesystem::path & path);

// ---- calibration -------------------------------------------------------------

using Matrix34 = Eigen::Matrix<double, 3, 4>;

struct CalibrationSet
{
  std::array<Matrix34, 4> P{Matrix34::Zero(), Matrix34::Zero(), Matrix34::Zero(), Matrix34::Zero()};
  Eigen::Matrix3d R0_rect{Eigen::Matrix3d::Identity()};
  Matrix34 Tr_velo_to_cam{Matrix34::Zero()};
  Matrix34 Tr_imu_to_velo{Matrix34::Zero()};

  /// Fixed calibration written for every generated frame: KITTI-like intrinsics
  /// for a 1242x375 image and a camera mounted 0.27 m ahead of the LiDAR.
  static CalibrationSet default_calibration();

  /// Empty when rigid parts are orthonormal and R0_rect is a proper rotation.
  std::vector<std::string> invariant_violations(double tolerance = 1e-9) const;

  friend bool operator==(const CalibrationSet & a, const CalibrationSet & b);
};

CalibrationSet parse_calib(std::string_view text);
std::string serialize_calib(const CalibrationSet & calib);

CalibrationSet read_calib(const std::filesystem::path & path);
void write_calib(const CalibrationSet & calib, const std::filesystem::path & path);

// ---- misc --------------------------------------------------------------------

inline constexpr int kFrameIdWidth = 6;

std::string format_frame_id(std::size_t index);
bool is_valid_frame_id(std::string_view id);

std::vector<std::byte> read_file_bytes(const std::filesystem::path & path);
std::string read_file_text(const std::filesystem::path & path);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__KITTI_IO_HPP_
