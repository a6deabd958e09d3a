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

#ifndef SOTIF_KITTI__BOX_GEOMETRY_HPP_
#define SOTIF_KITTI__BOX_GEOMETRY_HPP_

#include "sotif_kitti/kitti_io.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sotif_kitti
{

/// Coordinate frame a box is expressed in.
///
/// - CarlaWorld: left-handed, x forward, y right, z up, origin at the LiDAR.
///   yaw is measured from +x towards +y.
/// - KittiLidar: right-handed, x forward, y left, z up. yaw is CCW about +z.
/// - KittiCamera: rectified camera, x right, y down, z forward. yaw is the KITTI
///   rotation_y about +y; the heading vector is (cos yaw, 0, -sin yaw).
enum class Frame { CarlaWorld, KittiLidar, KittiCamera };

const char * to_string(Frame frame);

struct BoxDims
{
  double length{0.0};
  double width{0.0};
  double height{0.0};

  friend bool operator==(const BoxDims &, const BoxDims &) = default;
};

/// Upright oriented box. `center` is the geometric center.
struct Box3D
{
  Eigen::Vector3d center{Eigen::Vector3d::Zero()};
  BoxDims dims;
  double yaw{0.0};
  Frame frame{Frame::KittiLidar};
  std::string class_name{"Car"};
  std::optional<double> score;

  friend bool operator==(const Box3D &, const Box3D &) = default;
};

/// Wraps to [-pi, pi].
double normalize_angle(double angle);

/// Orthonormal box axes expressed in the box's frame.
struct BoxBasis
{
  Eigen::Vector3d forward;
  Eigen::Vector3d left;
  Eigen::Vector3d up;
};

BoxBasis box_basis(Frame frame, double yaw);

/// Corner order: bottom face first, then top face, each counter-clockwise about
/// the box up axis starting at front-right: (+l,-w), (+l,+w), (-l,+w), (-l,-w).
using Corners = std::array<Eigen::Vector3d, 8>;
Corners corners_3d(const Box3D & box);

/// Point in the box footprint plane: (x, y) for CarlaWorld/KittiLidar, (x, z) for KittiCamera.
Eigen::Vector2d bev_coords(Frame frame, const Eigen::Vector3d & p);

struct ConvexPolygon2D
{
  std::vector<Eigen::Vector2d> vertices;  // counter-clockwise

  double area() const;
};

double signed_area(std::span<const Eigen::Vector2d> vertices);

/// Sutherland-Hodgman clipping of a convex subject by a convex CCW clip polygon.
ConvexPolygon2D clip_convex(const ConvexPolygon2D & subject, const ConvexPolygon2D & clip);

ConvexPolygon2D bev_footprint(const Box3D & box);

/// Interval the box occupies along its frame's vertical axis, in frame coordinates.
struct VerticalExtent
{
  double lo{0.0};
  double hi{0.0};
};

VerticalExtent vertical_extent(const Box3D & box);

enum class IouMode { ThreeD, Bev };

const char * to_string(IouMode mode);

double bev_iou(const Box3D & a, const Box3D & b);
double iou_3d(const Box3D & a, const Box3D & b);
double box_iou(const Box3D & a, const Box3D & b, IouMode mode);

bool contains(const Box3D & box, const Eigen::Vector3d & point, double margin = 0.0);

// ---- frame conversions -------------------------------------------------------

/// Handedness flip y -> -y, yaw -> -yaw.
Box3D carla_to_lidar(const Box3D & box);
Box3D lidar_to_carla(const Box3D & box);

/// Applies Tr_velo_to_cam then R0_rect. rotation_y is taken from the mapped
/// heading vector, which is -yaw_lidar - pi/2 for the axis-permutation calibration.
Box3D lidar_to_camera(const Box3D & box, const CalibrationSet & calib);
Box3D camera_to_lidar(const Box3D & box, const CalibrationSet & calib);

Box3D carla_to_kitti(const Box3D & box, const CalibrationSet & calib);
Box3D kitti_to_carla(const Box3D & box, const CalibrationSet & calib);

Eigen::Vector3d lidar_point_to_camera(const Eigen::Vector3d & p, const CalibrationSet & calib);
Eigen::Vector3d camera_point_to_lidar(const Eigen::Vector3d & p, const CalibrationSet & calib);

// ---- image projection --------------------------------------------------------

struct ImageSize
{
  int width{1242};
  int height{375};
};

struct ImageProjection
{
  BBox2D bbox;  // clipped to the image
  double truncation{0.0};
};

inline constexpr double kNearPlane = 0.1;

/// Projects a KittiCamera box with P2. Throws BehindCamera when no part of the box
/// is in front of the near plane; a box outside the image laterally gets truncation 1.
ImageProjection project_to_image(
  const Box3D & box, const Matrix34 & P2, const ImageSize & image = ImageSize{});

// ---- labels ------------------------------------------------------------------

/// KittiCamera box from a label: location is the bottom-face center.
Box3D box_from_label(const LabelRecord & rec);

/// KITTI observation angle of a KittiCamera box.
double observation_angle(const Box3D & camera_box);

/// Writes dims, location, rotation_y and alpha of a KittiCamera box into `rec`.
void set_label_geometry(const Box3D & camera_box, LabelRecord & rec);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__BOX_GEOMETRY_HPP_
