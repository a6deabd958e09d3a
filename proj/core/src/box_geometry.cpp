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

#include "sotif_kitti/box_geometry.hpp"

#include "sotif_kitti/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sotif_kitti
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kClipEpsilon = 1e-12;

double cross2(const Eigen::Vector2d & a, const Eigen::Vector2d & b)
{
  return a.x() * b.y() - a.y() * b.x();
}

void require_frame(const Box3D & box, Frame expected, const char * op)
{
  if (box.frame != expected) {
    throw FrameMismatch(
      std::string(op) + " expects a " + to_string(expected) + " box, got " + to_string(box.frame));
  }
}

void require_same_frame(const Box3D & a, const Box3D & b)
{
  if (a.frame != b.frame) {
    throw FrameMismatch(
      std::string("boxes are in different frames: ") + to_string(a.frame) + " vs " +
      to_string(b.frame));
  }
}

Eigen::Matrix3d velo_to_rect_rotation(const CalibrationSet & calib)
{
  return calib.R0_rect * calib.Tr_velo_to_cam.leftCols<3>();
}

Eigen::Vector2d intersect(
  const Eigen::Vector2d & prev, const Eigen::Vector2d & cur, const Eigen::Vector2d & a,
  const Eigen::Vector2d & b)
{
  const Eigen::Vector2d edge = b - a;
  const double denom = cross2(edge, cur - prev);
  const double t = denom == 0.0 ? 0.0 : cross2(edge, a - prev) / denom;
  return prev + t * (cur - prev);
}

}  // namespace

const char * to_string(Frame frame)
{
  switch (frame) {
    case Frame::CarlaWorld:
      return "CarlaWorld";
    case Frame::KittiLidar:
      return "KittiLidar";
    case Frame::KittiCamera:
      return "KittiCamera";
  }
  return "unknown";
}

const char * to_string(IouMode mode)
{
  return mode == IouMode::ThreeD ? "3d" : "bev";
}

double normalize_angle(double angle)
{
  double a = std::remainder(angle, 2.0 * kPi);
  if (a < -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

BoxBasis box_basis(Frame frame, double yaw)
{
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  switch (frame) {
    case Frame::CarlaWorld:
      return {{c, s, 0.0}, {s, -c, 0.0}, {0.0, 0.0, 1.0}};
    case Frame::KittiLidar:
      return {{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}};
    case Frame::KittiCamera:
      return {{c, 0.0, -s}, {s, 0.0, c}, {0.0, -1.0, 0.0}};
  }
  return {};
}

Corners corners_3d(const Box3D & box)
{
  const BoxBasis basis = box_basis(box.frame, box.yaw);
  const Eigen::Vector3d f = basis.forward * (box.dims.length / 2.0);
  const Eigen::Vector3d l = basis.left * (box.dims.width / 2.0);
  const Eigen::Vector3d u = basis.up * (box.dims.height / 2.0);
  const Eigen::Vector3d & c = box.center;
  return {
    c + f - l - u, c + f + l - u, c - f + l - u, c - f - l - u,
    c + f - l + u, c + f + l + u, c - f + l + u, c - f - l + u,
  };
}

Eigen::Vector2d bev_coords(Frame frame, const Eigen::Vector3d & p)
{
  if (frame == Frame::KittiCamera) {
    return {p.x(), p.z()};
  }
  return {p.x(), p.y()};
}

double signed_area(std::span<const Eigen::Vector2d> vertices)
{
  const std::size_t n = vertices.size();
  if (n < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross2(vertices[i], vertices[(i + 1) % n]);
  }
  return twice / 2.0;
}

double ConvexPolygon2D::area() const
{
  return std::abs(signed_area(vertices));
}

ConvexPolygon2D clip_convex(const ConvexPolygon2D & subject, const ConvexPolygon2D & clip)
{
  std::vector<Eigen::Vector2d> output = subject.vertices;
  const std::size_t m = clip.vertices.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Eigen::Vector2d & a = clip.vertices[e];
    const Eigen::Vector2d & b = clip.vertices[(e + 1) % m];
    const Eigen::Vector2d edge = b - a;
    const std::vector<Eigen::Vector2d> input = std::move(output);
    output.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Eigen::Vector2d & cur = input[i];
      const Eigen::Vector2d & prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = cross2(edge, cur - a) >= -kClipEpsilon;
      const bool prev_in = cross2(edge, prev - a) >= -kClipEpsilon;
      if (cur_in) {
        if (!prev_in) {
          output.push_back(intersect(prev, cur, a, b));
        }
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(intersect(prev, cur, a, b));
      }
    }
  }
  return ConvexPolygon2D{std::move(output)};
}

ConvexPolygon2D bev_footprint(const Box3D & box)
{
  const Corners corners = corners_3d(box);
  ConvexPolygon2D poly;
  poly.vertices.reserve(4);
  for (std::size_t i = 0; i < 4; ++i) {
    poly.vertices.push_back(bev_coords(box.frame, corners[i]));
  }
  if (signed_area(poly.vertices) < 0.0) {
    std::reverse(poly.vertices.begin(), poly.vertices.end());
  }
  return poly;
}

VerticalExtent vertical_extent(const Box3D & box)
{
  const double axis = box.frame == Frame::KittiCamera ? box.center.y() : box.center.z();
  return {axis - box.dims.height / 2.0, axis + box.dims.height / 2.0};
}

namespace
{

struct Overlap
{
  double area_a;
  double area_b;
  double intersection;
};

Overlap footprint_overlap(const Box3D & a, const Box3D & b)
{
  const ConvexPolygon2D pa = bev_footprint(a);
  const ConvexPolygon2D pb = bev_footprint(b);
  return {pa.area(), pb.area(), clip_convex(pa, pb).area()};
}

}  // namespace

double bev_iou(const Box3D & a, const Box3D & b)
{
  require_same_frame(a, b);
  const Overlap o = footprint_overlap(a, b);
  const double uni = o.area_a + o.area_b - o.intersection;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(o.intersection / uni, 0.0, 1.0);
}

double iou_3d(const Box3D & a, const Box3D & b)
{
  require_same_frame(a, b);
  const VerticalExtent ea = vertical_extent(a);
  const VerticalExtent eb = vertical_extent(b);
  const double overlap_h = std::min(ea.hi, eb.hi) - std::max(ea.lo, eb.lo);
  const Overlap o = footprint_overlap(a, b);
  const double vol_a = o.area_a * (ea.hi - ea.lo);
  const double vol_b = o.area_b * (eb.hi - eb.lo);
  const double inter = overlap_h > 0.0 ? o.intersection * overlap_h : 0.0;
  const double uni = vol_a + vol_b - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

double box_iou(const Box3D & a, const Box3D & b, IouMode mode)
{
  return mode == IouMode::ThreeD ? iou_3d(a, b) : bev_iou(a, b);
}

bool contains(const Box3D & box, const Eigen::Vector3d & point, double margin)
{
  const BoxBasis basis = box_basis(box.frame, box.yaw);
  const Eigen::Vector3d d = point - box.center;
  return std::abs(d.dot(basis.forward)) <= box.dims.length / 2.0 + margin &&
         std::abs(d.dot(basis.left)) <= box.dims.width / 2.0 + margin &&
         std::abs(d.dot(basis.up)) <= box.dims.height / 2.0 + margin;
}

// ---- frame conversions -------------------------------------------------------

Box3D carla_to_lidar(const Box3D & box)
{
  require_frame(box, Frame::CarlaWorld, "carla_to_lidar");
  Box3D out = box;
  out.center.y() = -box.center.y();
  out.yaw = normalize_angle(-box.yaw);
  out.frame = Frame::KittiLidar;
  return out;
}

Box3D lidar_to_carla(const Box3D & box)
{
  require_frame(box, Frame::KittiLidar, "lidar_to_carla");
  Box3D out = box;
  out.center.y() = -box.center.y();
  out.yaw = normalize_angle(-box.yaw);
  out.frame = Frame::CarlaWorld;
  return out;
}

Eigen::Vector3d lidar_point_to_camera(const Eigen::Vector3d & p, const CalibrationSet & calib)
{
  const Eigen::Vector3d cam =
    calib.Tr_velo_to_cam.leftCols<3>() * p + calib.Tr_velo_to_cam.col(3);
  return calib.R0_rect * cam;
}

Eigen::Vector3d camera_point_to_lidar(const Eigen::Vector3d & p, const CalibrationSet & calib)
{
  const Eigen::Vector3d cam = calib.R0_rect.transpose() * p;
  return calib.Tr_velo_to_cam.leftCols<3>().transpose() * (cam - calib.Tr_velo_to_cam.col(3));
}

Box3D lidar_to_camera(const Box3D & box, const CalibrationSet & calib)
{
  require_frame(box, Frame::KittiLidar, "lidar_to_camera");
  Box3D out = box;
  out.center = lidar_point_to_camera(box.center, calib);
  const Eigen::Vector3d heading =
    velo_to_rect_rotation(calib) * Eigen::Vector3d{std::cos(box.yaw), std::sin(box.yaw), 0.0};
  out.yaw = normalize_angle(std::atan2(-heading.z(), heading.x()));
  out.frame = Frame::KittiCamera;
  return out;
}

Box3D camera_to_lidar(const Box3D & box, const CalibrationSet & calib)
{
  require_frame(box, Frame::KittiCamera, "camera_to_lidar");
  Box3D out = box;
  out.center = camera_point_to_lidar(box.center, calib);
  const Eigen::Vector3d heading = velo_to_rect_rotation(calib).transpose() *
                                  Eigen::Vector3d{std::cos(box.yaw), 0.0, -std::sin(box.yaw)};
  out.yaw = normalize_angle(std::atan2(heading.y(), heading.x()));
  out.frame = Frame::KittiLidar;
  return out;
}

Box3D carla_to_kitti(const Box3D & box, const CalibrationSet & calib)
{
  require_frame(box, Frame::CarlaWorld, "carla_to_kitti");
  return lidar_to_camera(carla_to_lidar(box), calib);
}

Box3D kitti_to_carla(const Box3D & box, const CalibrationSet & calib)
{
  require_frame(box, Frame::KittiCamera, "kitti_to_carla");
  return lidar_to_carla(camera_to_lidar(box, calib));
}

// ---- image projection --------------------------------------------------------

ImageProjection project_to_image(const Box3D & box, const Matrix34 & P2, const ImageSize & image)
{
  require_frame(box, Frame::KittiCamera, "project_to_image");
  static constexpr std::array<std::array<int, 2>, 12> kEdges{{
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
  }};
  const Corners corners = corners_3d(box);
  std::vector<Eigen::Vector3d> visible;
  for (const auto & c : corners) {
    if (c.z() > kNearPlane) {
      visible.push_back(c);
    }
  }
  if (visible.empty()) {
    throw BehindCamera();
  }
  for (const auto & [i, j] : kEdges) {
    const Eigen::Vector3d & a = corners[static_cast<std::size_t>(i)];
    const Eigen::Vector3d & b = corners[static_cast<std::size_t>(j)];
    if ((a.z() > kNearPlane) != (b.z() > kNearPlane)) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      visible.push_back(a + t * (b - a));
    }
  }

  double left = std::numeric_limits<double>::infinity();
  double top = std::numeric_limits<double>::infinity();
  double right = -std::numeric_limits<double>::infinity();
  double bottom = -std::numeric_limits<double>::infinity();
  for (const auto & p : visible) {
    const Eigen::Vector3d h = P2.leftCols<3>() * p + P2.col(3);
    const double u = h.x() / h.z();
    const double v = h.y() / h.z();
    left = std::min(left, u);
    right = std::max(right, u);
    top = std::min(top, v);
    bottom = std::max(bottom, v);
  }

  const double max_u = static_cast<double>(image.width - 1);
  const double max_v = static_cast<double>(image.height - 1);
  ImageProjection out;
  out.bbox = {
    std::clamp(left, 0.0, max_u), std::clamp(top, 0.0, max_v), std::clamp(right, 0.0, max_u),
    std::clamp(bottom, 0.0, max_v)};
  const double full = (right - left) * (bottom - top);
  const double kept = std::max(0.0, out.bbox.width()) * std::max(0.0, out.bbox.height());
  out.truncation = full > 0.0 ? std::clamp(1.0 - kept / full, 0.0, 1.0) : 0.0;
  return out;
}

// ---- labels ------------------------------------------------------------------

Box3D box_from_label(const LabelRecord & rec)
{
  Box3D box;
  box.frame = Frame::KittiCamera;
  box.dims = {rec.dims.length, rec.dims.width, rec.dims.height};
  box.center = rec.location - Eigen::Vector3d{0.0, rec.dims.height / 2.0, 0.0};
  box.yaw = rec.rotation_y;
  box.class_name = rec.class_name;
  box.score = rec.score;
  return box;
}

double observation_angle(const Box3D & camera_box)
{
  require_frame(camera_box, Frame::KittiCamera, "observation_angle");
  return normalize_angle(
    camera_box.yaw - std::atan2(camera_box.center.x(), camera_box.center.z()));
}

void set_label_geometry(const Box3D & camera_box, LabelRecord & rec)
{
  require_frame(camera_box, Frame::KittiCamera, "set_label_geometry");
  rec.class_name = camera_box.class_name;
  rec.dims = {camera_box.dims.height, camera_box.dims.width, camera_box.dims.length};
  rec.location = camera_box.center + Eigen::Vector3d{0.0, camera_box.dims.height / 2.0, 0.0};
  rec.rotation_y = normalize_angle(camera_box.yaw);
  rec.alpha = observation_angle(camera_box);
  rec.score = camera_box.score;
}

}  // namespace sotif_kitti
