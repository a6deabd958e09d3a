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

#include "sotif_kitti/baseline_detector.hpp"

#include "parallel.hpp"
#include "sotif_kitti/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace fs = std::filesystem;

namespace sotif_kitti
{

namespace
{

constexpr double kMinExtent = 0.02;

double half_turn_yaw(double yaw)
{
  yaw = normalize_angle(yaw);
  if (yaw > std::numbers::pi / 2.0) {
    yaw -= std::numbers::pi;
  } else if (yaw <= -std::numbers::pi / 2.0) {
    yaw += std::numbers::pi;
  }
  return yaw;
}

std::size_t find_root(std::vector<std::size_t> & parent, std::size_t i)
{
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

std::int64_t cell_key(std::int64_t cx, std::int64_t cy, std::int64_t cz)
{
  constexpr std::int64_t kOffset = 1 << 20;
  return ((cx + kOffset) << 42) | ((cy + kOffset) << 21) | (cz + kOffset);
}

}  // namespace

void DetectorConfig::validate() const
{
  const bool ok = ground_z_band > 0.0 && cluster_radius > 0.0 && min_cluster_points > 0 &&
                  score_norm > 0.0 && ground_quantile > 0.0 && ground_quantile <= 1.0 &&
                  prior_length > 0.0 && prior_width > 0.0 && max_face_width > 0.0 &&
                  max_extent > 0.0;
  if (!ok) {
    throw ConfigError(
      "detector: band, radius, min_cluster_points, score_norm and size priors must be positive, "
      "ground_quantile in (0, 1]");
  }
}

GroundPlane fit_ground_plane(const PointCloud & cloud, const DetectorConfig & config)
{
  const std::size_t n = cloud.points.size();
  if (n < kMinDetectorPoints) {
    throw DegenerateCloud(n);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cloud.points[a].z < cloud.points[b].z;
  });
  const auto k = std::clamp<std::size_t>(
    static_cast<std::size_t>(std::ceil(config.ground_quantile * static_cast<double>(n))), 3, n);

  Eigen::MatrixXd A(static_cast<Eigen::Index>(k), 3);
  Eigen::VectorXd z(static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < k; ++r) {
    const auto & p = cloud.points[order[r]];
    A.row(static_cast<Eigen::Index>(r)) << p.x, p.y, 1.0;
    z(static_cast<Eigen::Index>(r)) = p.z;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 3) {
    return {0.0, 0.0, z.mean()};
  }
  const Eigen::Vector3d coef = qr.solve(z);
  return {coef.x(), coef.y(), coef.z()};
}

PointCloud remove_ground(const PointCloud & cloud, const DetectorConfig & config)
{
  const GroundPlane plane = fit_ground_plane(cloud, config);
  PointCloud out;
  for (const auto & p : cloud.points) {
    if (std::abs(p.z - plane.height_at(p.x, p.y)) > config.ground_z_band) {
      out.points.push_back(p);
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> cluster(const PointCloud & cloud, const DetectorConfig & config)
{
  const double r = config.cluster_radius;
  const double r2 = r * r;
  const std::size_t n = cloud.points.size();
  const auto cell_of = [&](const LidarPoint & p) {
    return std::array<std::int64_t, 3>{
      static_cast<std::int64_t>(std::floor(p.x / r)), static_cast<std::int64_t>(std::floor(p.y / r)),
      static_cast<std::int64_t>(std::floor(p.z / r))};
  };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = cell_of(cloud.points[i]);
    grid[cell_key(c[0], c[1], c[2])].push_back(i);
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto & p = cloud.points[i];
    const auto c = cell_of(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = grid.find(cell_key(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it == grid.end()) {
            continue;
          }
          for (const std::size_t j : it->second) {
            if (j <= i) {
              continue;
            }
            const auto & q = cloud.points[j];
            const double ex = static_cast<double>(p.x) - q.x;
            const double ey = static_cast<double>(p.y) - q.y;
            const double ez = static_cast<double>(p.z) - q.z;
            if (ex * ex + ey * ey + ez * ez <= r2) {
              const std::size_t a = find_root(parent, i);
              const std::size_t b = find_root(parent, j);
              if (a != b) {
                parent[std::max(a, b)] = std::min(a, b);
              }
            }
          }
        }
      }
    }
  }

  std::unordered_map<std::size_t, std::size_t> slot_of_root;
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find_root(parent, i);
    const auto [it, inserted] = slot_of_root.emplace(root, components.size());
    if (inserted) {
      components.emplace_back();
    }
    components[it->second].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto & comp : components) {
    if (comp.size() >= config.min_cluster_points) {
      out.push_back(std::move(comp));
    }
  }
  return out;
}

Box3D fit_box(std::span<const LidarPoint> points, const DetectorConfig & config)
{
  Box3D box;
  box.frame = Frame::KittiLidar;
  box.class_name = "Car";
  if (points.empty()) {
    box.dims = {kMinExtent, kMinExtent, kMinExtent};
    box.score = 0.0;
    return box;
  }
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto & p : points) {
    mean += Eigen::Vector2d(p.x, p.y);
  }
  mean /= static_cast<double>(points.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto & p : points) {
    const Eigen::Vector2d d = Eigen::Vector2d(p.x, p.y) - mean;
    cov += d * d.transpose();
  }
  double yaw = 0.0;
  if (cov.trace() > 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    const Eigen::Vector2d axis = eig.eigenvectors().col(1);
    yaw = half_turn_yaw(std::atan2(axis.y(), axis.x()));
  }
  const Eigen::Vector2d f(std::cos(yaw), std::sin(yaw));
  const Eigen::Vector2d l(-f.y(), f.x());
  double f_lo = INFINITY, f_hi = -INFINITY, l_lo = INFINITY, l_hi = -INFINITY;
  double z_lo = INFINITY, z_hi = -INFINITY;
  for (const auto & p : points) {
    const Eigen::Vector2d q(p.x, p.y);
    f_lo = std::min(f_lo, q.dot(f));
    f_hi = std::max(f_hi, q.dot(f));
    l_lo = std::min(l_lo, q.dot(l));
    l_hi = std::max(l_hi, q.dot(l));
    z_lo = std::min(z_lo, static_cast<double>(p.z));
    z_hi = std::max(z_hi, static_cast<double>(p.z));
  }
  const Eigen::Vector2d c2 = f * (f_lo + f_hi) / 2.0 + l * (l_lo + l_hi) / 2.0;
  box.center = {c2.x(), c2.y(), (z_lo + z_hi) / 2.0};
  box.dims = {
    std::max(f_hi - f_lo, kMinExtent), std::max(l_hi - l_lo, kMinExtent),
    std::max(z_hi - z_lo, kMinExtent)};
  box.yaw = yaw;
  box.score = std::min(1.0, static_cast<double>(points.size()) / config.score_norm);
  return box;
}

Box3D complete_with_prior(const Box3D & fitted, const GroundPlane & ground, const DetectorConfig & config)
{
  Box3D box = fitted;
  if (box.dims.length <= config.max_face_width) {
    box.yaw = half_turn_yaw(box.yaw + std::numbers::pi / 2.0);
    std::swap(box.dims.length, box.dims.width);
  }
  const Eigen::Vector3d f(std::cos(box.yaw), std::sin(box.yaw), 0.0);
  const Eigen::Vector3d l(-f.y(), f.x(), 0.0);
  const auto grow_away = [&](double & extent, double prior, const Eigen::Vector3d & axis) {
    if (extent >= prior) {
      return;
    }
    const double away = box.center.dot(axis) >= 0.0 ? 1.0 : -1.0;
    box.center += axis * (away * (prior - extent) / 2.0);
    extent = prior;
  };
  grow_away(box.dims.length, config.prior_length, f);
  grow_away(box.dims.width, config.prior_width, l);

  const double top = box.center.z() + box.dims.height / 2.0;
  const double bottom =
    std::min(box.center.z() - box.dims.height / 2.0, ground.height_at(box.center.x(), box.center.y()));
  box.center.z() = (top + bottom) / 2.0;
  box.dims.height = top - bottom;
  return box;
}

std::vector<Box3D> detect(const PointCloud & cloud, const DetectorConfig & config)
{
  config.validate();
  const GroundPlane ground = fit_ground_plane(cloud, config);
  PointCloud objects;
  for (const auto & p : cloud.points) {
    if (std::abs(p.z - ground.height_at(p.x, p.y)) > config.ground_z_band) {
      objects.points.push_back(p);
    }
  }
  std::vector<Box3D> boxes;
  std::vector<LidarPoint> members;
  for (const auto & comp : cluster(objects, config)) {
    members.clear();
    for (const std::size_t i : comp) {
      members.push_back(objects.points[i]);
    }
    const Box3D fitted = fit_box(members, config);
    if (std::max(fitted.dims.length, fitted.dims.width) > config.max_extent) {
      continue;
    }
    boxes.push_back(complete_with_prior(fitted, ground, config));
  }
  std::stable_sort(boxes.begin(), boxes.end(), [](const Box3D & a, const Box3D & b) {
    return a.score.value_or(0.0) > b.score.value_or(0.0);
  });
  return boxes;
}

std::vector<LabelRecord> detections_to_labels(
  std::span<const Box3D> lidar_boxes, const CalibrationSet & calib, const ImageSize & image)
{
  std::vector<LabelRecord> out;
  for (const auto & box : lidar_boxes) {
    const Box3D cam = lidar_to_camera(box, calib);
    ImageProjection proj;
    try {
      proj = project_to_image(cam, calib.P[2], image);
    } catch (const BehindCamera &) {
      continue;
    }
    if (proj.truncation >= 1.0 || !(proj.bbox.width() > 0.0) || !(proj.bbox.height() > 0.0)) {
      continue;
    }
    LabelRecord rec;
    rec.class_name = "Car";
    rec.truncation = std::clamp(proj.truncation, 0.0, 1.0);
    rec.occlusion = 0;
    rec.bbox = proj.bbox;
    set_label_geometry(cam, rec);
    rec.score = box.score.value_or(0.0);
    out.push_back(rec);
  }
  return out;
}

void detect_dataset(
  const DatasetIndex & index, const fs::path & out_dir, const DetectorConfig & config,
  std::size_t jobs)
{
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoFailure("cannot create " + out_dir.string() + ": " + ec.message());
  }
  parallel_for(index.frame_ids.size(), jobs, [&](std::size_t i) {
    const std::string & id = index.frame_ids[i];
    const PointCloud cloud = read_velodyne(index.velodyne_path(id));
    const CalibrationSet calib = read_calib(index.calib_path(id));
    std::vector<LabelRecord> labels;
    if (cloud.points.size() >= kMinDetectorPoints) {
      labels = detections_to_labels(detect(cloud, config), calib);
    }
    write_label_file(labels, out_dir / (id + ".txt"));
  });
}

}  // namespace sotif_kitti
