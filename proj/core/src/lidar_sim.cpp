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

#include "sotif_kitti/lidar_sim.hpp"

#include "sotif_kitti/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

namespace sotif_kitti
{

namespace
{

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kGroundReflectivity = 0.35;
constexpr double kVehicleReflectivity = 0.8;
constexpr int kGroundTarget = -1;
constexpr int kNoTarget = -2;

struct PreparedBox
{
  Eigen::Vector3d forward;
  Eigen::Vector3d left;
  Eigen::Vector3d up;
  Eigen::Vector3d origin_local;  // sensor origin in box coordinates
  Eigen::Vector3d half;
};

PreparedBox prepare(const Box3D & box)
{
  const BoxBasis b = box_basis(box.frame, box.yaw);
  PreparedBox p;
  p.forward = b.forward;
  p.left = b.left;
  p.up = b.up;
  p.origin_local = {-box.center.dot(b.forward), -box.center.dot(b.left), -box.center.dot(b.up)};
  p.half = {box.dims.length / 2.0, box.dims.width / 2.0, box.dims.height / 2.0};
  return p;
}

struct Hit
{
  double range{std::numeric_limits<double>::infinity()};
  int target{kNoTarget};
  double cos_incidence{0.0};
};

// Slab test in box coordinates; the sensor origin must lie outside the box.
bool intersect_box(const PreparedBox & box, const Eigen::Vector3d & dir, double & t_hit, double & cos_inc)
{
  const double d[3] = {dir.dot(box.forward), dir.dot(box.left), dir.dot(box.up)};
  double t_min = -std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();
  int entry_axis = -1;
  for (int k = 0; k < 3; ++k) {
    const double o = box.origin_local[k];
    const double h = box.half[k];
    if (std::abs(d[k]) < 1e-15) {
      if (o < -h || o > h) {
        return false;
      }
      continue;
    }
    double t1 = (-h - o) / d[k];
    double t2 = (h - o) / d[k];
    if (t1 > t2) {
      std::swap(t1, t2);
    }
    if (t1 > t_min) {
      t_min = t1;
      entry_axis = k;
    }
    t_max = std::min(t_max, t2);
    if (t_min > t_max) {
      return false;
    }
  }
  if (entry_axis < 0 || t_min <= 0.0) {
    return false;
  }
  t_hit = t_min;
  cos_inc = std::abs(d[entry_axis]);
  return true;
}

Hit cast_ray(
  const Eigen::Vector3d & dir, std::span<const PreparedBox> boxes, const LidarConfig & lidar)
{
  Hit hit;
  if (dir.z() < 0.0) {
    hit.range = lidar.mount_height / -dir.z();
    hit.target = kGroundTarget;
    hit.cos_incidence = -dir.z();
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    double t = 0.0;
    double cos_inc = 0.0;
    if (intersect_box(boxes[i], dir, t, cos_inc) && t < hit.range) {
      hit.range = t;
      hit.target = static_cast<int>(i);
      hit.cos_incidence = cos_inc;
    }
  }
  if (hit.range > lidar.max_range) {
    hit = Hit{};
  }
  return hit;
}

std::vector<Eigen::Vector3d> ray_directions(const LidarConfig & lidar)
{
  const std::size_t azimuths = lidar.azimuth_count();
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(static_cast<std::size_t>(lidar.channels) * azimuths);
  for (int ch = 0; ch < lidar.channels; ++ch) {
    const double el = lidar.elevation_deg(ch) * kDegToRad;
    for (std::size_t a = 0; a < azimuths; ++a) {
      const double az = static_cast<double>(a) * lidar.horizontal_resolution_deg * kDegToRad;
      dirs.emplace_back(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    }
  }
  return dirs;
}

std::vector<PreparedBox> prepare_all(std::span<const Box3D> boxes)
{
  std::vector<PreparedBox> out;
  out.reserve(boxes.size());
  for (const auto & b : boxes) {
    if (b.frame != Frame::KittiLidar) {
      throw FrameMismatch("LiDAR simulation expects KittiLidar boxes");
    }
    out.push_back(prepare(b));
  }
  return out;
}

// splitmix64 finaliser, used to decorrelate user seeds.
std::uint64_t mix_seed(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64 & rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool same_box(const Box3D & a, const Box3D & b)
{
  return (a.center - b.center).norm() < 1e-6 && a.dims == b.dims &&
         std::abs(normalize_angle(a.yaw - b.yaw)) < 1e-9;
}

// Azimuth interval of a box footprint, relative to `reference` azimuth.
std::pair<double, double> azimuth_span(const Box3D & box, double reference)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const Corners corners = corners_3d(box);
  for (std::size_t i = 0; i < 4; ++i) {
    const double a = normalize_angle(std::atan2(corners[i].y(), corners[i].x()) - reference);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return {lo, hi};
}

double blocked_fraction(const Box3D & target, std::span<const Box3D> blockers)
{
  const double reference = std::atan2(target.center.y(), target.center.x());
  const auto [lo, hi] = azimuth_span(target, reference);
  if (!(hi > lo)) {
    return 0.0;
  }
  const double target_range = target.center.head<2>().norm();
  std::vector<std::pair<double, double>> covered;
  for (const auto & b : blockers) {
    if (b.center.head<2>().norm() >= target_range) {
      continue;
    }
    const auto [blo, bhi] = azimuth_span(b, reference);
    const double c_lo = std::max(lo, blo);
    const double c_hi = std::min(hi, bhi);
    if (c_hi > c_lo) {
      covered.emplace_back(c_lo, c_hi);
    }
  }
  std::sort(covered.begin(), covered.end());
  double total = 0.0;
  double cursor = lo;
  for (const auto & [a, b] : covered) {
    const double start = std::max(a, cursor);
    if (b > start) {
      total += b - start;
      cursor = b;
    }
  }
  return std::clamp(total / (hi - lo), 0.0, 1.0);
}

}  // namespace

void LidarConfig::validate() const
{
  if (channels < 1) {
    throw ConfigError("lidar: channels must be >= 1");
  }
  if (!(max_range > 0.0)) {
    throw ConfigError("lidar: max_range must be > 0");
  }
  if (!(horizontal_resolution_deg > 0.0) || horizontal_resolution_deg > 360.0) {
    throw ConfigError("lidar: horizontal_resolution_deg must lie in (0, 360]");
  }
  if (!(vertical_fov_max_deg >= vertical_fov_min_deg) || vertical_fov_min_deg < -90.0 ||
      vertical_fov_max_deg > 90.0)
  {
    throw ConfigError("lidar: vertical field of view must satisfy -90 <= min <= max <= 90");
  }
  if (!(mount_height > 0.0)) {
    throw ConfigError("lidar: mount_height must be > 0");
  }
}

std::size_t LidarConfig::azimuth_count() const
{
  return static_cast<std::size_t>(std::llround(360.0 / horizontal_resolution_deg));
}

double LidarConfig::elevation_deg(int channel) const
{
  if (channels == 1) {
    return vertical_fov_min_deg;
  }
  return vertical_fov_min_deg +
         (vertical_fov_max_deg - vertical_fov_min_deg) * static_cast<double>(channel) /
           static_cast<double>(channels - 1);
}

std::vector<Box3D> sensor_boxes(const SceneState & state, const LidarConfig & lidar)
{
  const VehicleState & ego = state.ego();
  const double c = std::cos(ego.yaw);
  const double s = std::sin(ego.yaw);
  std::vector<Box3D> out;
  for (std::size_t i = 1; i < state.vehicles.size(); ++i) {
    Box3D box = world_box(state.vehicles[i]);
    const double dx = box.center.x() - ego.s;
    const double dy = box.center.y() - ego.y;
    box.center = {c * dx + s * dy, -s * dx + c * dy, box.center.z() - lidar.mount_height};
    box.yaw = normalize_angle(box.yaw - ego.yaw);
    out.push_back(carla_to_lidar(box));
  }
  return out;
}

PointCloud simulate_scan(
  std::span<const Box3D> boxes, const LidarConfig & lidar, const WeatherPreset & weather,
  std::uint64_t seed)
{
  lidar.validate();
  const auto prepared = prepare_all(boxes);
  const auto dirs = ray_directions(lidar);
  const double sigma = weather.range_noise_sigma;
  const double ground_refl = kGroundReflectivity * (1.0 - 0.5 * weather.wetness);

  std::mt19937_64 rng(mix_seed(seed));
  PointCloud cloud;
  cloud.points.reserve(dirs.size());
  for (const auto & dir : dirs) {
    const double u_drop = unit_uniform(rng);
    const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
    const double u2 = unit_uniform(rng);
    const Hit hit = cast_ray(dir, prepared, lidar);
    if (hit.target == kNoTarget) {
      continue;
    }
    const double p_drop = std::min(
      1.0, weather.dropout_base * (1.0 + weather.precipitation * hit.range / lidar.max_range));
    if (u_drop < p_drop) {
      continue;
    }
    const double gauss = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double noise = std::clamp(sigma * gauss, -5.0 * sigma, 5.0 * sigma);
    const double range = std::max(hit.range + noise, 1e-3);
    const double refl = hit.target == kGroundTarget ? ground_refl : kVehicleReflectivity;
    const double intensity = std::clamp(
      refl * hit.cos_incidence * weather.intensity_scale *
        std::exp(-weather.attenuation_coeff * hit.range),
      0.0, 1.0);
    const Eigen::Vector3d p = dir * range;
    cloud.points.push_back(
      {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z()),
       static_cast<float>(intensity)});
  }
  return cloud;
}

PointCloud simulate_lidar(
  const SceneState & state, const LidarConfig & lidar, const WeatherPreset & weather,
  std::uint64_t seed)
{
  const auto boxes = sensor_boxes(state, lidar);
  return simulate_scan(boxes, lidar, weather, seed);
}

Visibility visibility_among(
  std::span<const Box3D> obstacles, const LidarConfig & lidar, const Box3D & box,
  std::size_t min_returns)
{
  lidar.validate();
  if (box.frame != Frame::KittiLidar) {
    throw FrameMismatch("visibility expects a KittiLidar box");
  }
  std::vector<Box3D> blockers;
  for (const auto & o : obstacles) {
    if (!same_box(o, box)) {
      blockers.push_back(o);
    }
  }
  std::vector<Box3D> scene = blockers;
  scene.push_back(box);
  const int target = static_cast<int>(scene.size() - 1);
  const auto prepared = prepare_all(scene);

  Visibility vis;
  for (const auto & dir : ray_directions(lidar)) {
    if (cast_ray(dir, prepared, lidar).target == target) {
      ++vis.hit_count;
    }
  }
  vis.visible = vis.hit_count >= min_returns;
  vis.blocked_fraction = blocked_fraction(box, blockers);
  vis.occlusion = vis.blocked_fraction < 0.1 ? 0 : (vis.blocked_fraction < 0.5 ? 1 : 2);
  return vis;
}

Visibility visibility_filter(
  const SceneState & state, const LidarConfig & lidar, const Box3D & box, std::size_t min_returns)
{
  const auto obstacles = sensor_boxes(state, lidar);
  return visibility_among(obstacles, lidar, box, min_returns);
}

}  // namespace sotif_kitti
