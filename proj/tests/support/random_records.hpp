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


#ifndef RANDOM_RECORDS_HPP_
#define RANDOM_RECORDS_HPP_

#include <sotif_kitti/kitti_io.hpp>

#include <cmath>
#include <random>
#include <string>

namespace sotif_kitti::test
{

/// Uniform value on the 10^-decimals grid, so it is exactly representable at
/// serialization precision.
inline double grid_value(std::mt19937_64 & rng, double lo, double hi, int decimals)
{
  const double scale = std::pow(10.0, decimals);
  std::uniform_int_distribution<long long> d(
    static_cast<long long>(std::ceil(lo * scale)), static_cast<long long>(std::floor(hi * scale)));
  return static_cast<double>(d(rng)) / scale;
}

inline LabelRecord random_label(std::mt19937_64 & rng, bool with_score)
{
  LabelRecord r;
  r.class_name = "Car";
  r.truncation = grid_value(rng, 0.0, 1.0, 2);
  r.occlusion = std::uniform_int_distribution<int>(0, 3)(rng);
  r.alpha = grid_value(rng, -3.14, 3.14, 2);
  r.bbox.left = grid_value(rng, 0.0, 1200.0, 2);
  r.bbox.top = grid_value(rng, 0.0, 350.0, 2);
  r.bbox.right = std::round((r.bbox.left + grid_value(rng, 0.01, 40.0, 2)) * 100.0) / 100.0;
  r.bbox.bottom = std::round((r.bbox.top + grid_value(rng, 0.01, 25.0, 2)) * 100.0) / 100.0;
  r.dims = {grid_value(rng, 0.5, 4.0, 2), grid_value(rng, 0.5, 3.0, 2), grid_value(rng, 0.5, 20.0, 2)};
  r.location = {
    grid_value(rng, -50.0, 50.0, 2), grid_value(rng, -3.0, 3.0, 2), grid_value(rng, 0.0, 120.0, 2)};
  r.rotation_y = grid_value(rng, -3.14, 3.14, 2);
  if (with_score) {
    r.score = grid_value(rng, 0.0, 1.0, 4);
  }
  return r;
}

inline PointCloud random_cloud(std::mt19937_64 & rng, std::size_t n)
{
  std::uniform_real_distribution<float> xyz(-150.0f, 150.0f);
  std::uniform_real_distribution<float> intensity(0.0f, 1.0f);
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({xyz(rng), xyz(rng), xyz(rng), intensity(rng)});
  }
  return c;
}

inline CalibrationSet random_calibration(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> d(-1000.0, 1000.0);
  CalibrationSet c;
  for (auto & p : c.P) {
    p = Matrix34::NullaryExpr([&] { return d(rng); });
  }
  c.R0_rect = Eigen::Matrix3d::NullaryExpr([&] { return d(rng) / 1000.0; });
  c.Tr_velo_to_cam = Matrix34::NullaryExpr([&] { return d(rng) / 100.0; });
  c.Tr_imu_to_velo = Matrix34::NullaryExpr([&] { return d(rng) / 100.0; });
  return c;
}

/// True when the two sets agree to the 13 significant digits the text format keeps.
inline bool calib_close(const CalibrationSet & a, const CalibrationSet & b)
{
  const auto close = [](const auto & x, const auto & y) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double u = x.data()[i];
      const double v = y.data()[i];
      if (std::abs(u - v) > 1e-12 * std::max(1.0, std::abs(u))) {
        return false;
      }
    }
    return true;
  };
  for (std::size_t i = 0; i < 4; ++i) {
    if (!close(a.P[i], b.P[i])) {
      return false;
    }
  }
  return close(a.R0_rect, b.R0_rect) && close(a.Tr_velo_to_cam, b.Tr_velo_to_cam) &&
         close(a.Tr_imu_to_velo, b.Tr_imu_to_velo);
}

}  // namespace sotif_kitti::test

#endif  // RANDOM_RECORDS_HPP_
