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

#ifndef SCHEMATIC_RENDER_HPP_
#define SCHEMATIC_RENDER_HPP_

#include "sotif_kitti/box_geometry.hpp"
#include "sotif_kitti/kitti_io.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sotif_kitti
{

/// 8-bit RGB raster, row-major.
struct RgbImage
{
  int width{0};
  int height{0};
  std::vector<std::uint8_t> pixels;

  RgbImage(int w, int h, std::uint8_t gray);
  void set(int u, int v, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

/// PNG with no time or text chunks, so identical rasters give identical bytes.
std::vector<std::byte> encode_png(const RgbImage & image);

/// Bird's-eye wireframe: sensor-frame points and box outlines, x forward to the right.
std::vector<std::byte> render_schematic(
  const PointCloud & cloud, std::span<const Box3D> lidar_boxes, const ImageSize & size);

}  // namespace sotif_kitti

#endif  // SCHEMATIC_RENDER_HPP_
