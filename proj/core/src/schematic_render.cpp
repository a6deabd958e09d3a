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

#include "schematic_render.hpp"

#include "sotif_kitti/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdlib>

namespace sotif_kitti
{

namespace
{

constexpr double kPixelsPerMeter = 10.0;
constexpr double kRearMargin = 4.0;

void append_bytes(png_structp png, png_bytep data, png_size_t length)
{
  auto * out = static_cast<std::vector<std::byte> *>(png_get_io_ptr(png));
  const auto * first = reinterpret_cast<const std::byte *>(data);
  out->insert(out->end(), first, first + length);
}

void flush_nothing(png_structp) {}

void png_warning_sink(png_structp, png_const_charp) {}

// Bresenham line.
void draw_line(RgbImage & img, int u0, int v0, int u1, int v1, std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
  const int du = std::abs(u1 - u0);
  const int dv = -std::abs(v1 - v0);
  const int su = u0 < u1 ? 1 : -1;
  const int sv = v0 < v1 ? 1 : -1;
  int err = du + dv;
  for (int guard = 0; guard < 100000; ++guard) {
    img.set(u0, v0, r, g, b);
    if (u0 == u1 && v0 == v1) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dv) {
      err += dv;
      u0 += su;
    }
    if (e2 <= du) {
      err += du;
      v0 += sv;
    }
  }
}

struct PixelMap
{
  int height;

  int u(double x) const { return static_cast<int>(std::floor((x + kRearMargin) * kPixelsPerMeter)); }
  int v(double y) const
  {
    return static_cast<int>(std::floor(height / 2.0 - y * kPixelsPerMeter));
  }
};

}  // namespace

RgbImage::RgbImage(int w, int h, std::uint8_t gray)
: width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, gray)
{
}

void RgbImage::set(int u, int v, std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
  if (u < 0 || v < 0 || u >= width || v >= height) {
    return;
  }
  const std::size_t i = (static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u)) * 3;
  pixels[i] = r;
  pixels[i + 1] = g;
  pixels[i + 2] = b;
}

std::vector<std::byte> encode_png(const RgbImage & image)
{
  if (image.width <= 0 || image.height <= 0) {
    throw IoFailure("png encoding failed: empty image");
  }
  png_structp png =
    png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_sink);
  if (png == nullptr) {
    throw IoFailure("png encoding failed: cannot allocate writer");
  }
  png_infop info = png_create_info_struct(png);
  std::vector<std::byte> out;
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoFailure("png encoding failed: cannot allocate info");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int row = 0; row < image.height; ++row) {
    rows[static_cast<std::size_t>(row)] = const_cast<png_bytep>(
      image.pixels.data() +
      static_cast<std::size_t>(row) * static_cast<std::size_t>(image.width) * 3);
  }
  // libpng reports errors by longjmp; nothing with a destructor is created below.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoFailure("png encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, flush_nothing);
  png_set_IHDR(
    png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
    PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::vector<std::byte> render_schematic(
  const PointCloud & cloud, std::span<const Box3D> lidar_boxes, const ImageSize & size)
{
  RgbImage img(size.width, size.height, 24);
  const PixelMap map{size.height};

  // Lane-ish reference lines every 5 m lateral, range ticks every 10 m.
  for (int y = -15; y <= 15; y += 5) {
    draw_line(img, 0, map.v(y), size.width - 1, map.v(y), 48, 48, 48);
  }
  for (int x = 0; x <= 120; x += 10) {
    draw_line(img, map.u(x), 0, map.u(x), size.height - 1, 40, 40, 40);
  }

  for (const auto & p : cloud.points) {
    const auto level = static_cast<std::uint8_t>(80 + 175 * std::clamp(p.intensity, 0.0F, 1.0F));
    img.set(map.u(p.x), map.v(p.y), level, level, level);
  }

  for (const auto & box : lidar_boxes) {
    const ConvexPolygon2D footprint = bev_footprint(box);
    const auto & vs = footprint.vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const auto & a = vs[i];
      const auto & b = vs[(i + 1) % vs.size()];
      draw_line(img, map.u(a.x()), map.v(a.y()), map.u(b.x()), map.v(b.y()), 40, 220, 60);
    }
  }

  // Ego marker.
  draw_line(img, map.u(-1.0), map.v(0.0), map.u(1.0), map.v(0.0), 230, 60, 40);
  draw_line(img, map.u(0.0), map.v(-1.0), map.u(0.0), map.v(1.0), 230, 60, 40);
  return encode_png(img);
}

}  // namespace sotif_kitti
