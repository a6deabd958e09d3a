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

#include "sotif_kitti/dataset_writer.hpp"

#include "parallel.hpp"
#include "schematic_render.hpp"
#include "sotif_kitti/atomic_file.hpp"
#include "sotif_kitti/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fmt/format.h>

namespace fs = std::filesystem;

namespace sotif_kitti
{

std::uint64_t frame_seed(std::uint64_t base_seed, std::size_t frame_index)
{
  std::uint64_t x = base_seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(frame_index) + 1));
  x = (x ^ (x >> 33)) * 0xff51afd7ed558ccdULL;
  x = (x ^ (x >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  return x ^ (x >> 33);
}

std::vector<LabelRecord> build_labels(
  const SceneState & state, const PointCloud & cloud, const LidarConfig & lidar,
  const GenerationOptions & options)
{
  const std::vector<Box3D> boxes = sensor_boxes(state, lidar);
  std::vector<LabelRecord> labels;
  for (const auto & box : boxes) {
    const Visibility vis = visibility_among(boxes, lidar, box, options.min_label_returns);
    if (!vis.visible) {
      continue;
    }
    const Box3D cam = lidar_to_camera(box, options.calib);
    ImageProjection proj;
    try {
      proj = project_to_image(cam, options.calib.P[2], options.image);
    } catch (const BehindCamera &) {
      continue;
    }
    if (proj.truncation >= 1.0 || !(proj.bbox.width() > 0.0) || !(proj.bbox.height() > 0.0)) {
      continue;
    }
    LabelRecord rec;
    rec.class_name = "Car";
    rec.truncation = std::clamp(proj.truncation, 0.0, 1.0);
    rec.occlusion = vis.occlusion;
    rec.bbox = proj.bbox;
    set_label_geometry(cam, rec);
    // Round through the text form so the check below sees what lands on disk.
    const LabelRecord stored = parse_label_line(serialize_label(rec), false);
    const Box3D stored_box = camera_to_lidar(box_from_label(stored), options.calib);
    std::size_t inside = 0;
    for (const auto & p : cloud.points) {
      if (contains(stored_box, Eigen::Vector3d(p.x, p.y, p.z), options.label_margin)) {
        ++inside;
      }
    }
    if (inside >= options.min_label_returns) {
      labels.push_back(stored);
    }
  }
  return labels;
}

FrameArtifacts render_frame(
  const SceneState & state, const LidarConfig & lidar, const WeatherPreset & weather,
  std::uint64_t seed, const GenerationOptions & options)
{
  FrameArtifacts out;
  const std::vector<Box3D> boxes = sensor_boxes(state, lidar);
  out.cloud = simulate_scan(boxes, lidar, weather, seed);
  out.labels = build_labels(state, out.cloud, lidar, options);
  out.png = render_schematic(out.cloud, boxes, options.image);
  return out;
}

DatasetIndex generate_dataset(
  const ScenarioConfig & config, const LidarConfig & lidar,
  std::span<const WeatherPreset> per_frame_weather, const fs::path & out_root,
  const GenerationOptions & options)
{
  config.validate();
  lidar.validate();
  const auto frames = static_cast<std::size_t>(config.total_recorded_frames);
  if (per_frame_weather.size() != frames) {
    throw ConfigError(fmt::format(
      "weather schedule has {} entries but total_recorded_frames is {}", per_frame_weather.size(),
      frames));
  }
  for (const auto & w : per_frame_weather) {
    w.validate();
  }
  const std::vector<SceneState> timeline = build_timeline(config);
  const std::vector<std::size_t> steps = recorded_steps(config);

  std::error_code ec;
  for (const char * dir :
       {layout::kVelodyneDir, layout::kLabelDir, layout::kCalibDir, layout::kImageDir,
        layout::kImageSetsDir})
  {
    fs::create_directories(out_root / dir, ec);
    if (ec) {
      throw IoFailure(fmt::format("cannot create {}: {}", (out_root / dir).string(), ec.message()));
    }
  }

  DatasetIndex paths;
  paths.root = out_root;
  std::vector<ManifestEntry> manifest(frames);
  parallel_for(frames, options.jobs, [&](std::size_t i) {
    const SceneState & state = timeline.at(steps[i]);
    const std::string id = format_frame_id(i);
    const FrameArtifacts art =
      render_frame(state, lidar, per_frame_weather[i], frame_seed(config.seed, i), options);
    write_velodyne(art.cloud, paths.velodyne_path(id));
    write_label_file(art.labels, paths.label_path(id));
    write_calib(options.calib, paths.calib_path(id));
    write_file_atomic(paths.image_path(id), art.png);
    manifest[i] = {per_frame_weather[i].name, state_hash(state), state.step};
  });

  std::vector<std::string> test_ids;
  std::vector<std::string> val_ids;
  for (std::size_t i = 0; i < frames; ++i) {
    (i < static_cast<std::size_t>(config.test_frames) ? test_ids : val_ids)
      .push_back(format_frame_id(i));
  }
  write_split_files(out_root, test_ids, val_ids);

  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < frames; ++i) {
    doc[format_frame_id(i)] = {
      {"weather", manifest[i].weather},
      {"state_hash", manifest[i].state_hash},
      {"sim_step", manifest[i].sim_step}};
  }
  write_file_atomic(out_root / layout::kManifest, doc.dump(2) + "\n");

  return validate_dataset(out_root);
}

std::vector<std::pair<std::string, ManifestEntry>> read_manifest(const fs::path & root)
{
  const std::string text = read_file_text(root / layout::kManifest);
  std::vector<std::pair<std::string, ManifestEntry>> out;
  try {
    const auto doc = nlohmann::ordered_json::parse(text);
    for (const auto & [id, entry] : doc.items()) {
      out.emplace_back(
        id, ManifestEntry{
              entry.at("weather").get<std::string>(), entry.at("state_hash").get<std::string>(),
              entry.at("sim_step").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception & e) {
    throw IoFailure(fmt::format("malformed {}: {}", layout::kManifest, e.what()));
  }
  return out;
}

}  // namespace sotif_kitti
