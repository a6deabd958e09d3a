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

#ifndef SOTIF_KITTI__CONFIG_HPP_
#define SOTIF_KITTI__CONFIG_HPP_

#include "sotif_kitti/baseline_detector.hpp"
#include "sotif_kitti/evaluation.hpp"
#include "sotif_kitti/lidar_sim.hpp"
#include "sotif_kitti/scenario.hpp"
#include "sotif_kitti/weather.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sotif_kitti
{

/// Everything a run depends on. Sections: [scenario], [lidar], [weather] with
/// optional [weather.presets.<Name>] tables, [detector], [eval].
struct ToolkitConfig
{
  ScenarioConfig scenario;
  LidarConfig lidar;
  std::vector<WeatherPreset> weather_table{builtin_weather_presets()};
  // Presets the frames are spread over, in order; empty means the whole table.
  std::vector<std::string> weather_schedule;
  DetectorConfig detector;
  EvalConfig eval;

  /// Throws ConfigError.
  void validate() const;

  /// One preset per recorded frame.
  std::vector<WeatherPreset> per_frame_weather() const;

  /// Key-sorted-by-section JSON with every field spelled out.
  std::string canonical_json() const;

  /// SHA-256 of canonical_json().
  std::string digest() const;

  friend bool operator==(const ToolkitConfig &, const ToolkitConfig &) = default;
};

/// Keys that are absent keep their defaults; unknown sections or keys, wrong
/// types and out-of-range values throw ConfigError.
ToolkitConfig parse_config(std::string_view toml_text, std::string_view source = "<config>");

ToolkitConfig load_config(const std::filesystem::path & path);

/// TOML text that parses back to `config`.
std::string render_config(const ToolkitConfig & config);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__CONFIG_HPP_
