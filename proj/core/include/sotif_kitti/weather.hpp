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

#ifndef SOTIF_KITTI__WEATHER_HPP_
#define SOTIF_KITTI__WEATHER_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sotif_kitti
{

enum class TimeOfDay { Noon, Night, Sunset };

/// Weather rows ordered by increasing severity for the LiDAR.
enum class Condition { Clear, Cloudy, Wet, WetCloudy, SoftRain, MidRain, HardRain };

inline constexpr std::array<Condition, 7> kSeverityOrder{
  Condition::Clear, Condition::Cloudy,   Condition::Wet,     Condition::WetCloudy,
  Condition::SoftRain, Condition::MidRain, Condition::HardRain};

inline constexpr std::array<TimeOfDay, 3> kTimesOfDay{
  TimeOfDay::Noon, TimeOfDay::Night, TimeOfDay::Sunset};

const char * to_string(TimeOfDay t);
const char * to_string(Condition c);

/// A named weather condition and the sensor corruption it induces.
struct WeatherPreset
{
  std::string name;
  TimeOfDay time_of_day{TimeOfDay::Noon};
  Condition condition{Condition::Clear};

  double precipitation{0.0};  // [0, 1]
  double wetness{0.0};        // [0, 1]
  double cloudiness{0.0};     // [0, 1]
  double sun_altitude_deg{0.0};

  double range_noise_sigma{0.0};  // m
  double dropout_base{0.0};       // probability
  double attenuation_coeff{0.0};  // 1/m
  double intensity_scale{1.0};    // [0, 1]

  /// Throws ConfigError naming the first violated bound.
  void validate() const;

  friend bool operator==(const WeatherPreset &, const WeatherPreset &) = default;
};

/// Preset identifier, e.g. "HardRainNoon". Mid rain uses "MidRainy" for noon and
/// night but "MidRain" for sunset, matching the simulator's preset names.
std::string preset_name(Condition condition, TimeOfDay time_of_day);

/// The 21 built-in presets in table order: Noon column, then Night, then Sunset,
/// each as Clear, Cloudy, Wet, WetCloudy, MidRain, HardRain, SoftRain.
const std::vector<WeatherPreset> & builtin_weather_presets();

/// Throws ConfigError for unknown names.
const WeatherPreset & find_preset(std::span<const WeatherPreset> table, std::string_view name);

/// Assigns frames to presets in contiguous blocks of ceil(frames / presets.size()).
std::vector<WeatherPreset> even_schedule(std::span<const WeatherPreset> presets, std::size_t frames);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__WEATHER_HPP_
