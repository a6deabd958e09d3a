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

#include "sotif_kitti/weather.hpp"

#include "sotif_kitti/errors.hpp"

#include <cmath>

namespace sotif_kitti
{

namespace
{

struct ConditionParams
{
  Condition condition;
  double precipitation;
  double wetness;
  double cloudiness;
  double range_noise_sigma;
  double dropout_base;
  double attenuation_coeff;
  double intensity_scale;
};

// Sensor parameters are monotone along kSeverityOrder.
constexpr std::array<ConditionParams, 7> kConditionTable{{
  {Condition::Clear, 0.0, 0.0, 0.05, 0.010, 0.00, 0.0000, 1.00},
  {Condition::Cloudy, 0.0, 0.0, 0.60, 0.010, 0.02, 0.0005, 0.95},
  {Condition::Wet, 0.0, 0.5, 0.05, 0.015, 0.05, 0.0010, 0.85},
  {Condition::WetCloudy, 0.0, 0.5, 0.60, 0.020, 0.08, 0.0015, 0.80},
  {Condition::SoftRain, 0.3, 0.6, 0.30, 0.020, 0.10, 0.0030, 0.70},
  {Condition::MidRain, 0.6, 0.8, 0.60, 0.030, 0.20, 0.0060, 0.55},
  {Condition::HardRain, 1.0, 1.0, 1.00, 0.050, 0.35, 0.0100, 0.40},
}};

// Row order of the preset table.
constexpr std::array<Condition, 7> kTableRows{
  Condition::Clear,     Condition::Cloudy,  Condition::Wet,      Condition::WetCloudy,
  Condition::MidRain,   Condition::HardRain, Condition::SoftRain};

double sun_altitude(TimeOfDay t)
{
  switch (t) {
    case TimeOfDay::Noon:
      return 45.0;
    case TimeOfDay::Night:
      return -90.0;
    case TimeOfDay::Sunset:
      return 15.0;
  }
  return 0.0;
}

double time_intensity_factor(TimeOfDay t)
{
  switch (t) {
    case TimeOfDay::Noon:
      return 1.0;
    case TimeOfDay::Night:
      return 0.8;
    case TimeOfDay::Sunset:
      return 0.9;
  }
  return 1.0;
}

bool is_fraction(double v)
{
  return v >= 0.0 && v <= 1.0;
}

}  // namespace

const char * to_string(TimeOfDay t)
{
  switch (t) {
    case TimeOfDay::Noon:
      return "Noon";
    case TimeOfDay::Night:
      return "Night";
    case TimeOfDay::Sunset:
      return "Sunset";
  }
  return "unknown";
}

const char * to_string(Condition c)
{
  switch (c) {
    case Condition::Clear:
      return "Clear";
    case Condition::Cloudy:
      return "Cloudy";
    case Condition::Wet:
      return "Wet";
    case Condition::WetCloudy:
      return "WetCloudy";
    case Condition::SoftRain:
      return "SoftRain";
    case Condition::MidRain:
      return "MidRain";
    case Condition::HardRain:
      return "HardRain";
  }
  return "unknown";
}

void WeatherPreset::validate() const
{
  const std::pair<const char *, double> fractions[] = {
    {"precipitation", precipitation}, {"wetness", wetness},           {"cloudiness", cloudiness},
    {"dropout_base", dropout_base},   {"intensity_scale", intensity_scale}};
  for (const auto & [field, value] : fractions) {
    if (!is_fraction(value)) {
      throw ConfigError("weather preset " + name + ": " + field + " must lie in [0, 1]");
    }
  }
  if (!(range_noise_sigma >= 0.0) || !std::isfinite(range_noise_sigma)) {
    throw ConfigError("weather preset " + name + ": range_noise_sigma must be >= 0");
  }
  if (!(attenuation_coeff >= 0.0) || !std::isfinite(attenuation_coeff)) {
    throw ConfigError("weather preset " + name + ": attenuation_coeff must be >= 0");
  }
}

std::string preset_name(Condition condition, TimeOfDay time_of_day)
{
  std::string row = to_string(condition);
  if (condition == Condition::MidRain && time_of_day != TimeOfDay::Sunset) {
    row = "MidRainy";
  }
  return row + to_string(time_of_day);
}

const std::vector<WeatherPreset> & builtin_weather_presets()
{
  static const std::vector<WeatherPreset> presets = [] {
    std::vector<WeatherPreset> out;
    for (const TimeOfDay t : kTimesOfDay) {
      for (const Condition c : kTableRows) {
        const auto & p = kConditionTable[static_cast<std::size_t>(c)];
        WeatherPreset w;
        w.name = preset_name(c, t);
        w.time_of_day = t;
        w.condition = c;
        w.precipitation = p.precipitation;
        w.wetness = p.wetness;
        w.cloudiness = p.cloudiness;
        w.sun_altitude_deg = sun_altitude(t);
        w.range_noise_sigma = p.range_noise_sigma;
        w.dropout_base = p.dropout_base;
        w.attenuation_coeff = p.attenuation_coeff;
        // Kept to 6 decimals.
        w.intensity_scale = std::round(p.intensity_scale * time_intensity_factor(t) * 1e6) / 1e6;
        out.push_back(std::move(w));
      }
    }
    return out;
  }();
  return presets;
}

const WeatherPreset & find_preset(std::span<const WeatherPreset> table, std::string_view name)
{
  for (const auto & p : table) {
    if (p.name == name) {
      return p;
    }
  }
  throw ConfigError("unknown weather preset: " + std::string(name));
}

std::vector<WeatherPreset> even_schedule(std::span<const WeatherPreset> presets, std::size_t frames)
{
  if (presets.empty()) {
    if (frames == 0) {
      return {};
    }
    throw ConfigError("weather schedule needs at least one preset");
  }
  const std::size_t block = (frames + presets.size() - 1) / presets.size();
  std::vector<WeatherPreset> out;
  out.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    out.push_back(presets[i / block]);
  }
  return out;
}

}  // namespace sotif_kitti
