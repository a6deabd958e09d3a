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

#include "sotif_kitti/config.hpp"

#include "sotif_kitti/errors.hpp"
#include "sotif_kitti/hashing.hpp"
#include "sotif_kitti/kitti_io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include <cmath>
#include <limits>
#include <set>

namespace sotif_kitti
{

namespace
{

class Section
{
public:
  Section(const toml::table * table, std::string name) : table_(table), name_(std::move(name)) {}

  void number(const char * key, double & out)
  {
    const toml::node * n = take(key);
    if (n == nullptr) {
      return;
    }
    if (const auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
      out = *v;
      return;
    }
    fail(key, "a number");
  }

  template <typename Int>
  void integer(const char * key, Int & out)
  {
    const toml::node * n = take(key);
    if (n == nullptr) {
      return;
    }
    if (!n->is_integer()) {
      fail(key, "an integer");
    }
    const std::int64_t v = *n->value<std::int64_t>();
    if constexpr (std::is_unsigned_v<Int>) {
      if (v < 0) {
        fail(key, "a non-negative integer");
      }
    } else {
      if (v < std::numeric_limits<Int>::min() || v > std::numeric_limits<Int>::max()) {
        fail(key, "an integer in range");
      }
    }
    out = static_cast<Int>(v);
  }

  void string(const char * key, std::string & out)
  {
    const toml::node * n = take(key);
    if (n == nullptr) {
      return;
    }
    if (!n->is_string()) {
      fail(key, "a string");
    }
    out = *n->value<std::string>();
  }

  void number_list(const char * key, std::vector<double> & out)
  {
    const toml::node * n = take(key);
    if (n == nullptr) {
      return;
    }
    const toml::array * arr = n->as_array();
    if (arr == nullptr) {
      fail(key, "an array of numbers");
    }
    out.clear();
    for (const auto & item : *arr) {
      if (!(item.is_floating_point() || item.is_integer())) {
        fail(key, "an array of numbers");
      }
      out.push_back(*item.value<double>());
    }
  }

  void string_list(const char * key, std::vector<std::string> & out)
  {
    const toml::node * n = take(key);
    if (n == nullptr) {
      return;
    }
    const toml::array * arr = n->as_array();
    if (arr == nullptr) {
      fail(key, "an array of strings");
    }
    out.clear();
    for (const auto & item : *arr) {
      if (!item.is_string()) {
        fail(key, "an array of strings");
      }
      out.push_back(*item.value<std::string>());
    }
  }

  const toml::table * subtable(const char * key)
  {
    const toml::node * n = take(key);
    if (n == nullptr) {
      return nullptr;
    }
    if (!n->is_table()) {
      fail(key, "a table");
    }
    return n->as_table();
  }

  /// Throws for keys that were never asked for.
  void finish() const
  {
    if (table_ == nullptr) {
      return;
    }
    for (const auto & [key, value] : *table_) {
      if (seen_.count(std::string(key.str())) == 0) {
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", key.str(), name_));
      }
    }
  }

private:
  const toml::node * take(const char * key)
  {
    seen_.insert(key);
    return table_ == nullptr ? nullptr : table_->get(key);
  }

  [[noreturn]] void fail(const char * key, const char * expected) const
  {
    throw ConfigError(fmt::format("[{}] {} must be {}", name_, key, expected));
  }

  const toml::table * table_;
  std::string name_;
  std::set<std::string> seen_;
};

const toml::table * top_section(const toml::table & root, const char * name)
{
  const toml::node * n = root.get(name);
  if (n == nullptr) {
    return nullptr;
  }
  if (!n->is_table()) {
    throw ConfigError(fmt::format("[{}] must be a table", name));
  }
  return n->as_table();
}

void read_scenario(const toml::table * t, ScenarioConfig & s)
{
  Section sec(t, "scenario");
  sec.integer("lane_count", s.lane_count);
  sec.number("lane_width", s.lane_width);
  sec.integer("ego_lane", s.ego_lane);
  sec.number("ego_initial_speed_kmh", s.ego_initial_speed_kmh);
  sec.number("fast_vehicle_speed_kmh", s.fast_vehicle_speed_kmh);
  sec.number("slow_vehicle_speed_kmh", s.slow_vehicle_speed_kmh);
  sec.number("ego_to_fast_gap", s.ego_to_fast_gap);
  sec.number("fast_to_slow_gap", s.fast_to_slow_gap);
  sec.number("overtake_trigger_gap", s.overtake_trigger_gap);
  sec.number("lane_change_duration", s.lane_change_duration);
  sec.number("headway", s.headway);
  sec.number("standstill_gap", s.standstill_gap);
  sec.number("max_decel", s.max_decel);
  sec.number("max_accel", s.max_accel);
  sec.number("gap_gain", s.gap_gain);
  sec.number("speed_gain", s.speed_gain);
  sec.number("sim_rate_hz", s.sim_rate_hz);
  sec.integer("record_every", s.record_every);
  sec.integer("total_recorded_frames", s.total_recorded_frames);
  sec.integer("test_frames", s.test_frames);
  sec.integer("val_frames", s.val_frames);
  sec.integer("seed", s.seed);
  sec.finish();
}

void read_lidar(const toml::table * t, LidarConfig & l)
{
  Section sec(t, "lidar");
  sec.integer("channels", l.channels);
  sec.number("vertical_fov_min_deg", l.vertical_fov_min_deg);
  sec.number("vertical_fov_max_deg", l.vertical_fov_max_deg);
  sec.number("horizontal_resolution_deg", l.horizontal_resolution_deg);
  sec.number("max_range", l.max_range);
  sec.number("mount_height", l.mount_height);
  sec.finish();
}

void read_weather(const toml::table * t, ToolkitConfig & c)
{
  Section sec(t, "weather");
  sec.string_list("schedule", c.weather_schedule);
  if (const toml::table * presets = sec.subtable("presets")) {
    for (const auto & [key, node] : *presets) {
      const std::string name(key.str());
      auto it = std::find_if(c.weather_table.begin(), c.weather_table.end(), [&](const auto & w) {
        return w.name == name;
      });
      if (it == c.weather_table.end()) {
        throw ConfigError("unknown weather preset: " + name);
      }
      if (!node.is_table()) {
        throw ConfigError(fmt::format("[weather.presets.{}] must be a table", name));
      }
      Section p(node.as_table(), "weather.presets." + name);
      p.number("precipitation", it->precipitation);
      p.number("wetness", it->wetness);
      p.number("cloudiness", it->cloudiness);
      p.number("sun_altitude_deg", it->sun_altitude_deg);
      p.number("range_noise_sigma", it->range_noise_sigma);
      p.number("dropout_base", it->dropout_base);
      p.number("attenuation_coeff", it->attenuation_coeff);
      p.number("intensity_scale", it->intensity_scale);
      p.finish();
    }
  }
  sec.finish();
}

void read_detector(const toml::table * t, DetectorConfig & d)
{
  Section sec(t, "detector");
  sec.number("ground_z_band", d.ground_z_band);
  sec.number("cluster_radius", d.cluster_radius);
  sec.integer("min_cluster_points", d.min_cluster_points);
  sec.number("score_norm", d.score_norm);
  sec.number("ground_quantile", d.ground_quantile);
  sec.number("prior_length", d.prior_length);
  sec.number("prior_width", d.prior_width);
  sec.number("max_face_width", d.max_face_width);
  sec.number("max_extent", d.max_extent);
  sec.finish();
}

Bucket bucket_from_string(const std::string & s)
{
  if (s == "easy") {
    return Bucket::Easy;
  }
  if (s == "moderate") {
    return Bucket::Moderate;
  }
  if (s == "hard") {
    return Bucket::Hard;
  }
  throw ConfigError("[eval] difficulties accepts easy, moderate, hard (got '" + s + "')");
}

std::string bucket_key(Bucket b)
{
  switch (b) {
    case Bucket::Easy:
      return "easy";
    case Bucket::Moderate:
      return "moderate";
    case Bucket::Hard:
      return "hard";
    case Bucket::All:
      break;
  }
  return "all";
}

std::string iou_mode_key(IouMode m)
{
  return m == IouMode::ThreeD ? "3d" : "bev";
}

void read_eval(const toml::table * t, EvalConfig & e)
{
  Section sec(t, "eval");
  sec.number_list("ap_thresholds", e.ap_thresholds);
  sec.number_list("recall_thresholds", e.recall_thresholds);
  std::string mode = iou_mode_key(e.iou_mode);
  sec.string("iou_mode", mode);
  e.iou_mode = iou_mode_from_string(mode);
  std::vector<std::string> levels;
  for (const Bucket b : e.difficulties) {
    levels.push_back(bucket_key(b));
  }
  sec.string_list("difficulties", levels);
  e.difficulties.clear();
  for (const auto & s : levels) {
    e.difficulties.push_back(bucket_from_string(s));
  }
  std::string interp = to_string(e.interpolation);
  sec.string("interpolation", interp);
  e.interpolation = interpolation_from_string(interp);
  sec.finish();
}

std::string toml_float(double v)
{
  std::string s = fmt::format("{}", v);
  if (s.find_first_of(".eEin") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string toml_float_list(const std::vector<double> & values)
{
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += (i ? ", " : "") + toml_float(values[i]);
  }
  return s + "]";
}

std::string toml_string_list(const std::vector<std::string> & values)
{
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += fmt::format("{}\"{}\"", i ? ", " : "", values[i]);
  }
  return s + "]";
}

}  // namespace

void ToolkitConfig::validate() const
{
  scenario.validate();
  lidar.validate();
  detector.validate();
  eval.validate();
  std::set<std::string> names;
  for (const auto & w : weather_table) {
    w.validate();
    names.insert(w.name);
  }
  for (const auto & name : weather_schedule) {
    if (names.count(name) == 0) {
      throw ConfigError("weather schedule names unknown preset: " + name);
    }
  }
}

std::vector<WeatherPreset> ToolkitConfig::per_frame_weather() const
{
  std::vector<WeatherPreset> selected;
  if (weather_schedule.empty()) {
    selected = weather_table;
  } else {
    for (const auto & name : weather_schedule) {
      selected.push_back(find_preset(weather_table, name));
    }
  }
  return even_schedule(
    selected, static_cast<std::size_t>(std::max(0, scenario.total_recorded_frames)));
}

std::string ToolkitConfig::canonical_json() const
{
  using nlohmann::ordered_json;
  const auto & s = scenario;
  ordered_json doc;
  doc["scenario"] = {
    {"lane_count", s.lane_count},
    {"lane_width", s.lane_width},
    {"ego_lane", s.ego_lane},
    {"ego_initial_speed_kmh", s.ego_initial_speed_kmh},
    {"fast_vehicle_speed_kmh", s.fast_vehicle_speed_kmh},
    {"slow_vehicle_speed_kmh", s.slow_vehicle_speed_kmh},
    {"ego_to_fast_gap", s.ego_to_fast_gap},
    {"fast_to_slow_gap", s.fast_to_slow_gap},
    {"overtake_trigger_gap", s.overtake_trigger_gap},
    {"lane_change_duration", s.lane_change_duration},
    {"headway", s.headway},
    {"standstill_gap", s.standstill_gap},
    {"max_decel", s.max_decel},
    {"max_accel", s.max_accel},
    {"gap_gain", s.gap_gain},
    {"speed_gain", s.speed_gain},
    {"sim_rate_hz", s.sim_rate_hz},
    {"record_every", s.record_every},
    {"total_recorded_frames", s.total_recorded_frames},
    {"test_frames", s.test_frames},
    {"val_frames", s.val_frames},
    {"seed", s.seed}};
  doc["lidar"] = {
    {"channels", lidar.channels},
    {"vertical_fov_min_deg", lidar.vertical_fov_min_deg},
    {"vertical_fov_max_deg", lidar.vertical_fov_max_deg},
    {"horizontal_resolution_deg", lidar.horizontal_resolution_deg},
    {"max_range", lidar.max_range},
    {"mount_height", lidar.mount_height}};
  ordered_json presets = ordered_json::array();
  for (const auto & w : weather_table) {
    presets.push_back(
      {{"name", w.name},
       {"time_of_day", to_string(w.time_of_day)},
       {"condition", to_string(w.condition)},
       {"precipitation", w.precipitation},
       {"wetness", w.wetness},
       {"cloudiness", w.cloudiness},
       {"sun_altitude_deg", w.sun_altitude_deg},
       {"range_noise_sigma", w.range_noise_sigma},
       {"dropout_base", w.dropout_base},
       {"attenuation_coeff", w.attenuation_coeff},
       {"intensity_scale", w.intensity_scale}});
  }
  doc["weather"] = {{"schedule", weather_schedule}, {"presets", presets}};
  const auto & d = detector;
  doc["detector"] = {
    {"ground_z_band", d.ground_z_band},
    {"cluster_radius", d.cluster_radius},
    {"min_cluster_points", d.min_cluster_points},
    {"score_norm", d.score_norm},
    {"ground_quantile", d.ground_quantile},
    {"prior_length", d.prior_length},
    {"prior_width", d.prior_width},
    {"max_face_width", d.max_face_width},
    {"max_extent", d.max_extent}};
  std::vector<std::string> levels;
  for (const Bucket b : eval.difficulties) {
    levels.push_back(bucket_key(b));
  }
  doc["eval"] = {
    {"ap_thresholds", eval.ap_thresholds},
    {"recall_thresholds", eval.recall_thresholds},
    {"iou_mode", iou_mode_key(eval.iou_mode)},
    {"difficulties", levels},
    {"interpolation", to_string(eval.interpolation)}};
  return doc.dump();
}

std::string ToolkitConfig::digest() const
{
  return sha256_hex(canonical_json());
}

ToolkitConfig parse_config(std::string_view toml_text, std::string_view source)
{
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error & e) {
    throw ConfigError(fmt::format(
      "{}:{}:{}: {}", source, e.source().begin.line, e.source().begin.column, e.description()));
  }
  static const std::set<std::string> kSections{"scenario", "lidar", "weather", "detector", "eval"};
  for (const auto & [key, value] : root) {
    if (kSections.count(std::string(key.str())) == 0) {
      throw ConfigError(fmt::format("unknown section [{}]", key.str()));
    }
  }
  ToolkitConfig c;
  read_scenario(top_section(root, "scenario"), c.scenario);
  read_lidar(top_section(root, "lidar"), c.lidar);
  read_weather(top_section(root, "weather"), c);
  read_detector(top_section(root, "detector"), c.detector);
  read_eval(top_section(root, "eval"), c.eval);
  c.validate();
  return c;
}

ToolkitConfig load_config(const std::filesystem::path & path)
{
  std::string text;
  try {
    text = read_file_text(path);
  } catch (const IoFailure & e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.string());
}

std::string render_config(const ToolkitConfig & config)
{
  const auto & s = config.scenario;
  std::string out;
  auto line = [&out](std::string_view key, const std::string & value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "[scenario]\n";
  line("lane_count", std::to_string(s.lane_count));
  line("lane_width", toml_float(s.lane_width));
  line("ego_lane", std::to_string(s.ego_lane));
  line("ego_initial_speed_kmh", toml_float(s.ego_initial_speed_kmh));
  line("fast_vehicle_speed_kmh", toml_float(s.fast_vehicle_speed_kmh));
  line("slow_vehicle_speed_kmh", toml_float(s.slow_vehicle_speed_kmh));
  line("ego_to_fast_gap", toml_float(s.ego_to_fast_gap));
  line("fast_to_slow_gap", toml_float(s.fast_to_slow_gap));
  line("overtake_trigger_gap", toml_float(s.overtake_trigger_gap));
  line("lane_change_duration", toml_float(s.lane_change_duration));
  line("headway", toml_float(s.headway));
  line("standstill_gap", toml_float(s.standstill_gap));
  line("max_decel", toml_float(s.max_decel));
  line("max_accel", toml_float(s.max_accel));
  line("gap_gain", toml_float(s.gap_gain));
  line("speed_gain", toml_float(s.speed_gain));
  line("sim_rate_hz", toml_float(s.sim_rate_hz));
  line("record_every", std::to_string(s.record_every));
  line("total_recorded_frames", std::to_string(s.total_recorded_frames));
  line("test_frames", std::to_string(s.test_frames));
  line("val_frames", std::to_string(s.val_frames));
  line("seed", std::to_string(s.seed));

  const auto & l = config.lidar;
  out += "\n[lidar]\n";
  line("channels", std::to_string(l.channels));
  line("vertical_fov_min_deg", toml_float(l.vertical_fov_min_deg));
  line("vertical_fov_max_deg", toml_float(l.vertical_fov_max_deg));
  line("horizontal_resolution_deg", toml_float(l.horizontal_resolution_deg));
  line("max_range", toml_float(l.max_range));
  line("mount_height", toml_float(l.mount_height));

  out += "\n[weather]\n";
  line("schedule", toml_string_list(config.weather_schedule));
  for (const auto & w : config.weather_table) {
    out += fmt::format("\n[weather.presets.{}]\n", w.name);
    line("precipitation", toml_float(w.precipitation));
    line("wetness", toml_float(w.wetness));
    line("cloudiness", toml_float(w.cloudiness));
    line("sun_altitude_deg", toml_float(w.sun_altitude_deg));
    line("range_noise_sigma", toml_float(w.range_noise_sigma));
    line("dropout_base", toml_float(w.dropout_base));
    line("attenuation_coeff", toml_float(w.attenuation_coeff));
    line("intensity_scale", toml_float(w.intensity_scale));
  }

  const auto & d = config.detector;
  out += "\n[detector]\n";
  line("ground_z_band", toml_float(d.ground_z_band));
  line("cluster_radius", toml_float(d.cluster_radius));
  line("min_cluster_points", std::to_string(d.min_cluster_points));
  line("score_norm", toml_float(d.score_norm));
  line("ground_quantile", toml_float(d.ground_quantile));
  line("prior_length", toml_float(d.prior_length));
  line("prior_width", toml_float(d.prior_width));
  line("max_face_width", toml_float(d.max_face_width));
  line("max_extent", toml_float(d.max_extent));

  std::vector<std::string> levels;
  for (const Bucket b : config.eval.difficulties) {
    levels.push_back(bucket_key(b));
  }
  out += "\n[eval]\n";
  line("ap_thresholds", toml_float_list(config.eval.ap_thresholds));
  line("recall_thresholds", toml_float_list(config.eval.recall_thresholds));
  line("iou_mode", fmt::format("\"{}\"", iou_mode_key(config.eval.iou_mode)));
  line("difficulties", toml_string_list(levels));
  line("interpolation", fmt::format("\"{}\"", to_string(config.eval.interpolation)));
  return out;
}

}  // namespace sotif_kitti
