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

#include "sotif_kitti/scenario.hpp"

#include "sotif_kitti/errors.hpp"
#include "sotif_kitti/hashing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace sotif_kitti
{

namespace
{

constexpr double kKmhToMs = 1.0 / 3.6;

void require(bool ok, const std::string & what)
{
  if (!ok) {
    throw ConfigError("scenario: " + what);
  }
}

VehicleState make_vehicle(int id, VehicleRole role, const VehicleModel & model)
{
  VehicleState v;
  v.id = id;
  v.role = role;
  v.model_name = model.name;
  v.box_dims = model.dims;
  return v;
}

double bumper_gap(const VehicleState & rear, const VehicleState & front)
{
  return front.s - rear.s - (front.box_dims.length + rear.box_dims.length) / 2.0;
}

bool shares_corridor(const VehicleState & a, const VehicleState & b)
{
  constexpr double kLateralMargin = 0.3;
  return std::abs(a.y - b.y) < (a.box_dims.width + b.box_dims.width) / 2.0 + kLateralMargin;
}

// Nearest vehicle ahead of `ego` that overlaps its driving corridor.
const VehicleState * find_lead(const std::vector<VehicleState> & vehicles)
{
  const VehicleState & ego = vehicles.front();
  const VehicleState * lead = nullptr;
  for (std::size_t i = 1; i < vehicles.size(); ++i) {
    const auto & v = vehicles[i];
    if (v.s > ego.s && shares_corridor(ego, v) && (lead == nullptr || v.s < lead->s)) {
      lead = &v;
    }
  }
  return lead;
}

double follower_accel(const ScenarioConfig & c, const std::vector<VehicleState> & vehicles)
{
  const VehicleState & ego = vehicles.front();
  const double set_speed = c.ego_initial_speed_kmh * kKmhToMs;
  double accel = c.speed_gain * (set_speed - ego.speed);
  if (const VehicleState * lead = find_lead(vehicles)) {
    const double desired = c.standstill_gap + c.headway * ego.speed;
    const double follow =
      c.gap_gain * (bumper_gap(ego, *lead) - desired) + c.speed_gain * (lead->speed - ego.speed);
    accel = std::min(accel, follow);
  }
  return std::clamp(accel, -c.max_decel, c.max_accel);
}

void check_no_overlap(const std::vector<VehicleState> & vehicles, std::size_t step)
{
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < vehicles.size(); ++j) {
      const auto a = bev_footprint(world_box(vehicles[i]));
      const auto b = bev_footprint(world_box(vehicles[j]));
      if (clip_convex(a, b).area() > 1e-9) {
        throw InfeasibleConfig(fmt::format(
          "vehicles {} and {} overlap at step {}", to_string(vehicles[i].role),
          to_string(vehicles[j].role), step));
      }
    }
  }
}

}  // namespace

void ScenarioConfig::validate() const
{
  require(lane_count >= 1, "lane_count must be >= 1");
  require(lane_width > 0.0, "lane_width must be > 0");
  require(ego_lane >= 1 && ego_lane <= lane_count, "ego_lane must be within 1..lane_count");
  require(
    ego_initial_speed_kmh >= 0.0 && fast_vehicle_speed_kmh >= 0.0 && slow_vehicle_speed_kmh >= 0.0,
    "speeds must be >= 0");
  require(
    fast_vehicle_speed_kmh >= slow_vehicle_speed_kmh,
    "fast_vehicle_speed_kmh must be >= slow_vehicle_speed_kmh");
  require(lane_change_duration > 0.0, "lane_change_duration must be > 0");
  require(headway > 0.0 && standstill_gap >= 0.0, "headway must be > 0 and standstill_gap >= 0");
  require(max_decel > 0.0 && max_accel > 0.0, "max_decel and max_accel must be > 0");
  require(gap_gain > 0.0 && speed_gain > 0.0, "controller gains must be > 0");
  require(sim_rate_hz > 0.0, "sim_rate_hz must be > 0");
  require(record_every >= 1, "record_every must be >= 1");
  require(total_recorded_frames >= 0 && total_recorded_frames <= 1000000,
    "total_recorded_frames must be within 0..1000000");
  require(test_frames >= 0 && val_frames >= 0, "split sizes must be >= 0");
  require(
    test_frames + val_frames == total_recorded_frames,
    fmt::format(
      "test_frames + val_frames ({} + {}) must equal total_recorded_frames ({})", test_frames,
      val_frames, total_recorded_frames));
}

std::size_t ScenarioConfig::step_count() const
{
  if (total_recorded_frames <= 0) {
    return 0;
  }
  return static_cast<std::size_t>(total_recorded_frames - 1) *
           static_cast<std::size_t>(record_every) + 1;
}

int ScenarioConfig::overtake_lane() const
{
  return ego_lane < lane_count ? ego_lane + 1 : ego_lane - 1;
}

const char * to_string(VehicleRole role)
{
  switch (role) {
    case VehicleRole::Ego:
      return "ego";
    case VehicleRole::Fast:
      return "fast";
    case VehicleRole::Slow:
      return "slow";
  }
  return "unknown";
}

double lane_center_y(const ScenarioConfig & config, double lane)
{
  return -(lane - 1.0) * config.lane_width;
}

Box3D world_box(const VehicleState & vehicle)
{
  Box3D box;
  box.frame = Frame::CarlaWorld;
  box.center = {vehicle.s, vehicle.y, vehicle.box_dims.height / 2.0};
  box.dims = vehicle.box_dims;
  box.yaw = vehicle.yaw;
  box.class_name = "Car";
  return box;
}

std::vector<SceneState> build_timeline(const ScenarioConfig & config)
{
  config.validate();
  const std::size_t steps = config.step_count();
  if (steps == 0) {
    return {};
  }
  if (config.lane_count < 2) {
    throw InfeasibleConfig("overtaking needs at least two lanes");
  }
  if (config.ego_to_fast_gap <= 0.0 || config.fast_to_slow_gap <= 0.0) {
    throw InfeasibleConfig("initial gaps must be positive (vehicles would overlap)");
  }
  if (config.overtake_trigger_gap >= config.fast_to_slow_gap) {
    throw InfeasibleConfig("overtake_trigger_gap must be smaller than fast_to_slow_gap");
  }

  const double dt = 1.0 / config.sim_rate_hz;
  const double ego_lane = config.ego_lane;
  const double target_lane = config.overtake_lane();

  std::vector<VehicleState> vehicles{
    make_vehicle(0, VehicleRole::Ego, kMercedesCoupe),
    make_vehicle(1, VehicleRole::Fast, kDodgeCharger),
    make_vehicle(2, VehicleRole::Slow, kDodgeCharger),
  };
  VehicleState & ego = vehicles[0];
  VehicleState & fast = vehicles[1];
  VehicleState & slow = vehicles[2];
  for (auto & v : vehicles) {
    v.lane = ego_lane;
    v.y = lane_center_y(config, ego_lane);
  }
  ego.speed = config.ego_initial_speed_kmh * kKmhToMs;
  fast.speed = config.fast_vehicle_speed_kmh * kKmhToMs;
  slow.speed = config.slow_vehicle_speed_kmh * kKmhToMs;
  ego.s = 0.0;
  fast.s = ego.s + (ego.box_dims.length + fast.box_dims.length) / 2.0 + config.ego_to_fast_gap;
  slow.s = fast.s + (fast.box_dims.length + slow.box_dims.length) / 2.0 + config.fast_to_slow_gap;

  std::optional<double> lane_change_start;
  std::vector<SceneState> timeline;
  timeline.reserve(steps);
  for (std::size_t step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * dt;

    if (!lane_change_start && bumper_gap(fast, slow) < config.overtake_trigger_gap) {
      lane_change_start = t;
    }
    double lateral_rate = 0.0;  // lanes per second
    if (lane_change_start) {
      const double T = config.lane_change_duration;
      const double tau = std::clamp(t - *lane_change_start, 0.0, T);
      const double delta = target_lane - ego_lane;
      fast.lane = ego_lane + delta * (1.0 - std::cos(std::numbers::pi * tau / T)) / 2.0;
      if (tau < T) {
        lateral_rate = delta * std::numbers::pi / (2.0 * T) * std::sin(std::numbers::pi * tau / T);
      }
    }
    fast.y = lane_center_y(config, fast.lane);
    const double lateral_speed = -lateral_rate * config.lane_width;
    fast.yaw = fast.speed > 0.0 ? std::atan2(lateral_speed, fast.speed) : 0.0;

    check_no_overlap(vehicles, step);
    timeline.push_back(SceneState{step, t, vehicles});

    const double accel = follower_accel(config, vehicles);
    ego.speed = std::max(0.0, ego.speed + accel * dt);
    for (auto & v : vehicles) {
      v.s += v.speed * dt;
    }
  }
  return timeline;
}

std::vector<std::size_t> recorded_steps(const ScenarioConfig & config)
{
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(std::max(0, config.total_recorded_frames)));
  for (int k = 0; k < config.total_recorded_frames; ++k) {
    out.push_back(static_cast<std::size_t>(k) * static_cast<std::size_t>(config.record_every));
  }
  return out;
}

std::string state_hash(const SceneState & state)
{
  std::string text = fmt::format("step={};time={:a}\n", state.step, state.time);
  for (const auto & v : state.vehicles) {
    text += fmt::format(
      "{}|{}|{}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}\n", v.id, to_string(v.role), v.model_name,
      v.lane, v.s, v.y, v.speed, v.yaw, v.box_dims.length, v.box_dims.width, v.box_dims.height);
  }
  return sha256_hex(text);
}

}  // namespace sotif_kitti
