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

#ifndef SOTIF_KITTI__SCENARIO_HPP_
#define SOTIF_KITTI__SCENARIO_HPP_

#include "sotif_kitti/box_geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sotif_kitti
{

/// Highway overtake: the ego follows a fast vehicle, which changes lanes to pass
/// a slow vehicle ahead in the ego lane; the ego then slows down behind it.
/// Gaps are bumper-to-bumper distances. Lanes are numbered from 1 and grow to the left.
struct ScenarioConfig
{
  int lane_count{4};
  double lane_width{3.5};
  int ego_lane{3};

  double ego_initial_speed_kmh{90.0};
  double fast_vehicle_speed_kmh{90.0};
  double slow_vehicle_speed_kmh{60.0};

  double ego_to_fast_gap{15.0};
  double fast_to_slow_gap{120.0};
  double overtake_trigger_gap{30.0};
  double lane_change_duration{3.0};

  // Constant-time-headway follower.
  double headway{1.8};
  double standstill_gap{2.0};
  double max_decel{4.0};
  double max_accel{2.0};
  double gap_gain{0.2};
  double speed_gain{0.6};

  double sim_rate_hz{10.0};
  int record_every{5};
  int total_recorded_frames{547};
  int test_frames{492};
  int val_frames{55};
  std::uint64_t seed{20240117};

  /// Throws ConfigError naming the violated constraint.
  void validate() const;

  /// Simulation steps needed to record every frame.
  std::size_t step_count() const;

  int overtake_lane() const;

  friend bool operator==(const ScenarioConfig &, const ScenarioConfig &) = default;
};

enum class VehicleRole { Ego, Fast, Slow };

const char * to_string(VehicleRole role);

struct VehicleState
{
  int id{0};
  VehicleRole role{VehicleRole::Ego};
  std::string model_name;
  double lane{1.0};     // continuous lane coordinate
  double s{0.0};        // longitudinal position, m
  double y{0.0};        // lateral position in the left-handed world frame (right positive), m
  double speed{0.0};    // m/s
  double yaw{0.0};      // heading, left-handed world convention, rad
  BoxDims box_dims;
};

struct SceneState
{
  std::size_t step{0};
  double time{0.0};
  std::vector<VehicleState> vehicles;  // ego first

  const VehicleState & ego() const { return vehicles.front(); }
};

struct VehicleModel
{
  const char * name;
  BoxDims dims;
};

inline constexpr VehicleModel kDodgeCharger{"DodgeCharger", {5.0, 1.95, 1.45}};
inline constexpr VehicleModel kMercedesCoupe{"MercedesCoupe", {4.7, 1.85, 1.40}};

/// Lateral world position of a (continuous) lane coordinate.
double lane_center_y(const ScenarioConfig & config, double lane);

/// Deterministic kinematic rollout at sim_rate_hz, one state per step. Throws
/// InfeasibleConfig on initial overlap, an unreachable trigger, or a collision.
std::vector<SceneState> build_timeline(const ScenarioConfig & config);

/// Steps at which frames are recorded: 0, record_every, 2 * record_every, ...
std::vector<std::size_t> recorded_steps(const ScenarioConfig & config);

/// Vehicle box in the left-handed world frame (ground at z = 0).
Box3D world_box(const VehicleState & vehicle);

/// SHA-256 over the exact bit patterns of the state.
std::string state_hash(const SceneState & state);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__SCENARIO_HPP_
