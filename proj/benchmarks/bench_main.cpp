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


#include <sotif_kitti/baseline_detector.hpp>
#include <sotif_kitti/box_geometry.hpp>
#include <sotif_kitti/evaluation.hpp>
#include <sotif_kitti/kitti_io.hpp>
#include <sotif_kitti/lidar_sim.hpp>
#include <sotif_kitti/scenario.hpp>
#include <sotif_kitti/weather.hpp>

#include <benchmark/benchmark.h>
#include <fmt/format.h>

#include <random>
#include <vector>

namespace sk = sotif_kitti;

namespace
{

sk::Box3D random_box(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> yaw(-3.14, 3.14);
  sk::Box3D b;
  b.frame = sk::Frame::KittiLidar;
  b.center = {20.0 + pos(rng), pos(rng), pos(rng) * 0.2};
  b.dims = {4.5 + pos(rng) * 0.3, 1.9 + pos(rng) * 0.1, 1.5 + pos(rng) * 0.1};
  b.yaw = yaw(rng);
  return b;
}

void BM_Iou3d(benchmark::State & state)
{
  std::mt19937_64 rng(1);
  std::vector<sk::Box3D> boxes;
  for (int i = 0; i < 256; ++i) {
    boxes.push_back(random_box(rng));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sk::iou_3d(boxes[i % 256], boxes[(i * 7 + 3) % 256]));
    ++i;
  }
}
BENCHMARK(BM_Iou3d);

const sk::SceneState & first_scene()
{
  static const std::vector<sk::SceneState> timeline = [] {
    sk::ScenarioConfig c;
    c.total_recorded_frames = 1;
    c.test_frames = 1;
    c.val_frames = 0;
    return sk::build_timeline(c);
  }();
  return timeline.front();
}

void BM_SimulateScan(benchmark::State & state)
{
  const sk::LidarConfig lidar;
  const auto & table = sk::builtin_weather_presets();
  const auto & preset = table[static_cast<std::size_t>(state.range(0))];
  const auto boxes = sk::sensor_boxes(first_scene(), lidar);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sk::simulate_scan(boxes, lidar, preset, seed++));
  }
  state.SetLabel(preset.name);
}
BENCHMARK(BM_SimulateScan)->Arg(0)->Arg(13)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State & state)
{
  const sk::LidarConfig lidar;
  const auto & preset = sk::builtin_weather_presets().front();
  const sk::PointCloud cloud = sk::simulate_lidar(first_scene(), lidar, preset, 7);
  const sk::DetectorConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sk::detect(cloud, config));
  }
}
BENCHMARK(BM_Detect)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State & state)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> jitter(0.0, 0.1);
  std::uniform_real_distribution<double> score(0.1, 1.0);
  sk::FrameLabels gt;
  sk::FrameLabels pred;
  for (int f = 0; f < state.range(0); ++f) {
    const std::string id = fmt::format("{:06d}", f);
    for (int k = 0; k < 3; ++k) {
      sk::LabelRecord g;
      g.bbox = {100.0 + 150.0 * k, 150, 200.0 + 150.0 * k, 210};
      g.dims = {1.5, 1.9, 4.5};
      g.location = {-4.0 + 4.0 * k, 1.6, 15.0 + 8.0 * k};
      gt[id].push_back(g);
      sk::LabelRecord p = g;
      p.location.x() += jitter(rng);
      p.location.z() += jitter(rng);
      p.score = score(rng);
      pred[id].push_back(p);
    }
  }
  const sk::EvalConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sk::evaluate(gt, pred, config));
  }
}
BENCHMARK(BM_Evaluate)->Arg(55)->Arg(547)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
