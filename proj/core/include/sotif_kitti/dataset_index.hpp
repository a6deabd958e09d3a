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

#ifndef SOTIF_KITTI__DATASET_INDEX_HPP_
#define SOTIF_KITTI__DATASET_INDEX_HPP_

#include "sotif_kitti/errors.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sotif_kitti
{

namespace layout
{
inline constexpr const char * kVelodyneDir = "velodyne";
inline constexpr const char * kLabelDir = "label_2";
inline constexpr const char * kCalibDir = "calib";
inline constexpr const char * kImageDir = "image_2";
inline constexpr const char * kImageSetsDir = "ImageSets";
inline constexpr const char * kTestSplit = "test.txt";
inline constexpr const char * kValSplit = "val.txt";
inline constexpr const char * kManifest = "manifest.json";
inline constexpr const char * kRunManifest = "run_manifest.json";
}  // namespace layout

enum class Split { Test, Val };

const char * to_string(Split split);

struct DatasetIndex
{
  std::filesystem::path root;
  std::vector<std::string> frame_ids;  // sorted ascending
  std::map<std::string, Split> split_of;

  std::vector<std::string> ids_in(Split split) const;

  std::filesystem::path velodyne_path(const std::string & id) const;
  std::filesystem::path label_path(const std::string & id) const;
  std::filesystem::path calib_path(const std::string & id) const;
  std::filesystem::path image_path(const std::string & id) const;
};

/// Collects every structural violation of the KITTI tree under `root`. `index`
/// receives whatever could be indexed, even when violations are returned.
std::vector<Violation> find_violations(const std::filesystem::path & root, DatasetIndex & index);

/// Returns the index iff the tree is well formed, otherwise throws
/// StructureViolation carrying the full violation list.
DatasetIndex validate_dataset(const std::filesystem::path & root);

void write_split_files(
  const std::filesystem::path & root, std::span<const std::string> test_ids,
  std::span<const std::string> val_ids);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__DATASET_INDEX_HPP_
