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

#include "sotif_kitti/dataset_index.hpp"

#include "sotif_kitti/atomic_file.hpp"
#include "sotif_kitti/kitti_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

namespace fs = std::filesystem;

namespace sotif_kitti
{

namespace
{

struct DataFolder
{
  const char * dir;
  const char * extension;
};

constexpr std::array<DataFolder, 4> kFolders{{
  {layout::kVelodyneDir, ".bin"},
  {layout::kLabelDir, ".txt"},
  {layout::kCalibDir, ".txt"},
  {layout::kImageDir, ".png"},
}};

constexpr std::array<unsigned char, 8> kPngMagic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::string trim(const std::string & s)
{
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool has_png_magic(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  std::array<char, 8> head{};
  in.read(head.data(), head.size());
  if (in.gcount() != static_cast<std::streamsize>(head.size())) {
    return false;
  }
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (static_cast<unsigned char>(head[i]) != kPngMagic[i]) {
      return false;
    }
  }
  return true;
}

void read_split(
  const fs::path & root, Split split, const char * file_name, DatasetIndex & index,
  std::vector<Violation> & violations)
{
  const fs::path path = root / layout::kImageSetsDir / file_name;
  if (!fs::is_regular_file(path)) {
    violations.push_back(
      {ViolationKind::MissingSplitFile, "", std::string(layout::kImageSetsDir) + "/" + file_name});
    return;
  }
  std::ifstream in(path);
  std::string line;
  std::string previous;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    const std::string id = trim(line);
    if (id.empty()) {
      continue;
    }
    if (!is_valid_frame_id(id)) {
      violations.push_back(
        {ViolationKind::BadFrameId, id, std::string("malformed id in ") + file_name});
      continue;
    }
    if (!seen.insert(id).second) {
      violations.push_back(
        {ViolationKind::DuplicateId, id, std::string("listed twice in ") + file_name});
      continue;
    }
    if (!previous.empty() && id <= previous) {
      violations.push_back(
        {ViolationKind::NonMonotoneIds, id,
         std::string("follows ") + previous + " in " + file_name});
    }
    previous = id;
    const auto [it, inserted] = index.split_of.emplace(id, split);
    if (!inserted && it->second != split) {
      violations.push_back({ViolationKind::SplitOverlap, id, "listed in both test and val"});
    }
  }
}

}  // namespace

const char * to_string(Split split)
{
  return split == Split::Test ? "test" : "val";
}

std::vector<std::string> DatasetIndex::ids_in(Split split) const
{
  std::vector<std::string> out;
  for (const auto & id : frame_ids) {
    if (split_of.at(id) == split) {
      out.push_back(id);
    }
  }
  return out;
}

fs::path DatasetIndex::velodyne_path(const std::string & id) const
{
  return root / layout::kVelodyneDir / (id + ".bin");
}

fs::path DatasetIndex::label_path(const std::string & id) const
{
  return root / layout::kLabelDir / (id + ".txt");
}

fs::path DatasetIndex::calib_path(const std::string & id) const
{
  return root / layout::kCalibDir / (id + ".txt");
}

fs::path DatasetIndex::image_path(const std::string & id) const
{
  return root / layout::kImageDir / (id + ".png");
}

std::vector<Violation> find_violations(const fs::path & root, DatasetIndex & index)
{
  std::vector<Violation> violations;
  index = DatasetIndex{};
  index.root = root;
  if (!fs::is_directory(root)) {
    violations.push_back({ViolationKind::MissingDirectory, "", root.string()});
    return violations;
  }

  read_split(root, Split::Test, layout::kTestSplit, index, violations);
  read_split(root, Split::Val, layout::kValSplit, index, violations);
  for (const auto & [id, split] : index.split_of) {
    index.frame_ids.push_back(id);
  }

  for (const auto & folder : kFolders) {
    const fs::path dir = root / folder.dir;
    if (!fs::is_directory(dir)) {
      violations.push_back({ViolationKind::MissingDirectory, "", folder.dir});
      continue;
    }
    std::set<std::string> present;
    std::vector<fs::path> entries;
    for (const auto & entry : fs::directory_iterator(dir)) {
      entries.push_back(entry.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto & path : entries) {
      const std::string stem = path.stem().string();
      const std::string rel = std::string(folder.dir) + "/" + path.filename().string();
      if (!fs::is_regular_file(path) || path.extension() != folder.extension ||
          !is_valid_frame_id(stem))
      {
        violations.push_back({ViolationKind::OrphanFile, "", rel + " is not a frame file"});
        continue;
      }
      if (!index.split_of.contains(stem)) {
        violations.push_back({ViolationKind::OrphanFile, stem, rel + " is not in any split"});
        continue;
      }
      present.insert(stem);
    }
    for (const auto & id : index.frame_ids) {
      if (!present.contains(id)) {
        violations.push_back(
          {ViolationKind::MissingFile, id,
           std::string(folder.dir) + "/" + id + folder.extension + " is missing"});
        continue;
      }
      const fs::path path = dir / (id + folder.extension);
      const std::string folder_name = folder.dir;
      if (folder_name == layout::kVelodyneDir) {
        if (fs::file_size(path) % kVelodyneStride != 0) {
          violations.push_back(
            {ViolationKind::TruncatedVelodyne, id, "length is not a multiple of 16 bytes"});
        }
      } else if (folder_name == layout::kLabelDir) {
        try {
          (void)read_label_file(path, false);
        } catch (const Error & e) {
          violations.push_back({ViolationKind::UnparsableLabel, id, e.what()});
        }
      } else if (folder_name == layout::kCalibDir) {
        try {
          (void)read_calib(path);
        } catch (const Error & e) {
          violations.push_back({ViolationKind::UnparsableCalib, id, e.what()});
        }
      } else if (!has_png_magic(path)) {
        violations.push_back({ViolationKind::BadPngMagic, id, "image is not a PNG file"});
      }
    }
  }
  return violations;
}

DatasetIndex validate_dataset(const fs::path & root)
{
  DatasetIndex index;
  auto violations = find_violations(root, index);
  if (!violations.empty()) {
    throw StructureViolation(std::move(violations));
  }
  return index;
}

void write_split_files(
  const fs::path & root, std::span<const std::string> test_ids, std::span<const std::string> val_ids)
{
  auto join = [](std::span<const std::string> ids) {
    std::string text;
    for (const auto & id : ids) {
      text += id;
      text += '\n';
    }
    return text;
  };
  write_file_atomic(root / layout::kImageSetsDir / layout::kTestSplit, join(test_ids));
  write_file_atomic(root / layout::kImageSetsDir / layout::kValSplit, join(val_ids));
}

}  // namespace sotif_kitti
