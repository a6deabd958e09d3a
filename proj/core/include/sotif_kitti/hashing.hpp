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

#ifndef SOTIF_KITTI__HASHING_HPP_
#define SOTIF_KITTI__HASHING_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace sotif_kitti
{

std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);

/// Hash over every regular file below `root` (sorted relative paths and contents).
/// Files named run_manifest.json are skipped since they carry wall-clock timestamps.
std::string tree_hash(const std::filesystem::path & root);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__HASHING_HPP_
