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

#ifndef SOTIF_KITTI__ATOMIC_FILE_HPP_
#define SOTIF_KITTI__ATOMIC_FILE_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>

namespace sotif_kitti
{

/// Writes through a sibling temp file and renames it into place, so readers never
/// observe a partially written file. Parent directories are created on demand.
void write_file_atomic(const std::filesystem::path & path, std::span<const std::byte> bytes);
void write_file_atomic(const std::filesystem::path & path, std::string_view text);

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__ATOMIC_FILE_HPP_
