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

#include "sotif_kitti/atomic_file.hpp"

#include "sotif_kitti/errors.hpp"

#include <atomic>
#include <fstream>
#include <string>
#include <system_error>
#include <thread>

namespace sotif_kitti
{

namespace
{

std::filesystem::path temp_sibling(const std::filesystem::path & path)
{
  static std::atomic<unsigned long long> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  auto name = path.filename().string();
  name += ".tmp." + std::to_string(tid) + "." + std::to_string(counter.fetch_add(1));
  return path.parent_path() / name;
}

}  // namespace

void write_file_atomic(const std::filesystem::path & path, std::span<const std::byte> bytes)
{
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoFailure("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
  }
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoFailure("cannot open " + tmp.string() + " for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoFailure("write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoFailure("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

void write_file_atomic(const std::filesystem::path & path, std::string_view text)
{
  write_file_atomic(path, std::as_bytes(std::span<const char>(text.data(), text.size())));
}

}  // namespace sotif_kitti
