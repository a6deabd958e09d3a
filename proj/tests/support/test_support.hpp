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


#ifndef TEST_SUPPORT_HPP_
#define TEST_SUPPORT_HPP_

#include <sotif_kitti/kitti_io.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <sys/wait.h>

namespace sotif_kitti::test
{

inline std::filesystem::path source_dir()
{
  return SOTIF_KITTI_SOURCE_DIR;
}

inline std::filesystem::path fixture_dir()
{
  return source_dir() / "tests" / "fixtures" / "eval";
}

inline std::filesystem::path golden_dir()
{
  return source_dir() / "tests" / "golden";
}

/// Scratch directory removed on destruction.
class TempDir
{
public:
  TempDir()
  {
    std::random_device rd;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("sotif_kitti_test_" + std::to_string(stamp) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;

  const std::filesystem::path & path() const { return path_; }
  std::filesystem::path operator/(const std::string & name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// Runs a shell command and returns its exit status (-1 when it did not exit normally).
inline int run_command(const std::string & command)
{
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) {
    return -1;
  }
  return WEXITSTATUS(status);
}

inline std::string quote(const std::filesystem::path & p)
{
  return "'" + p.string() + "'";
}

#ifdef SOTIF_KITTI_CLI
inline std::string cli_path()
{
  return SOTIF_KITTI_CLI;
}
#endif

}  // namespace sotif_kitti::test

#endif  // TEST_SUPPORT_HPP_
