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

#include "sotif_kitti/hashing.hpp"

#include "sotif_kitti/dataset_index.hpp"
#include "sotif_kitti/errors.hpp"
#include "sotif_kitti/kitti_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <memory>
#include <vector>

namespace sotif_kitti
{

namespace
{

class Sha256
{
public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free)
  {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("cannot initialise SHA-256");
    }
  }

  void update(std::span<const std::byte> bytes)
  {
    if (EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()) != 1) {
      throw Error("SHA-256 update failed");
    }
  }

  void update(std::string_view text)
  {
    update(std::as_bytes(std::span<const char>(text.data(), text.size())));
  }

  std::string hex()
  {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len) != 1) {
      throw Error("SHA-256 final failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 0x0f]);
    }
    return out;
  }

private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::span<const std::byte> bytes)
{
  Sha256 h;
  h.update(bytes);
  return h.hex();
}

std::string sha256_hex(std::string_view text)
{
  Sha256 h;
  h.update(text);
  return h.hex();
}

std::string tree_hash(const std::filesystem::path & root)
{
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() != layout::kRunManifest) {
      files.push_back(std::filesystem::relative(entry.path(), root));
    }
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto & rel : files) {
    h.update(rel.generic_string());
    h.update(std::string_view("\0", 1));
    h.update(sha256_hex(read_file_bytes(root / rel)));
    h.update(std::string_view("\n", 1));
  }
  return h.hex();
}

}  // namespace sotif_kitti
