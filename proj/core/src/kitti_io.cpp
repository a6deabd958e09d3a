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

#include "sotif_kitti/kitti_io.hpp"

#include "sotif_kitti/atomic_file.hpp"
#include "sotif_kitti/errors.hpp"

#include <Eigen/LU>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>

namespace sotif_kitti
{

namespace
{

float load_le_float(const std::byte * p)
{
  const std::uint32_t bits = std::to_integer<std::uint32_t>(p[0]) |
                             (std::to_integer<std::uint32_t>(p[1]) << 8) |
                             (std::to_integer<std::uint32_t>(p[2]) << 16) |
                             (std::to_integer<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void store_le_float(float value, std::byte * out)
{
  const auto bits = std::bit_cast<std::uint32_t>(value);
  out[0] = static_cast<std::byte>(bits & 0xffu);
  out[1] = static_cast<std::byte>((bits >> 8) & 0xffu);
  out[2] = static_cast<std::byte>((bits >> 16) & 0xffu);
  out[3] = static_cast<std::byte>((bits >> 24) & 0xffu);
}

bool finite_point(const LidarPoint & p)
{
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) &&
         std::isfinite(p.intensity);
}

std::vector<std::string_view> split_ws(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
      ++i;
    }
    if (i > start) {
      out.push_back(line.substr(start, i - start));
    }
  }
  return out;
}

double parse_double(std::string_view token, std::size_t field_index)
{
  double value = 0.0;
  const auto * end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
    throw NumericParse(field_index, std::string(token));
  }
  return value;
}

int parse_int(std::string_view token, std::size_t field_index)
{
  int value = 0;
  const auto * end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw NumericParse(field_index, std::string(token));
  }
  return value;
}

// Fixed-point rendering without a negative zero.
std::string fixed(double value, int decimals)
{
  std::string s = fmt::format("{:.{}f}", value, decimals);
  if (!s.empty() && s.front() == '-' &&
      std::all_of(s.begin() + 1, s.end(), [](char c) { return c == '0' || c == '.'; }))
  {
    s.erase(s.begin());
  }
  return s;
}

constexpr double kAngleSlack = 0.01;  // covers 2-decimal rounding of +-pi

void check_angle(double value, std::size_t field_index)
{
  if (std::abs(value) > std::numbers::pi + kAngleSlack) {
    throw RangeViolation(field_index, fmt::format("angle {} outside [-pi, pi]", value));
  }
}

}  // namespace

std::vector<std::byte> encode_velodyne(const PointCloud & cloud)
{
  std::vector<std::byte> out(cloud.size() * kVelodyneStride);
  std::byte * cursor = out.data();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto & p = cloud.points[i];
    if (!finite_point(p)) {
      throw NonFiniteValue(i);
    }
    store_le_float(p.x, cursor);
    store_le_float(p.y, cursor + 4);
    store_le_float(p.z, cursor + 8);
    store_le_float(p.intensity, cursor + 12);
    cursor += kVelodyneStride;
  }
  return out;
}

PointCloud decode_velodyne(std::span<const std::byte> bytes)
{
  if (bytes.size() % kVelodyneStride != 0) {
    throw TruncatedFile(bytes.size());
  }
  PointCloud cloud;
  const std::size_t n = bytes.size() / kVelodyneStride;
  cloud.points.resize(n);
  const std::byte * cursor = bytes.data();
  for (std::size_t i = 0; i < n; ++i) {
    LidarPoint & p = cloud.points[i];
    p.x = load_le_float(cursor);
    p.y = load_le_float(cursor + 4);
    p.z = load_le_float(cursor + 8);
    p.intensity = load_le_float(cursor + 12);
    if (!finite_point(p)) {
      throw NonFiniteValue(i);
    }
    cursor += kVelodyneStride;
  }
  return cloud;
}

PointCloud read_velodyne(const std::filesystem::path & path)
{
  const auto bytes = read_file_bytes(path);
  return decode_velodyne(bytes);
}

void write_velodyne(const PointCloud & cloud, const std::filesystem::path & path)
{
  write_file_atomic(path, encode_velodyne(cloud));
}

LabelRecord parse_label_line(std::string_view line, bool expect_score)
{
  const auto tokens = split_ws(line);
  const std::size_t expected = expect_score ? kPredictionFieldCount : kLabelFieldCount;
  if (tokens.size() != expected) {
    throw FieldCountMismatch(expected, tokens.size());
  }

  LabelRecord rec;
  rec.class_name = std::string(tokens[0]);
  rec.truncation = parse_double(tokens[1], 1);
  rec.occlusion = parse_int(tokens[2], 2);
  rec.alpha = parse_double(tokens[3], 3);
  rec.bbox = {
    parse_double(tokens[4], 4), parse_double(tokens[5], 5), parse_double(tokens[6], 6),
    parse_double(tokens[7], 7)};
  rec.dims = {parse_double(tokens[8], 8), parse_double(tokens[9], 9), parse_double(tokens[10], 10)};
  rec.location = {
    parse_double(tokens[11], 11), parse_double(tokens[12], 12), parse_double(tokens[13], 13)};
  rec.rotation_y = parse_double(tokens[14], 14);
  if (expect_score) {
    rec.score = parse_double(tokens[15], 15);
  }

  if (rec.class_name == "DontCare") {
    return rec;
  }
  const bool sentinel_ok = expect_score;
  if (!(rec.truncation >= 0.0 && rec.truncation <= 1.0) &&
      !(sentinel_ok && rec.truncation == -1.0))
  {
    throw RangeViolation(1, fmt::format("truncation {} outside [0, 1]", rec.truncation));
  }
  if (!(rec.occlusion >= 0 && rec.occlusion <= 3) && !(sentinel_ok && rec.occlusion == -1)) {
    throw RangeViolation(2, fmt::format("occlusion {} not in {{0,1,2,3}}", rec.occlusion));
  }
  check_angle(rec.alpha, 3);
  const double dims[] = {rec.dims.height, rec.dims.width, rec.dims.length};
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(dims[k] > 0.0)) {
      throw RangeViolation(8 + k, fmt::format("dimension {} must be positive", dims[k]));
    }
  }
  check_angle(rec.rotation_y, 14);
  return rec;
}

std::string serialize_label(const LabelRecord & rec)
{
  constexpr int d = kGeometryDecimals;
  std::string line = fmt::format(
    "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {}", rec.class_name, fixed(rec.truncation, d),
    rec.occlusion, fixed(rec.alpha, d), fixed(rec.bbox.left, d), fixed(rec.bbox.top, d),
    fixed(rec.bbox.right, d), fixed(rec.bbox.bottom, d), fixed(rec.dims.height, d),
    fixed(rec.dims.width, d), fixed(rec.dims.length, d), fixed(rec.location.x(), d),
    fixed(rec.location.y(), d), fixed(rec.location.z(), d), fixed(rec.rotation_y, d));
  if (rec.score) {
    line += ' ';
    line += fixed(*rec.score, kScoreDecimals);
  }
  return line;
}

std::vector<LabelRecord> parse_label_text(std::string_view text, bool expect_score)
{
  std::vector<LabelRecord> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      nl = text.size();
    }
    const auto line = text.substr(pos, nl - pos);
    if (!split_ws(line).empty()) {
      out.push_back(parse_label_line(line, expect_score));
    }
    pos = nl + 1;
  }
  return out;
}

std::string serialize_label_text(std::span<const LabelRecord> records)
{
  std::string out;
  for (const auto & rec : records) {
    out += serialize_label(rec);
    out += '\n';
  }
  return out;
}

std::vector<LabelRecord> read_label_file(const std::filesystem::path & path, bool expect_score)
{
  return parse_label_text(read_file_text(path), expect_score);
}

void write_label_file(std::span<const LabelRecord> records, const std::filesystem::path & path)
{
  write_file_atomic(path, serialize_label_text(records));
}

// ---- calibration -------------------------------------------------------------

namespace
{

struct CalibKey
{
  const char * name;
  std::size_t count;
};

constexpr std::array<CalibKey, 7> kCalibKeys{{
  {"P0", 12},
  {"P1", 12},
  {"P2", 12},
  {"P3", 12},
  {"R0_rect", 9},
  {"Tr_velo_to_cam", 12},
  {"Tr_imu_to_velo", 12},
}};

template <typename Matrix>
void fill_row_major(Matrix & m, const std::vector<double> & values)
{
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = values[static_cast<std::size_t>(r * m.cols() + c)];
    }
  }
}

template <typename Matrix>
std::string format_row_major(const char * key, const Matrix & m)
{
  std::string line = key;
  line += ':';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      line += fmt::format(" {:.12e}", m(r, c));
    }
  }
  line += '\n';
  return line;
}

bool orthonormal(const Eigen::Matrix3d & r, double tolerance)
{
  return ((r * r.transpose()) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tolerance;
}

}  // namespace

CalibrationSet CalibrationSet::default_calibration()
{
  CalibrationSet c;
  Eigen::Matrix3d k;
  k << 721.5377, 0.0, 609.5593, 0.0, 721.5377, 172.854, 0.0, 0.0, 1.0;
  const std::array<Eigen::Vector3d, 4> offsets{
    Eigen::Vector3d{0.0, 0.0, 0.0},
    Eigen::Vector3d{-387.5744, 0.0, 0.0},
    Eigen::Vector3d{44.85728, 0.2163791, 0.002745884},
    Eigen::Vector3d{-337.2877, 2.369057, 0.004915215},
  };
  for (std::size_t i = 0; i < 4; ++i) {
    c.P[i].leftCols<3>() = k;
    c.P[i].col(3) = offsets[i];
  }
  c.R0_rect.setIdentity();
  // LiDAR x forward / y left / z up -> camera x right / y down / z forward.
  c.Tr_velo_to_cam << 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, -0.08, 1.0, 0.0, 0.0, -0.27;
  c.Tr_imu_to_velo.leftCols<3>().setIdentity();
  c.Tr_imu_to_velo.col(3) = Eigen::Vector3d{-0.8086759, 0.3195559, -0.7997231};
  return c;
}

std::vector<std::string> CalibrationSet::invariant_violations(double tolerance) const
{
  std::vector<std::string> out;
  if (!orthonormal(Tr_velo_to_cam.leftCols<3>(), tolerance)) {
    out.emplace_back("Tr_velo_to_cam rotation is not orthonormal");
  }
  if (!orthonormal(Tr_imu_to_velo.leftCols<3>(), tolerance)) {
    out.emplace_back("Tr_imu_to_velo rotation is not orthonormal");
  }
  if (!orthonormal(R0_rect, tolerance) || std::abs(R0_rect.determinant() - 1.0) > tolerance) {
    out.emplace_back("R0_rect is not a rotation matrix");
  }
  return out;
}

bool operator==(const CalibrationSet & a, const CalibrationSet & b)
{
  for (std::size_t i = 0; i < 4; ++i) {
    if (a.P[i] != b.P[i]) {
      return false;
    }
  }
  return a.R0_rect == b.R0_rect && a.Tr_velo_to_cam == b.Tr_velo_to_cam &&
         a.Tr_imu_to_velo == b.Tr_imu_to_velo;
}

CalibrationSet parse_calib(std::string_view text)
{
  std::map<std::string, std::vector<double>, std::less<>> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      nl = text.size();
    }
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      continue;
    }
    const auto key_tokens = split_ws(line.substr(0, colon));
    if (key_tokens.size() != 1) {
      continue;
    }
    const auto tokens = split_ws(line.substr(colon + 1));
    std::vector<double> row;
    row.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      row.push_back(parse_double(tokens[i], i));
    }
    values.insert_or_assign(std::string(key_tokens.front()), std::move(row));
  }

  for (const auto & key : kCalibKeys) {
    const auto it = values.find(key.name);
    if (it == values.end()) {
      throw MissingKey(key.name);
    }
    if (it->second.size() != key.count) {
      throw MatrixShape(key.name, key.count, it->second.size());
    }
  }

  CalibrationSet c;
  for (std::size_t i = 0; i < 4; ++i) {
    fill_row_major(c.P[i], values.find(kCalibKeys[i].name)->second);
  }
  fill_row_major(c.R0_rect, values.find("R0_rect")->second);
  fill_row_major(c.Tr_velo_to_cam, values.find("Tr_velo_to_cam")->second);
  fill_row_major(c.Tr_imu_to_velo, values.find("Tr_imu_to_velo")->second);
  return c;
}

std::string serialize_calib(const CalibrationSet & calib)
{
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    out += format_row_major(kCalibKeys[i].name, calib.P[i]);
  }
  out += format_row_major("R0_rect", calib.R0_rect);
  out += format_row_major("Tr_velo_to_cam", calib.Tr_velo_to_cam);
  out += format_row_major("Tr_imu_to_velo", calib.Tr_imu_to_velo);
  return out;
}

CalibrationSet read_calib(const std::filesystem::path & path)
{
  return parse_calib(read_file_text(path));
}

void write_calib(const CalibrationSet & calib, const std::filesystem::path & path)
{
  write_file_atomic(path, serialize_calib(calib));
}

// ---- misc --------------------------------------------------------------------

std::string format_frame_id(std::size_t index)
{
  if (index > 999999) {
    throw std::out_of_range(fmt::format("frame index {} does not fit 6 digits", index));
  }
  return fmt::format("{:06d}", index);
}

bool is_valid_frame_id(std::string_view id)
{
  return id.size() == static_cast<std::size_t>(kFrameIdWidth) &&
         std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoFailure("cannot open " + path.string());
  }
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) {
    throw IoFailure("cannot size " + path.string());
  }
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char *>(bytes.data()), size);
  if (!in && !bytes.empty()) {
    throw IoFailure("read failed for " + path.string());
  }
  return bytes;
}

std::string read_file_text(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoFailure("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sotif_kitti
