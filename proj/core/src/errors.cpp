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

#include "sotif_kitti/errors.hpp"

#include <fmt/format.h>

namespace sotif_kitti
{

TruncatedFile::TruncatedFile(std::size_t byte_length)
: Error(fmt::format(
    "velodyne file length {} is not a multiple of 16 bytes", byte_length)),
  byte_length_(byte_length)
{
}

NonFiniteValue::NonFiniteValue(std::size_t point_index)
: Error(fmt::format("non-finite value in point {}", point_index)), point_index_(point_index)
{
}

FieldCountMismatch::FieldCountMismatch(std::size_t expected, std::size_t actual)
: Error(fmt::format("expected {} fields, found {}", expected, actual)),
  expected_(expected),
  actual_(actual)
{
}

NumericParse::NumericParse(std::size_t field_index, const std::string & token)
: Error(fmt::format("field {} is not a finite decimal number: '{}'", field_index, token)),
  field_index_(field_index)
{
}

RangeViolation::RangeViolation(std::size_t field_index, const std::string & what)
: Error(fmt::format("field {} out of range: {}", field_index, what)), field_index_(field_index)
{
}

MissingKey::MissingKey(std::string key)
: Error("calibration key missing: " + key), key_(std::move(key))
{
}

MatrixShape::MatrixShape(std::string key, std::size_t expected, std::size_t actual)
: Error(fmt::format("calibration key {} has {} values, expected {}", key, actual, expected)),
  key_(std::move(key))
{
}

const char * to_string(ViolationKind kind)
{
  switch (kind) {
    case ViolationKind::MissingDirectory:
      return "missing-directory";
    case ViolationKind::MissingSplitFile:
      return "missing-split-file";
    case ViolationKind::MissingFile:
      return "missing-file";
    case ViolationKind::OrphanFile:
      return "orphan-file";
    case ViolationKind::SplitOverlap:
      return "split-overlap";
    case ViolationKind::DuplicateId:
      return "duplicate-id";
    case ViolationKind::BadFrameId:
      return "bad-frame-id";
    case ViolationKind::NonMonotoneIds:
      return "non-monotone-ids";
    case ViolationKind::BadPngMagic:
      return "bad-png-magic";
    case ViolationKind::TruncatedVelodyne:
      return "truncated-velodyne";
    case ViolationKind::UnparsableLabel:
      return "unparsable-label";
    case ViolationKind::UnparsableCalib:
      return "unparsable-calib";
  }
  return "unknown";
}

std::string describe(const Violation & v)
{
  if (v.frame_id.empty()) {
    return fmt::format("[{}] {}", to_string(v.kind), v.detail);
  }
  return fmt::format("[{}] frame {}: {}", to_string(v.kind), v.frame_id, v.detail);
}

namespace
{

std::string summarize(const std::vector<Violation> & violations)
{
  std::string msg = fmt::format("dataset structure has {} violation(s)", violations.size());
  for (const auto & v : violations) {
    msg += "\n  " + describe(v);
  }
  return msg;
}

}  // namespace

StructureViolation::StructureViolation(std::vector<Violation> violations)
: Error(summarize(violations)), violations_(std::move(violations))
{
}

PredictionForUnknownFrame::PredictionForUnknownFrame(std::string frame_id)
: Error("prediction file for frame not in dataset: " + frame_id), frame_id_(std::move(frame_id))
{
}

DegenerateCloud::DegenerateCloud(std::size_t point_count)
: Error(fmt::format("cloud has {} points, at least 10 are needed for a ground fit", point_count))
{
}

}  // namespace sotif_kitti
