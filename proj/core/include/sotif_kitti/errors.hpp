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

#ifndef SOTIF_KITTI__ERRORS_HPP_
#define SOTIF_KITTI__ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sotif_kitti
{

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class IoFailure : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

// ---- kitti_io ----------------------------------------------------------------

class TruncatedFile : public Error
{
public:
  explicit TruncatedFile(std::size_t byte_length);
  std::size_t byte_length() const noexcept { return byte_length_; }

private:
  std::size_t byte_length_;
};

class NonFiniteValue : public Error
{
public:
  explicit NonFiniteValue(std::size_t point_index);
  std::size_t point_index() const noexcept { return point_index_; }

private:
  std::size_t point_index_;
};

class FieldCountMismatch : public Error
{
public:
  FieldCountMismatch(std::size_t expected, std::size_t actual);
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

private:
  std::size_t expected_;
  std::size_t actual_;
};

/// A field that is not a finite decimal number. The index is 0-based.
class NumericParse : public Error
{
public:
  NumericParse(std::size_t field_index, const std::string & token);
  std::size_t field_index() const noexcept { return field_index_; }

private:
  std::size_t field_index_;
};

class RangeViolation : public Error
{
public:
  RangeViolation(std::size_t field_index, const std::string & what);
  std::size_t field_index() const noexcept { return field_index_; }

private:
  std::size_t field_index_;
};

class MissingKey : public Error
{
public:
  explicit MissingKey(std::string key);
  const std::string & key() const noexcept { return key_; }

private:
  std::string key_;
};

class MatrixShape : public Error
{
public:
  MatrixShape(std::string key, std::size_t expected, std::size_t actual);
  const std::string & key() const noexcept { return key_; }

private:
  std::string key_;
};

enum class ViolationKind {
  MissingDirectory,
  MissingSplitFile,
  MissingFile,
  OrphanFile,
  SplitOverlap,
  DuplicateId,
  BadFrameId,
  NonMonotoneIds,
  BadPngMagic,
  TruncatedVelodyne,
  UnparsableLabel,
  UnparsableCalib,
};

const char * to_string(ViolationKind kind);

struct Violation
{
  ViolationKind kind;
  std::string frame_id;  // empty when the violation is not tied to one frame
  std::string detail;
};

std::string describe(const Violation & v);

class StructureViolation : public Error
{
public:
  explicit StructureViolation(std::vector<Violation> violations);
  const std::vector<Violation> & violations() const noexcept { return violations_; }

private:
  std::vector<Violation> violations_;
};

// ---- box_geometry ------------------------------------------------------------

class FrameMismatch : public Error
{
public:
  using Error::Error;
};

class BehindCamera : public Error
{
public:
  BehindCamera() : Error("box lies entirely behind the image plane") {}
};

// ---- scenario_sim ------------------------------------------------------------

class InfeasibleConfig : public Error
{
public:
  using Error::Error;
};

// ---- eval_metrics ------------------------------------------------------------

class NoGroundTruth : public Error
{
public:
  NoGroundTruth() : Error("no matchable ground truth objects in scope") {}
};

class MissingScore : public Error
{
public:
  using Error::Error;
};

class PredictionForUnknownFrame : public Error
{
public:
  explicit PredictionForUnknownFrame(std::string frame_id);
  const std::string & frame_id() const noexcept { return frame_id_; }

private:
  std::string frame_id_;
};

// ---- baseline_detector -------------------------------------------------------

class DegenerateCloud : public Error
{
public:
  explicit DegenerateCloud(std::size_t point_count);
};

}  // namespace sotif_kitti

#endif  // SOTIF_KITTI__ERRORS_HPP_
