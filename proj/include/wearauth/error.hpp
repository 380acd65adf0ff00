// Copyright 2026 The wearauth Authors.
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wearauth {

enum class Errc {
  // ingestion
  MalformedRow,
  DuplicateMinute,
  EmptyInput,
  // features / selection
  DegenerateWindow,
  EmptySample,
  NoFeatureSurvives,
  TopKExceedsAvailable,
  // svm
  DimensionMismatch,
  SingleClass,
  NonFinite,
  NoConvergence,
  PlattNotFitted,
  InvalidArgument,
  // eval
  InsufficientWindows,
  EmptyTestSet,
  EmptyScores,
  EmptyResults,
  // synth
  InvalidTransitionMatrix,
  // cli / persistence
  ConfigInvalid,
  StageFailure,
  SchemaVersionMismatch,
  CorruptFile,
  Io,
};

const char* to_string(Errc code);

/// Base of every error raised by the library. The code selects the CLI exit
/// status; the message is meant for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, const std::string& reason)
      : Error(Errc::MalformedRow,
              "malformed row at line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateMinute : public Error {
 public:
  DuplicateMinute(std::string subject, std::int64_t minute)
      : Error(Errc::DuplicateMinute, "duplicate minute " +
                                         std::to_string(minute) +
                                         " for subject '" + subject + "'"),
        subject_(std::move(subject)),
        minute_(minute) {}
  const std::string& subject() const noexcept { return subject_; }
  std::int64_t minute() const noexcept { return minute_; }

 private:
  std::string subject_;
  std::int64_t minute_;
};

class StageFailure : public Error {
 public:
  StageFailure(std::string stage, Errc cause, const std::string& detail)
      : Error(Errc::StageFailure, "stage '" + stage + "' failed (" +
                                      to_string(cause) + "): " + detail),
        stage_(std::move(stage)),
        cause_(cause) {}
  const std::string& stage() const noexcept { return stage_; }
  Errc cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  Errc cause_;
};

// CLI exit codes: 0 ok, 2 usage/config, 3 data, 4 convergence.
int exit_code_for(Errc code);

}  // namespace wearauth
