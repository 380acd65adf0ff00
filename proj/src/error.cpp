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

#include "wearauth/error.hpp"

namespace wearauth {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateMinute: return "DuplicateMinute";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DegenerateWindow: return "DegenerateWindow";
    case Errc::EmptySample: return "EmptySample";
    case Errc::NoFeatureSurvives: return "NoFeatureSurvives";
    case Errc::TopKExceedsAvailable: return "TopKExceedsAvailable";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingleClass: return "SingleClass";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::PlattNotFitted: return "PlattNotFitted";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InsufficientWindows: return "InsufficientWindows";
    case Errc::EmptyTestSet: return "EmptyTestSet";
    case Errc::EmptyScores: return "EmptyScores";
    case Errc::EmptyResults: return "EmptyResults";
    case Errc::InvalidTransitionMatrix: return "InvalidTransitionMatrix";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::StageFailure: return "StageFailure";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigInvalid:
    case Errc::InvalidArgument:
      return 2;
    case Errc::NoConvergence:
      return 4;
    default:
      return 3;
  }
}

}  // namespace wearauth
