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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "wearauth/eval.hpp"
#include "wearauth/features.hpp"
#include "wearauth/selection.hpp"
#include "wearauth/svm.hpp"
#include "wearauth/synth.hpp"

namespace wearauth {

using Json = nlohmann::json;

inline constexpr int kModelSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

Json to_json(const FeatureSetSpec& spec);
FeatureSetSpec feature_set_from_json(const Json& j);

Json to_json(const TrainedModel& model);
/// Throws SchemaVersionMismatch for newer schemas, CorruptFile otherwise.
TrainedModel model_from_json(const Json& j);

Json to_json(const EvalReport& report);
EvalReport report_from_json(const Json& j);

Json to_json(const std::vector<SubjectProfile>& profiles);

/// Reads a whole JSON file; parse failures raise CorruptFile.
Json read_json_file(const std::filesystem::path& path);
/// Writes pretty-printed JSON with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

void persist_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

/// Header: subject_id,start_minute,activity_level,<features...>. The ordinal
/// activity feature is carried by the activity_level column rather than
/// repeated as a feature column.
void write_feature_matrix(std::ostream& out, const FeatureMatrix& fm);
/// The activity feature is restored when every row is non-sedentary.
FeatureMatrix read_feature_matrix(std::istream& in);

void write_report_csv(std::ostream& out, const EvalReport& report);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_outlier_csv(std::ostream& out, const std::vector<OutlierRow>& rows);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace wearauth
