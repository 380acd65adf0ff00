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
#include "wearauth/features.hpp"

#include <algorithm>
#include <cctype>

#include "wearauth/error.hpp"

namespace wearauth {

BiometricCombo::BiometricCombo(std::array<bool, kChannelCount> channels)
    : channels_(channels) {
  if (std::none_of(channels_.begin(), channels_.end(), [](bool b) { return b; }))
    throw Error(Errc::InvalidArgument, "biometric combo must not be empty");
}

BiometricCombo BiometricCombo::parse(std::string_view text) {
  std::array<bool, kChannelCount> channels{};
  for (char ch : text) {
    const auto upper = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    std::size_t idx = kChannelCount;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      if (channel_initial(static_cast<Channel>(c)) == upper) idx = c;
    }
    if (idx == kChannelCount)
      throw Error(Errc::InvalidArgument,
                  "unknown biometric '" + std::string(1, ch) + "' in combo '" +
                      std::string(text) + "'");
    if (channels[idx])
      throw Error(Errc::InvalidArgument,
                  "repeated biometric in combo '" + std::string(text) + "'");
    channels[idx] = true;
  }
  return BiometricCombo(channels);
}

std::vector<Channel> BiometricCombo::channels() const {
  std::vector<Channel> out;
  for (std::size_t c = 0; c < kChannelCount; ++c)
    if (channels_[c]) out.push_back(static_cast<Channel>(c));
  return out;
}

std::string BiometricCombo::name() const {
  std::string out;
  for (auto c : channels()) out += channel_initial(c);
  return out;
}

std::vector<std::string> feature_names(const BiometricCombo& combo,
                                       bool include_activity) {
  std::vector<std::string> names;
  for (auto c : combo.channels()) {
    for (auto abbrev : kFeatureAbbrev) {
      names.push_back(std::string(1, channel_initial(c)) + "_" +
                      std::string(abbrev));
    }
  }
  if (include_activity) names.emplace_back(kActivityFeature);
  return names;
}

FeatureVector extract_features(const Window& window, const BiometricCombo& combo,
                               bool include_activity) {
  if (!window.samples.allFinite())
    throw Error(Errc::DegenerateWindow,
                "non-finite sample in window of '" + window.subject_id +
                    "' at minute " + std::to_string(window.start_minute));
  const auto channels = combo.channels();
  FeatureVector fv;
  fv.window = {window.subject_id, window.start_minute, window.level};
  fv.names = feature_names(combo, include_activity);
  fv.values.resize(static_cast<Eigen::Index>(fv.names.size()));
  Eigen::Index offset = 0;
  for (auto c : channels) {
    fv.values.segment<kFeaturesPerChannel>(offset) =
        channel_features(window.channel(c));
    offset += kFeaturesPerChannel;
  }
  if (include_activity) fv.values(offset) = static_cast<double>(window.level);
  return fv;
}

Eigen::Index FeatureMatrix::column(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw Error(Errc::InvalidArgument,
                "feature '" + std::string(name) + "' not in matrix");
  return static_cast<Eigen::Index>(it - names.begin());
}

std::vector<Eigen::Index> FeatureMatrix::columns(
    const std::vector<std::string>& wanted) const {
  std::vector<Eigen::Index> out;
  out.reserve(wanted.size());
  for (const auto& name : wanted) out.push_back(column(name));
  return out;
}

std::vector<std::string> FeatureMatrix::subject_labels() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.subject_id);
  return out;
}

FeatureMatrix build_feature_matrix(const std::vector<Window>& windows,
                                   const BiometricCombo& combo,
                                   bool include_activity) {
  FeatureMatrix fm;
  fm.names = feature_names(combo, include_activity);
  fm.values.resize(static_cast<Eigen::Index>(windows.size()),
                   static_cast<Eigen::Index>(fm.names.size()));
  fm.rows.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto fv = extract_features(windows[i], combo, include_activity);
    fm.values.row(static_cast<Eigen::Index>(i)) = fv.values.transpose();
    fm.rows.push_back(std::move(fv.window));
  }
  return fm;
}

}  // namespace wearauth
