// Copyright 2026 The pvroute Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PVROUTE_SERIALIZE_H_
#define PVROUTE_SERIALIZE_H_

#include <string>

#include "pvroute/config.h"
#include "pvroute/experiment.h"
#include "pvroute/predictors.h"

namespace pvroute {

inline constexpr int kArtifactVersion = 1;

// JSON round trips are exact: doubles are written in shortest round-trip
// form and every derived member is rebuilt from the stored fields.
Json ModelsToJson(const BranchModels& models);
BranchModels ModelsFromJson(const Json& doc);

Json BundleToJson(const Bundle& bundle);
Bundle BundleFromJson(const Json& doc);

// Throws ConfigError when the file cannot be opened or parsed.
Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& doc);

// models.json and bundle.json under `dir`.
void SaveArtifacts(const std::string& dir, const BranchModels& models,
                   const Bundle& bundle);
bool ArtifactsExist(const std::string& dir);
// Throws SchemaError on a version mismatch.
void LoadArtifacts(const std::string& dir, BranchModels& models,
                   Bundle& bundle);

}  // namespace pvroute

#endif  // PVROUTE_SERIALIZE_H_
