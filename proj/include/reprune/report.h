// Copyright 2026 The Authors.
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

// Report and mask serialization. Run reports carry "schema": 1.

#ifndef REPRUNE_REPORT_H_
#define REPRUNE_REPORT_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "reprune/cluster_foundation.h"
#include "reprune/flops.h"
#include "reprune/masks.h"
#include "reprune/pipeline.h"

namespace reprune {

inline constexpr int kReportSchema = 1;

enum class ReportFormat { kJson, kCsv };

ReportFormat ParseReportFormat(std::string_view name);

nlohmann::json ReportToJson(const RunReport& report);
// Throws Error(kMalformedManifest) on a document that is not a schema-1
// run report.
RunReport ReportFromJson(const nlohmann::json& doc);

// One row per (epoch, layer) record:
// epoch,layer,s_l,n_merges,h_l,universe_size,k,kept,rate
std::string ReportToCsv(const RunReport& report);

// Throws Error(kIo) when the file cannot be written.
void EmitReport(const RunReport& report, const std::filesystem::path& path,
                ReportFormat format);

// {layer, s_l, n_merges, h_l, universe_size}
nlohmann::json UniverseRecordJson(const LayerClusterUniverse& universe);
// {layer, k, selected_indices, rate, gains_per_step}
nlohmann::json SelectionRecordJson(const LayerSelection& selection);

nlohmann::json FlopsToJson(const FlopsReport& flops);

// {"schema": 1, "model", "layers": [{"name", "kept": [indices]}]}
nlohmann::json MaskToJson(const ModelSnapshot& snapshot, const PruneMask& mask);
// Inverse of MaskToJson, aligned to `snapshot`. Throws
// Error(kMalformedManifest) on unknown layers or bad indices.
PruneMask MaskFromJson(const ModelSnapshot& snapshot, const nlohmann::json& doc);

// Writes text to a file; throws Error(kIo).
void WriteText(const std::filesystem::path& path, const std::string& text);
// Reads and parses a JSON file; Error(kIo) or Error(kMalformedManifest).
nlohmann::json ReadJson(const std::filesystem::path& path);

}  // namespace reprune

#endif  // REPRUNE_REPORT_H_
