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

// Snapshot container: a JSON manifest plus one little-endian float32 blob.
//
// Manifest layout:
//   {"schema": 1, "model": ..., "input_hw": ..., "blob": "x.bin",
//    "layers": [{"name", "out", "in", "kh", "kw", "out_hw",
//                "weights_offset", "gamma_offset",
//                "block": {"kind", "id", "pos"}}],
//    "classifier": {"in_features", "out_features"} | null}
//
// Offsets are byte offsets into the blob. "gamma_offset" is null for a conv
// without BN. A descriptor (shape-only manifest) has no blob and null
// "weights_offset" values.

#ifndef REPRUNE_SNAPSHOT_IO_H_
#define REPRUNE_SNAPSHOT_IO_H_

#include <filesystem>

#include "reprune/model.h"

namespace reprune {

inline constexpr int kSnapshotSchema = 1;

// Loads and validates a full snapshot. Error codes: kIo (unreadable files),
// kMalformedManifest, kSizeMismatch, kNonFinite.
ModelSnapshot LoadSnapshot(const std::filesystem::path& manifest_path);

// Like LoadSnapshot, but tensors are optional: a manifest without a blob
// yields a shape-only snapshot usable for FLOPs accounting.
ModelSnapshot LoadDescriptor(const std::filesystem::path& manifest_path);

// Writes `<manifest_path>` and a sibling blob with extension ".bin".
// Throws Error(kIo) when either file cannot be written.
void SaveSnapshot(const ModelSnapshot& snapshot,
                  const std::filesystem::path& manifest_path);

// Writes only the manifest, without tensors.
void SaveDescriptor(const ModelSnapshot& snapshot,
                    const std::filesystem::path& manifest_path);

}  // namespace reprune

#endif  // REPRUNE_SNAPSHOT_IO_H_
