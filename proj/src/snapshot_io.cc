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

#include "reprune/snapshot_io.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"
#include "reprune/error.h"

namespace reprune {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Error Malformed(const std::string& message) {
  return Error(ErrorCode::kMalformedManifest, message);
}

std::vector<char> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const fs::path& path, const char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  }
  out.write(data, static_cast<std::streamsize>(size));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "short write to '" + path.string() + "'");
}

std::uint32_t ToLittleEndian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
           (v >> 24);
  }
  return v;
}

void AppendFloats(std::vector<char>& blob, const std::vector<float>& values) {
  const std::size_t base = blob.size();
  blob.resize(base + values.size() * sizeof(float));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t bits = ToLittleEndian(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(blob.data() + base + i * sizeof(float), &bits, sizeof(bits));
  }
}

std::vector<float> ReadFloats(const std::vector<char>& blob, std::uint64_t offset,
                              std::size_t count, const std::string& what) {
  const std::uint64_t bytes = static_cast<std::uint64_t>(count) * sizeof(float);
  if (offset > blob.size() || blob.size() - offset < bytes) {
    throw Error(ErrorCode::kSizeMismatch,
                what + " needs " + std::to_string(bytes) + " bytes at offset " +
                    std::to_string(offset) + " but the blob holds " +
                    std::to_string(blob.size()));
  }
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, blob.data() + offset + i * sizeof(float), sizeof(bits));
    out[i] = std::bit_cast<float>(ToLittleEndian(bits));
  }
  return out;
}

template <typename T>
T Field(const json& object, const char* key, const std::string& context) {
  if (!object.is_object() || !object.contains(key)) {
    throw Malformed(context + ": missing \"" + key + "\"");
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Malformed(context + ": bad \"" + key + "\": " + e.what());
  }
}

int PositiveInt(const json& object, const char* key, const std::string& context) {
  const json& v = object.contains(key) ? object.at(key) : json();
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0 ||
      v.get<std::int64_t>() > INT32_MAX) {
    throw Malformed(context + ": \"" + key + "\" must be a positive integer");
  }
  return v.get<int>();
}

std::optional<std::uint64_t> OptionalOffset(const json& object, const char* key,
                                            const std::string& context) {
  if (!object.contains(key) || object.at(key).is_null()) return std::nullopt;
  const json& v = object.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw Malformed(context + ": \"" + key + "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

fs::path BlobPathFor(const fs::path& manifest_path) {
  fs::path blob = manifest_path;
  blob.replace_extension(".bin");
  return blob;
}

ModelSnapshot Load(const fs::path& manifest_path, bool require_weights) {
  const std::vector<char> text = ReadFile(manifest_path);
  json manifest;
  try {
    manifest = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!manifest.is_object()) throw Malformed("manifest is not an object");
  if (manifest.contains("schema") &&
      manifest.at("schema") != json(kSnapshotSchema)) {
    throw Malformed("unsupported schema " + manifest.at("schema").dump());
  }
  const std::string model = Field<std::string>(manifest, "model", "manifest");
  const int input_hw = PositiveInt(manifest, "input_hw", "manifest");
  if (!manifest.contains("layers") || !manifest.at("layers").is_array()) {
    throw Malformed("manifest: \"layers\" must be an array");
  }

  std::optional<fs::path> blob_path;
  if (manifest.contains("blob") && manifest.at("blob").is_string()) {
    blob_path = manifest_path.parent_path() /
                manifest.at("blob").get<std::string>();
  } else if (require_weights) {
    blob_path = BlobPathFor(manifest_path);
  }
  std::vector<char> blob;
  if (blob_path) blob = ReadFile(*blob_path);

  std::vector<ConvLayer> layers;
  for (const json& entry : manifest.at("layers")) {
    ConvLayer layer;
    layer.name = Field<std::string>(entry, "name", "layer");
    const std::string ctx = "layer '" + layer.name + "'";
    layer.out_channels = PositiveInt(entry, "out", ctx);
    layer.in_channels = PositiveInt(entry, "in", ctx);
    layer.kernel_h = PositiveInt(entry, "kh", ctx);
    layer.kernel_w = PositiveInt(entry, "kw", ctx);
    layer.out_hw = PositiveInt(entry, "out_hw", ctx);
    if (entry.contains("block") && !entry.at("block").is_null()) {
      const json& block = entry.at("block");
      try {
        layer.block.kind =
            ParseBlockKind(Field<std::string>(block, "kind", ctx + " block"));
      } catch (const Error& e) {
        throw Malformed(ctx + ": " + e.what());
      }
      layer.block.pos = block.contains("pos") ? Field<int>(block, "pos", ctx) : 0;
      layer.block.id = block.contains("id") ? Field<int>(block, "id", ctx) : -1;
    }
    const auto weights_offset = OptionalOffset(entry, "weights_offset", ctx);
    const auto gamma_offset = OptionalOffset(entry, "gamma_offset", ctx);
    if (require_weights && !weights_offset) {
      throw Malformed(ctx + ": missing \"weights_offset\"");
    }
    if ((weights_offset || gamma_offset) && !blob_path) {
      throw Malformed(ctx + ": tensor offsets given but no blob");
    }
    if (weights_offset) {
      layer.weights =
          ReadFloats(blob, *weights_offset, layer.weight_count(), ctx + " weights");
    }
    if (gamma_offset) {
      layer.gammas = ReadFloats(blob, *gamma_offset,
                                static_cast<std::size_t>(layer.out_channels),
                                ctx + " gammas");
    }
    layers.push_back(std::move(layer));
  }

  std::optional<Classifier> classifier;
  if (manifest.contains("classifier") && !manifest.at("classifier").is_null()) {
    const json& c = manifest.at("classifier");
    classifier = Classifier{PositiveInt(c, "in_features", "classifier"),
                            PositiveInt(c, "out_features", "classifier")};
  }

  ModelSnapshot snapshot;
  try {
    snapshot = MakeSnapshot(model, input_hw, std::move(layers), classifier);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument ||
        e.code() == ErrorCode::kMissingMetadata) {
      throw Malformed(e.what());
    }
    throw;
  }
  bool any_weights = false;
  for (const ConvLayer& layer : snapshot.layers) any_weights |= layer.has_weights();
  if (require_weights || any_weights) ValidateTensors(snapshot);
  return snapshot;
}

json ManifestFor(const ModelSnapshot& snapshot, const std::vector<std::uint64_t>* weight_offsets,
                 const std::vector<std::uint64_t>* gamma_offsets,
                 const std::string& blob_name) {
  json manifest;
  manifest["schema"] = kSnapshotSchema;
  manifest["model"] = snapshot.model;
  manifest["input_hw"] = snapshot.input_hw;
  if (!blob_name.empty()) manifest["blob"] = blob_name;
  json layers = json::array();
  for (std::size_t i = 0; i < snapshot.layers.size(); ++i) {
    const ConvLayer& layer = snapshot.layers[i];
    json entry;
    entry["name"] = layer.name;
    entry["out"] = layer.out_channels;
    entry["in"] = layer.in_channels;
    entry["kh"] = layer.kernel_h;
    entry["kw"] = layer.kernel_w;
    entry["out_hw"] = layer.out_hw;
    entry["weights_offset"] =
        weight_offsets ? json((*weight_offsets)[i]) : json(nullptr);
    entry["gamma_offset"] = gamma_offsets && layer.has_bn()
                                ? json((*gamma_offsets)[i])
                                : json(nullptr);
    entry["block"] = {{"kind", BlockKindName(layer.block.kind)},
                      {"pos", layer.block.pos}};
    if (layer.block.id >= 0) entry["block"]["id"] = layer.block.id;
    layers.push_back(std::move(entry));
  }
  manifest["layers"] = std::move(layers);
  if (snapshot.classifier) {
    manifest["classifier"] = {{"in_features", snapshot.classifier->in_features},
                              {"out_features", snapshot.classifier->out_features}};
  } else {
    manifest["classifier"] = nullptr;
  }
  return manifest;
}

}  // namespace

ModelSnapshot LoadSnapshot(const fs::path& manifest_path) {
  return Load(manifest_path, /*require_weights=*/true);
}

ModelSnapshot LoadDescriptor(const fs::path& manifest_path) {
  return Load(manifest_path, /*require_weights=*/false);
}

void SaveSnapshot(const ModelSnapshot& snapshot, const fs::path& manifest_path) {
  ValidateTensors(snapshot);
  const ModelSnapshot& out = snapshot;
  std::vector<char> blob;
  std::vector<std::uint64_t> weight_offsets, gamma_offsets;
  for (const ConvLayer& layer : out.layers) {
    weight_offsets.push_back(blob.size());
    AppendFloats(blob, layer.weights);
    gamma_offsets.push_back(blob.size());
    AppendFloats(blob, layer.gammas);
  }
  const fs::path blob_path = BlobPathFor(manifest_path);
  const std::string text =
      ManifestFor(out, &weight_offsets, &gamma_offsets,
                  blob_path.filename().string())
          .dump(2) +
      "\n";
  WriteFile(blob_path, blob.data(), blob.size());
  WriteFile(manifest_path, text.data(), text.size());
}

void SaveDescriptor(const ModelSnapshot& snapshot, const fs::path& manifest_path) {
  const std::string text =
      ManifestFor(snapshot, nullptr, nullptr, "").dump(2) + "\n";
  WriteFile(manifest_path, text.data(), text.size());
}

}  // namespace reprune
