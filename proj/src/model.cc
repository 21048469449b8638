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

#include "reprune/model.h"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "reprune/error.h"

namespace reprune {
namespace {

Error GraphError(const std::string& message) {
  return Error(ErrorCode::kInvalidArgument, message);
}

bool IsResidual(BlockKind kind) {
  return kind == BlockKind::kBasic || kind == BlockKind::kBottleneck;
}

int ExpectedMembers(BlockKind kind) {
  switch (kind) {
    case BlockKind::kBasic:
      return 2;
    case BlockKind::kBottleneck:
      return 3;
    default:
      return 1;
  }
}

// Resolves each layer's block id. Explicit ids are kept; otherwise a residual
// layer at pos 0 opens a new block and later positions (and a downsample)
// join the most recent one. Plain layers always form their own block.
std::vector<int> ResolveBlockIds(std::span<const ConvLayer> layers) {
  std::vector<int> ids(layers.size());
  int next_id = 0;
  for (const ConvLayer& layer : layers) {
    if (layer.block.id >= 0) next_id = std::max(next_id, layer.block.id + 1);
  }
  int current = -1;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const BlockRole& role = layers[i].block;
    if (role.id >= 0) {
      ids[i] = role.id;
      current = role.id;
      continue;
    }
    if (role.kind == BlockKind::kPlain ||
        (IsResidual(role.kind) && role.pos == 0)) {
      current = next_id++;
      ids[i] = current;
      continue;
    }
    if (current < 0) {
      throw GraphError("layer '" + layers[i].name +
                       "' continues a block that was never opened");
    }
    ids[i] = current;
  }
  return ids;
}

}  // namespace

std::string_view BlockKindName(BlockKind kind) {
  switch (kind) {
    case BlockKind::kPlain:
      return "plain";
    case BlockKind::kBasic:
      return "basic";
    case BlockKind::kBottleneck:
      return "bottleneck";
    case BlockKind::kDownsample:
      return "downsample";
  }
  return "plain";
}

BlockKind ParseBlockKind(std::string_view name) {
  if (name == "plain") return BlockKind::kPlain;
  if (name == "basic") return BlockKind::kBasic;
  if (name == "bottleneck") return BlockKind::kBottleneck;
  if (name == "downsample") return BlockKind::kDownsample;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown block kind '" + std::string(name) + "'");
}

ArchGraph ArchGraph::Build(std::span<const ConvLayer> layers,
                           const std::optional<Classifier>& classifier) {
  ArchGraph graph;
  const std::vector<int> ids = ResolveBlockIds(layers);

  // Blocks in order of first appearance.
  std::map<int, int> block_of_id;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const ConvLayer& layer = layers[i];
    auto [it, inserted] =
        block_of_id.try_emplace(ids[i], static_cast<int>(graph.blocks_.size()));
    if (inserted) graph.blocks_.emplace_back();
    Block& block = graph.blocks_[it->second];
    if (layer.block.kind == BlockKind::kDownsample) {
      if (block.downsample) {
        throw GraphError("block of '" + layer.name + "' has two downsamples");
      }
      block.downsample = static_cast<int>(i);
      continue;
    }
    if (!block.members.empty() && block.kind != layer.block.kind) {
      throw GraphError("layer '" + layer.name + "' mixes block kinds");
    }
    block.kind = layer.block.kind;
    if (layer.block.pos != static_cast<int>(block.members.size())) {
      throw GraphError("layer '" + layer.name + "' has out-of-order pos " +
                       std::to_string(layer.block.pos));
    }
    block.members.push_back(static_cast<int>(i));
  }

  for (std::size_t b = 0; b < graph.blocks_.size(); ++b) {
    const Block& block = graph.blocks_[b];
    if (block.members.empty()) {
      throw GraphError("block holds only a downsample conv");
    }
    const int want = ExpectedMembers(block.kind);
    if (static_cast<int>(block.members.size()) != want) {
      throw GraphError(std::string(BlockKindName(block.kind)) +
                       " block starting at '" +
                       layers[block.members.front()].name + "' has " +
                       std::to_string(block.members.size()) +
                       " convs, expected " + std::to_string(want));
    }
    if (block.downsample && !IsResidual(block.kind)) {
      throw GraphError("downsample attached to a plain layer");
    }
  }

  graph.prunable_.assign(layers.size(), false);
  graph.producer_.assign(layers.size(), std::nullopt);
  std::optional<int> stream;
  for (std::size_t b = 0; b < graph.blocks_.size(); ++b) {
    const Block& block = graph.blocks_[b];
    if (block.kind == BlockKind::kPlain) {
      const int m = block.members.front();
      graph.producer_[m] = stream;
      // A plain conv whose output enters a residual block feeds a skip path
      // and must keep its width.
      const bool feeds_residual = b + 1 < graph.blocks_.size() &&
                                  IsResidual(graph.blocks_[b + 1].kind);
      graph.prunable_[m] = !feeds_residual;
      stream = m;
      continue;
    }
    for (std::size_t p = 0; p < block.members.size(); ++p) {
      const int m = block.members[p];
      graph.producer_[m] = p == 0 ? stream : block.members[p - 1];
      // The last conv of a residual block is summed with the shortcut.
      graph.prunable_[m] = p + 1 < block.members.size();
    }
    if (block.downsample) graph.producer_[*block.downsample] = stream;
    stream = block.members.back();
  }
  graph.final_producer_ = stream;

  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (const auto p = graph.producer_[i]) {
      if (layers[*p].out_channels != layers[i].in_channels) {
        throw GraphError("layer '" + layers[i].name + "' expects " +
                         std::to_string(layers[i].in_channels) +
                         " in-channels but '" + layers[*p].name +
                         "' produces " +
                         std::to_string(layers[*p].out_channels));
      }
    }
  }
  if (classifier && stream &&
      classifier->in_features != layers[*stream].out_channels) {
    throw GraphError("classifier in_features " +
                     std::to_string(classifier->in_features) +
                     " does not match final conv width " +
                     std::to_string(layers[*stream].out_channels));
  }
  return graph;
}

int ModelSnapshot::FindLayer(std::string_view name) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> ModelSnapshot::PrunableLayers() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].prunable) out.push_back(static_cast<int>(i));
  }
  return out;
}

void ValidateGeometry(const ModelSnapshot& snapshot) {
  if (snapshot.layers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "snapshot has no layers");
  }
  if (snapshot.input_hw <= 0) {
    throw Error(ErrorCode::kMissingMetadata, "snapshot lacks input_hw");
  }
  std::set<std::string> names;
  for (const ConvLayer& layer : snapshot.layers) {
    if (layer.name.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "layer with empty name");
    }
    if (!names.insert(layer.name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate layer name '" + layer.name + "'");
    }
    if (layer.out_channels <= 0 || layer.in_channels <= 0 ||
        layer.kernel_h <= 0 || layer.kernel_w <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "layer '" + layer.name + "' has a non-positive dimension");
    }
    if (layer.out_hw <= 0) {
      throw Error(ErrorCode::kMissingMetadata,
                  "layer '" + layer.name + "' lacks a positive out_hw");
    }
    if (layer.has_bn() &&
        layer.gammas.size() != static_cast<std::size_t>(layer.out_channels)) {
      throw Error(ErrorCode::kSizeMismatch,
                  "layer '" + layer.name + "' has " +
                      std::to_string(layer.gammas.size()) + " gammas for " +
                      std::to_string(layer.out_channels) + " channels");
    }
  }
  if (snapshot.classifier && (snapshot.classifier->in_features <= 0 ||
                              snapshot.classifier->out_features <= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "classifier has a zero dimension");
  }
}

void ValidateTensors(const ModelSnapshot& snapshot) {
  for (const ConvLayer& layer : snapshot.layers) {
    if (layer.weights.size() != layer.weight_count()) {
      throw Error(ErrorCode::kSizeMismatch,
                  "layer '" + layer.name + "' holds " +
                      std::to_string(layer.weights.size()) +
                      " weights, expected " +
                      std::to_string(layer.weight_count()));
    }
    for (float w : layer.weights) {
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::kNonFinite,
                    "layer '" + layer.name + "' has a non-finite weight");
      }
    }
    for (float g : layer.gammas) {
      if (!std::isfinite(g)) {
        throw Error(ErrorCode::kNonFinite,
                    "layer '" + layer.name + "' has a non-finite gamma");
      }
    }
  }
}

ModelSnapshot MakeSnapshot(std::string model, int input_hw,
                           std::vector<ConvLayer> layers,
                           std::optional<Classifier> classifier) {
  ModelSnapshot snapshot;
  snapshot.model = std::move(model);
  snapshot.input_hw = input_hw;
  snapshot.layers = std::move(layers);
  snapshot.classifier = classifier;
  ValidateGeometry(snapshot);
  snapshot.arch = ArchGraph::Build(snapshot.layers, snapshot.classifier);
  for (std::size_t i = 0; i < snapshot.layers.size(); ++i) {
    snapshot.layers[i].prunable = snapshot.arch.prunable(static_cast<int>(i));
  }
  return snapshot;
}

}  // namespace reprune
