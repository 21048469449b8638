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

// Snapshot data model: convolution layers, the residual-block graph that
// decides which layers may lose output channels, and validation.

#ifndef REPRUNE_MODEL_H_
#define REPRUNE_MODEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reprune {

enum class BlockKind { kPlain, kBasic, kBottleneck, kDownsample };

std::string_view BlockKindName(BlockKind kind);
// Throws Error(kInvalidArgument) on an unknown name.
BlockKind ParseBlockKind(std::string_view name);

// Where a conv sits in the architecture. `id` groups the members of one
// residual block (and its projection shortcut); -1 asks the graph builder to
// infer grouping from layer order.
struct BlockRole {
  BlockKind kind = BlockKind::kPlain;
  int id = -1;
  int pos = 0;
};

struct ConvLayer {
  std::string name;
  int out_channels = 0;
  int in_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  // Side of the (square) output feature map.
  int out_hw = 0;
  // Row-major (out, in, kernel_h, kernel_w).
  std::vector<float> weights;
  // BN scaling factors, one per output channel; empty when no BN follows.
  std::vector<float> gammas;
  BlockRole block;
  // Derived from the ArchGraph; never read from a manifest.
  bool prunable = false;

  int kernel_size() const { return kernel_h * kernel_w; }
  std::size_t weight_count() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel_h *
           kernel_w;
  }
  bool has_weights() const { return !weights.empty(); }
  bool has_bn() const { return !gammas.empty(); }

  std::span<const float> filter(int out) const {
    const std::size_t len = static_cast<std::size_t>(in_channels) * kernel_size();
    return std::span<const float>(weights).subspan(out * len, len);
  }
  std::span<const float> kernel(int out, int in) const {
    return filter(out).subspan(static_cast<std::size_t>(in) * kernel_size(),
                               kernel_size());
  }
};

struct Classifier {
  int in_features = 0;
  int out_features = 0;
};

struct Block {
  BlockKind kind = BlockKind::kPlain;
  // Layer indices ordered by position inside the block.
  std::vector<int> members;
  std::optional<int> downsample;
};

// Block structure plus the two facts pruning needs per layer: whether its
// output channels may be removed, and which layer produces its input.
class ArchGraph {
 public:
  ArchGraph() = default;

  // Groups layers into blocks and derives prunability and producers.
  // Throws Error(kInvalidArgument) on malformed block structure or a
  // producer/consumer channel-count mismatch.
  static ArchGraph Build(std::span<const ConvLayer> layers,
                         const std::optional<Classifier>& classifier);

  const std::vector<Block>& blocks() const { return blocks_; }
  bool prunable(int layer) const { return prunable_[layer]; }
  // Layer whose output feeds `layer`; nullopt for the network input.
  std::optional<int> producer(int layer) const { return producer_[layer]; }
  // Layer whose output reaches the classifier.
  std::optional<int> final_producer() const { return final_producer_; }
  std::size_t num_layers() const { return prunable_.size(); }

 private:
  std::vector<Block> blocks_;
  std::vector<bool> prunable_;
  std::vector<std::optional<int>> producer_;
  std::optional<int> final_producer_;
};

struct ModelSnapshot {
  std::string model;
  int input_hw = 0;
  std::vector<ConvLayer> layers;
  ArchGraph arch;
  std::optional<Classifier> classifier;

  // Returns -1 when absent.
  int FindLayer(std::string_view name) const;
  std::vector<int> PrunableLayers() const;
};

// Assembles a snapshot, derives the graph and each layer's `prunable` flag,
// and validates geometry. Weights may be absent (shape-only descriptor).
ModelSnapshot MakeSnapshot(std::string model, int input_hw,
                           std::vector<ConvLayer> layers,
                           std::optional<Classifier> classifier);

// Geometry checks: positive counts, unique names, out_hw > 0, gamma counts.
void ValidateGeometry(const ModelSnapshot& snapshot);

// Tensor checks: exact element counts and finite values. Requires weights.
void ValidateTensors(const ModelSnapshot& snapshot);

}  // namespace reprune

#endif  // REPRUNE_MODEL_H_
