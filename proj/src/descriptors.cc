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

#include "reprune/descriptors.h"

#include <cmath>
#include <filesystem>
#include <utility>

#include "reprune/error.h"
#include "reprune/random.h"
#include "reprune/snapshot_io.h"

namespace reprune {
namespace {

class NetBuilder {
 public:
  void Conv(std::string name, int in, int out, int k, int out_hw,
            BlockKind kind = BlockKind::kPlain, int pos = 0) {
    ConvLayer layer;
    layer.name = std::move(name);
    layer.in_channels = in;
    layer.out_channels = out;
    layer.kernel_h = k;
    layer.kernel_w = k;
    layer.out_hw = out_hw;
    layer.block = {kind, kind == BlockKind::kPlain ? -1 : block_id_, pos};
    layers_.push_back(std::move(layer));
  }

  void OpenBlock() { ++block_id_; }

  std::vector<ConvLayer> Take() { return std::move(layers_); }

 private:
  std::vector<ConvLayer> layers_;
  int block_id_ = -1;
};

std::string Prefix(int stage, int index) {
  return "layer" + std::to_string(stage) + "." + std::to_string(index) + ".";
}

// torchvision layout; the stride of a bottleneck sits on its 3x3 conv.
ModelSnapshot ImageNetResNet(std::string name, const std::vector<int>& depths,
                             bool bottleneck) {
  NetBuilder net;
  net.Conv("conv1", 3, 64, 7, 112);
  int hw = 56;  // after the stem max-pool
  int in = 64;
  const int expansion = bottleneck ? 4 : 1;
  for (int stage = 0; stage < 4; ++stage) {
    const int width = 64 << stage;
    for (int b = 0; b < depths[stage]; ++b) {
      const bool strided = stage > 0 && b == 0;
      const int out_hw = strided ? hw / 2 : hw;
      const std::string p = Prefix(stage + 1, b);
      net.OpenBlock();
      if (bottleneck) {
        net.Conv(p + "conv1", in, width, 1, hw, BlockKind::kBottleneck, 0);
        net.Conv(p + "conv2", width, width, 3, out_hw, BlockKind::kBottleneck, 1);
        net.Conv(p + "conv3", width, width * expansion, 1, out_hw,
                 BlockKind::kBottleneck, 2);
      } else {
        net.Conv(p + "conv1", in, width, 3, out_hw, BlockKind::kBasic, 0);
        net.Conv(p + "conv2", width, width, 3, out_hw, BlockKind::kBasic, 1);
      }
      if (strided || in != width * expansion) {
        net.Conv(p + "downsample.0", in, width * expansion, 1, out_hw,
                 BlockKind::kDownsample);
      }
      in = width * expansion;
      hw = out_hw;
    }
  }
  return MakeSnapshot(std::move(name), 224, net.Take(), Classifier{in, 1000});
}

// CIFAR ResNet-56: three stages of nine basic blocks, parameter-free
// (zero-padding) shortcuts.
ModelSnapshot CifarResNet56() {
  NetBuilder net;
  net.Conv("conv1", 3, 16, 3, 32);
  int in = 16;
  int hw = 32;
  for (int stage = 0; stage < 3; ++stage) {
    const int width = 16 << stage;
    for (int b = 0; b < 9; ++b) {
      const int out_hw = stage > 0 && b == 0 ? hw / 2 : hw;
      const std::string p = Prefix(stage + 1, b);
      net.OpenBlock();
      net.Conv(p + "conv1", in, width, 3, out_hw, BlockKind::kBasic, 0);
      net.Conv(p + "conv2", width, width, 3, out_hw, BlockKind::kBasic, 1);
      in = width;
      hw = out_hw;
    }
  }
  return MakeSnapshot("resnet56", 32, net.Take(), Classifier{64, 10});
}

ModelSnapshot ToyPlain() {
  NetBuilder net;
  net.Conv("conv1", 3, 8, 3, 8);
  net.Conv("conv2", 8, 8, 3, 8);
  net.Conv("conv3", 8, 8, 3, 4);
  return MakeSnapshot("toy-plain", 8, net.Take(), Classifier{8, 4});
}

ModelSnapshot ToyResidual() {
  NetBuilder net;
  net.Conv("conv1", 3, 8, 3, 8);
  net.OpenBlock();
  net.Conv("basic.conv1", 8, 8, 3, 8, BlockKind::kBasic, 0);
  net.Conv("basic.conv2", 8, 8, 3, 8, BlockKind::kBasic, 1);
  net.OpenBlock();
  net.Conv("bottle.conv1", 8, 6, 1, 8, BlockKind::kBottleneck, 0);
  net.Conv("bottle.conv2", 6, 6, 3, 4, BlockKind::kBottleneck, 1);
  net.Conv("bottle.conv3", 6, 16, 1, 4, BlockKind::kBottleneck, 2);
  net.Conv("bottle.downsample.0", 8, 16, 1, 4, BlockKind::kDownsample);
  return MakeSnapshot("toy-residual", 8, net.Take(), Classifier{16, 4});
}

}  // namespace

std::vector<std::string> BuiltinDescriptorNames() {
  return {"resnet18", "resnet34", "resnet50", "resnet56", "toy-plain",
          "toy-residual"};
}

ModelSnapshot BuiltinDescriptor(std::string_view name) {
  if (name == "resnet18") return ImageNetResNet("resnet18", {2, 2, 2, 2}, false);
  if (name == "resnet34") return ImageNetResNet("resnet34", {3, 4, 6, 3}, false);
  if (name == "resnet50") return ImageNetResNet("resnet50", {3, 4, 6, 3}, true);
  if (name == "resnet56") return CifarResNet56();
  if (name == "toy-plain") return ToyPlain();
  if (name == "toy-residual") return ToyResidual();
  throw Error(ErrorCode::kInvalidArgument,
              "unknown descriptor '" + std::string(name) + "'");
}

void MaterializeWeights(ModelSnapshot& snapshot, std::uint64_t seed) {
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    ConvLayer& layer = snapshot.layers[l];
    Rng rng(MixSeed(seed, l));
    const double stddev =
        std::sqrt(2.0 / (layer.in_channels * layer.kernel_size()));
    layer.weights.resize(layer.weight_count());
    for (float& w : layer.weights) w = static_cast<float>(rng.Normal(0.0, stddev));
    layer.gammas.resize(layer.out_channels);
    for (float& g : layer.gammas) g = static_cast<float>(rng.Uniform(0.05, 1.0));
  }
}

ModelSnapshot ResolveArch(const std::string& arch, std::uint64_t seed,
                          bool require_weights) {
  for (const std::string& name : BuiltinDescriptorNames()) {
    if (arch == name) {
      ModelSnapshot snapshot = BuiltinDescriptor(name);
      if (require_weights) MaterializeWeights(snapshot, seed);
      return snapshot;
    }
  }
  if (!std::filesystem::exists(arch)) {
    throw Error(ErrorCode::kIo, "no built-in descriptor or file named '" + arch + "'");
  }
  return require_weights ? LoadSnapshot(arch) : LoadDescriptor(arch);
}

}  // namespace reprune
