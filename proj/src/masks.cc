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

#include "reprune/masks.h"

#include <algorithm>
#include <string>

#include "reprune/error.h"

namespace reprune {
namespace {

std::vector<int> TrueIndices(const std::vector<bool>& flags) {
  std::vector<int> out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

PruneMask PruneMask::AllTrue(const ModelSnapshot& snapshot) {
  PruneMask mask;
  for (const ConvLayer& layer : snapshot.layers) {
    mask.keep_out.emplace_back(layer.out_channels, true);
    mask.keep_in.emplace_back(layer.in_channels, true);
  }
  return mask;
}

void PruneMask::Align(const ModelSnapshot& snapshot) {
  keep_in.resize(snapshot.layers.size());
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    if (const auto p = snapshot.arch.producer(static_cast<int>(l))) {
      keep_in[l] = keep_out[*p];
    } else {
      keep_in[l].assign(snapshot.layers[l].in_channels, true);
    }
  }
}

int PruneMask::kept(int layer) const {
  return static_cast<int>(
      std::count(keep_out[layer].begin(), keep_out[layer].end(), true));
}

std::vector<int> PruneMask::live_out(int layer) const {
  return TrueIndices(keep_out[layer]);
}

std::vector<int> PruneMask::live_in(int layer) const {
  return TrueIndices(keep_in[layer]);
}

void CheckMask(const ModelSnapshot& snapshot, const PruneMask& mask) {
  const std::size_t n = snapshot.layers.size();
  if (mask.keep_out.size() != n || mask.keep_in.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "mask covers " +
                                                 std::to_string(mask.keep_out.size()) +
                                                 " layers, snapshot has " +
                                                 std::to_string(n));
  }
  for (std::size_t l = 0; l < n; ++l) {
    const ConvLayer& layer = snapshot.layers[l];
    if (mask.keep_out[l].size() != static_cast<std::size_t>(layer.out_channels) ||
        mask.keep_in[l].size() != static_cast<std::size_t>(layer.in_channels)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mask length mismatch on layer '" + layer.name + "'");
    }
    const int kept = mask.kept(static_cast<int>(l));
    if (!layer.prunable && kept != layer.out_channels) {
      throw Error(ErrorCode::kConstraintViolation,
                  "non-prunable layer '" + layer.name + "' lost channels");
    }
    if (kept == 0) {
      throw Error(ErrorCode::kConstraintViolation,
                  "layer '" + layer.name + "' keeps no channel");
    }
    const auto p = snapshot.arch.producer(static_cast<int>(l));
    const bool aligned = p ? mask.keep_in[l] == mask.keep_out[*p]
                           : std::all_of(mask.keep_in[l].begin(),
                                         mask.keep_in[l].end(),
                                         [](bool b) { return b; });
    if (!aligned) {
      throw Error(ErrorCode::kConstraintViolation,
                  "in-channels of '" + layer.name +
                      "' do not follow its producer's survivors");
    }
  }
}

ModelSnapshot ApplyMasks(const ModelSnapshot& snapshot, const PruneMask& mask) {
  CheckMask(snapshot, mask);
  std::vector<ConvLayer> layers;
  layers.reserve(snapshot.layers.size());
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    const ConvLayer& src = snapshot.layers[l];
    const std::vector<int> outs = mask.live_out(static_cast<int>(l));
    const std::vector<int> ins = mask.live_in(static_cast<int>(l));
    ConvLayer dst = src;
    dst.out_channels = static_cast<int>(outs.size());
    dst.in_channels = static_cast<int>(ins.size());
    dst.weights.clear();
    dst.gammas.clear();
    if (src.has_weights()) {
      dst.weights.reserve(dst.weight_count());
      for (int o : outs) {
        for (int i : ins) {
          const auto k = src.kernel(o, i);
          dst.weights.insert(dst.weights.end(), k.begin(), k.end());
        }
      }
    }
    if (src.has_bn()) {
      for (int o : outs) dst.gammas.push_back(src.gammas[o]);
    }
    layers.push_back(std::move(dst));
  }
  std::optional<Classifier> classifier = snapshot.classifier;
  if (classifier && snapshot.arch.final_producer()) {
    classifier->in_features = mask.kept(*snapshot.arch.final_producer());
  }
  return MakeSnapshot(snapshot.model, snapshot.input_hw, std::move(layers),
                      classifier);
}

}  // namespace reprune
