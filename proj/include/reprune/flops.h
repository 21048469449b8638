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

// FLOPs accounting under the multiply-accumulate convention: one
// multiply-add counts as one operation. Convolutions and the final
// classifier are counted; BN, activations and pooling are not.

#ifndef REPRUNE_FLOPS_H_
#define REPRUNE_FLOPS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reprune/masks.h"
#include "reprune/model.h"

namespace reprune {

struct LayerFlops {
  std::string name;
  std::uint64_t flops = 0;
};

struct FlopsReport {
  std::uint64_t total = 0;
  std::vector<LayerFlops> per_layer;
  std::uint64_t classifier = 0;
  // 1 - total / reference total, present when a reference was given.
  std::optional<double> reduction;
};

// out * in * kh * kw * out_hw^2. Throws Error(kMissingMetadata) if
// out_hw <= 0.
std::uint64_t ConvFlops(const ConvLayer& layer, int out_hw);

FlopsReport ModelFlops(const ModelSnapshot& snapshot,
                       const ModelSnapshot* reference = nullptr);

// FLOPs of the model `mask` would produce, without materializing it.
FlopsReport MaskedFlops(const ModelSnapshot& snapshot, const PruneMask& mask);

}  // namespace reprune

#endif  // REPRUNE_FLOPS_H_
