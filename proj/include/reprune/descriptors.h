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

// Built-in architecture descriptors. Spatial sizes are stored per layer, so
// FLOPs never depend on re-deriving stride/padding chains.

#ifndef REPRUNE_DESCRIPTORS_H_
#define REPRUNE_DESCRIPTORS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "reprune/model.h"

namespace reprune {

// "resnet18", "resnet34", "resnet50" (224 input), "resnet56" (32 input),
// and two small test nets: "toy-plain" and "toy-residual".
std::vector<std::string> BuiltinDescriptorNames();

// Shape-only snapshot. Throws Error(kInvalidArgument) for unknown names.
ModelSnapshot BuiltinDescriptor(std::string_view name);

// Fills weights (He-normal) and BN gammas (uniform in [0.05, 1)) from `seed`.
void MaterializeWeights(ModelSnapshot& snapshot, std::uint64_t seed);

// Resolves --arch: a built-in name (materialized with `seed`) or a path to a
// snapshot manifest. When `require_weights` is false a descriptor manifest
// without a blob is accepted and built-ins stay shape-only.
ModelSnapshot ResolveArch(const std::string& arch, std::uint64_t seed,
                          bool require_weights);

}  // namespace reprune

#endif  // REPRUNE_DESCRIPTORS_H_
