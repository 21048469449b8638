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

#include "reprune/flops.h"

#include "reprune/error.h"

namespace reprune {
namespace {

std::uint64_t Flops(std::uint64_t out, std::uint64_t in, const ConvLayer& layer,
                    int out_hw) {
  if (out_hw <= 0) {
    throw Error(ErrorCode::kMissingMetadata,
                "layer '" + layer.name + "' has no output spatial size");
  }
  const std::uint64_t hw = static_cast<std::uint64_t>(out_hw);
  return out * in * static_cast<std::uint64_t>(layer.kernel_h) *
         static_cast<std::uint64_t>(layer.kernel_w) * hw * hw;
}

}  // namespace

std::uint64_t ConvFlops(const ConvLayer& layer, int out_hw) {
  return Flops(layer.out_channels, layer.in_channels, layer, out_hw);
}

FlopsReport ModelFlops(const ModelSnapshot& snapshot,
                       const ModelSnapshot* reference) {
  FlopsReport report;
  for (const ConvLayer& layer : snapshot.layers) {
    const std::uint64_t f = ConvFlops(layer, layer.out_hw);
    report.per_layer.push_back({layer.name, f});
    report.total += f;
  }
  if (snapshot.classifier) {
    report.classifier = static_cast<std::uint64_t>(snapshot.classifier->in_features) *
                        snapshot.classifier->out_features;
    report.total += report.classifier;
  }
  if (reference != nullptr) {
    const std::uint64_t base = ModelFlops(*reference).total;
    report.reduction = 1.0 - static_cast<double>(report.total) /
                                 static_cast<double>(base);
  }
  return report;
}

FlopsReport MaskedFlops(const ModelSnapshot& snapshot, const PruneMask& mask) {
  CheckMask(snapshot, mask);
  FlopsReport report;
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    const ConvLayer& layer = snapshot.layers[l];
    const int out = mask.kept(static_cast<int>(l));
    const auto live_in = mask.live_in(static_cast<int>(l));
    const std::uint64_t f = Flops(out, live_in.size(), layer, layer.out_hw);
    report.per_layer.push_back({layer.name, f});
    report.total += f;
  }
  if (snapshot.classifier) {
    const auto last = snapshot.arch.final_producer();
    const std::uint64_t in =
        last ? mask.kept(*last) : snapshot.classifier->in_features;
    report.classifier = in * snapshot.classifier->out_features;
    report.total += report.classifier;
  }
  report.reduction = 1.0 - static_cast<double>(report.total) /
                               static_cast<double>(ModelFlops(snapshot).total);
  return report;
}

}  // namespace reprune
