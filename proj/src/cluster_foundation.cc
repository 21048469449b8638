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

#include "reprune/cluster_foundation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reprune/error.h"

namespace reprune {
namespace {

void CheckSparsity(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sparsity " + std::to_string(s) + " outside [0, 1]");
  }
}

}  // namespace

int CeilCount(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::ceil(x));
}

int MergeBudget(double sparsity, int n_out) {
  CheckSparsity(sparsity);
  return CeilCount(sparsity * n_out);
}

int KeepCount(double sparsity, int n_out) {
  CheckSparsity(sparsity);
  return CeilCount((1.0 - sparsity) * n_out);
}

double LayerCutoff(std::span<const double> distances) {
  if (distances.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cut-off over an empty layer");
  }
  return *std::max_element(distances.begin(), distances.end());
}

std::vector<std::vector<int>> ClustersPerChannel(const MergeSequence& seq,
                                                 int n_merges, double h) {
  return ControlCut(seq, n_merges, h);
}

LayerClusterUniverse BuildUniverse(const ConvLayer& layer, double sparsity,
                                   const UniverseOptions& options,
                                   std::span<const int> live_out,
                                   std::span<const int> live_in) {
  if (!layer.prunable) {
    throw Error(ErrorCode::kConstraintViolation,
                "layer '" + layer.name + "' is not prunable");
  }
  CheckSparsity(sparsity);
  if (sparsity >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "layer '" + layer.name + "' has sparsity 1; nothing to cluster");
  }
  LayerClusterUniverse universe;
  universe.layer = layer.name;
  universe.sparsity = sparsity;
  if (live_out.empty()) {
    universe.filters.resize(layer.out_channels);
    std::iota(universe.filters.begin(), universe.filters.end(), 0);
  } else {
    universe.filters.assign(live_out.begin(), live_out.end());
  }
  std::vector<int> channels;
  if (live_in.empty()) {
    channels.resize(layer.in_channels);
    std::iota(channels.begin(), channels.end(), 0);
  } else {
    channels.assign(live_in.begin(), live_in.end());
  }
  const int n = static_cast<int>(universe.filters.size());
  universe.n_merges = std::min(MergeBudget(sparsity, n), n - 1);

  std::vector<MergeSequence> sequences;
  sequences.reserve(channels.size());
  std::vector<double> distances;
  distances.reserve(channels.size());
  for (int j : channels) {
    const KernelSet kernels = KernelSet::FromLayer(layer, j, universe.filters);
    sequences.push_back(Agglomerate(kernels, options.method, universe.n_merges));
    distances.push_back(sequences.back().Objective(universe.n_merges));
  }
  universe.cutoff = options.external_cutoff.value_or(LayerCutoff(distances));

  for (std::size_t c = 0; c < channels.size(); ++c) {
    ChannelClusters cc;
    cc.channel = channels[c];
    cc.distance = distances[c];
    cc.cut_step = CutStep(sequences[c], universe.n_merges, universe.cutoff);
    cc.labels = sequences[c].Labels(cc.cut_step);
    cc.num_clusters = n - cc.cut_step;
    universe.universe_size += cc.num_clusters;
    universe.channels.push_back(std::move(cc));
  }
  return universe;
}

}  // namespace reprune
