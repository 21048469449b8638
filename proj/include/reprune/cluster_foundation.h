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

// Per-layer cluster universe: the merge budget implied by a layer sparsity,
// the layer-wide linkage cut-off, and the per-channel partitions that
// filter selection has to cover.

#ifndef REPRUNE_CLUSTER_FOUNDATION_H_
#define REPRUNE_CLUSTER_FOUNDATION_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reprune/linkage.h"
#include "reprune/model.h"

namespace reprune {

// ceil(x), except values within 1e-9 (relative) of an integer snap to it, so
// products like 0.7 * 10 count as 7 rather than 8.
int CeilCount(double x);

// ceil(s * n). Throws Error(kInvalidArgument) unless 0 <= s <= 1.
int MergeBudget(double sparsity, int n_out);

// ceil((1 - s) * n): filters that survive a layer sparsity of s.
int KeepCount(double sparsity, int n_out);

// Largest per-channel merge distance. Throws Error(kInvalidArgument) when
// empty.
double LayerCutoff(std::span<const double> distances);

// Partition of one channel under the cut-off: the clusters after n_merges
// merges if h >= d(n_merges), else after n_merges - 1.
std::vector<std::vector<int>> ClustersPerChannel(const MergeSequence& seq,
                                                 int n_merges, double h);

struct ChannelClusters {
  int channel = 0;      // in-channel index in the layer
  double distance = 0;  // d(n_merges) for this channel
  int cut_step = 0;     // merges actually kept after the cut-off
  int num_clusters = 0;
  // Cluster label of each live filter's kernel, dense in [0, num_clusters).
  std::vector<int> labels;
};

struct LayerClusterUniverse {
  std::string layer;
  double sparsity = 0.0;
  int n_merges = 0;
  double cutoff = 0.0;
  int universe_size = 0;
  // Original out-channel index of each live filter (local row r).
  std::vector<int> filters;
  std::vector<ChannelClusters> channels;
};

struct UniverseOptions {
  LinkageMethod method = LinkageMethod::kWard;
  // Replaces the layer-wide maximum as cut-off height, e.g. a height carried
  // over from an earlier pruning event.
  std::optional<double> external_cutoff;
};

// Clusters every live in-channel of `layer` over its live filters. Empty
// spans mean all channels. Throws Error(kConstraintViolation) for a
// non-prunable layer and Error(kInvalidArgument) unless 0 <= s < 1. The
// merge budget is clamped to n_live - 1.
LayerClusterUniverse BuildUniverse(const ConvLayer& layer, double sparsity,
                                   const UniverseOptions& options = {},
                                   std::span<const int> live_out = {},
                                   std::span<const int> live_in = {});

}  // namespace reprune

#endif  // REPRUNE_CLUSTER_FOUNDATION_H_
