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

// Bottom-up agglomerative clustering of one input channel's kernels.
//
// Every cluster starts as a singleton. Each step merges the closest pair of
// active clusters; distances to the merged cluster follow the Lance-Williams
// recurrence, so a step costs O(n) updates and the whole run O(n^2 log n)
// with a lazily-invalidated heap.
//
// Cluster ids: singletons are 0..n-1, the cluster created at step c gets id
// n + c - 1. Distance ties go to the lexicographically smallest
// (left id, right id) pair with left < right.
//
// Ward distances are the SSE increase |A||B|/(|A|+|B|) * ||m_A - m_B||^2
// (squared Euclidean). Single, complete and average linkage use plain
// Euclidean distance between kernels.

#ifndef REPRUNE_LINKAGE_H_
#define REPRUNE_LINKAGE_H_

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "reprune/model.h"

namespace reprune {

enum class LinkageMethod { kWard, kSingle, kComplete, kAverage };

std::string_view LinkageMethodName(LinkageMethod method);
LinkageMethod ParseLinkageMethod(std::string_view name);

// n flattened kernels of equal length `dim`, all taken from input channel
// `channel` of one layer.
class KernelSet {
 public:
  KernelSet(int channel, int dim, std::vector<double> values);

  // Kernels (rows[r], in_channel) of `layer`; an empty `rows` means every
  // output channel. Flattened row-major over (kernel_h, kernel_w).
  static KernelSet FromLayer(const ConvLayer& layer, int in_channel,
                             std::span<const int> rows = {});

  int channel() const { return channel_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(values_.size()) / dim_; }
  std::span<const double> operator[](int i) const {
    return std::span<const double>(values_).subspan(
        static_cast<std::size_t>(i) * dim_, dim_);
  }

 private:
  int channel_;
  int dim_;
  std::vector<double> values_;
};

struct Merge {
  int step = 0;  // 1-based
  int left = 0;  // cluster ids, left < right
  int right = 0;
  double distance = 0.0;
  int size = 0;  // members of the merged cluster
};

class MergeSequence {
 public:
  MergeSequence(int num_points, std::vector<Merge> merges);

  int num_points() const { return num_points_; }
  int steps() const { return static_cast<int>(merges_.size()); }
  const std::vector<Merge>& merges() const { return merges_; }

  // d(c): the distance of the c-th merge; d(0) = 0. Throws
  // Error(kOutOfRange) past the performed steps.
  double Objective(int c) const;

  // Cluster label per point after c merges. Labels are dense, numbered by
  // the smallest member index.
  std::vector<int> Labels(int c) const;

  // Clusters after c merges, each sorted, ordered by smallest member.
  std::vector<std::vector<int>> Partition(int c) const;

 private:
  int num_points_;
  std::vector<Merge> merges_;
};

// Ward distance between two disjoint, non-empty clusters of equal-length
// vectors. Throws Error(kInvalidArgument) on an empty cluster or ragged
// vectors.
double WardDistance(std::span<const std::vector<double>> a,
                    std::span<const std::vector<double>> b);

// Runs exactly `steps` merges. Throws Error(kOutOfRange) unless
// 0 <= steps <= n - 1.
MergeSequence Agglomerate(const KernelSet& kernels, LinkageMethod method,
                          int steps);

// Linkage control: the step whose partition the cut yields, c when
// h >= d(c) and c - 1 otherwise (never below 0).
int CutStep(const MergeSequence& seq, int c, double h);
std::vector<std::vector<int>> ControlCut(const MergeSequence& seq, int c,
                                         double h);

bool CheckMonotone(const MergeSequence& seq);

// One JSON object per line: {"channel", "step", "a", "b", "distance"}.
void WriteDendrogramJsonl(std::ostream& out, const MergeSequence& seq,
                          int channel);

}  // namespace reprune

#endif  // REPRUNE_LINKAGE_H_
