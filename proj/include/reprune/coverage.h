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

// Maximum cluster coverage: choose k filters of a layer so that their
// kernels land in as many distinct clusters of the layer universe as
// possible. Solved greedily (each step takes a filter with the most
// still-uncovered clusters), which is within 1 - 1/e of optimal.

#ifndef REPRUNE_COVERAGE_H_
#define REPRUNE_COVERAGE_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "reprune/cluster_foundation.h"

namespace reprune {

struct TieBreak {
  enum class Kind { kRandom, kMaxL2, kMinL2 };

  Kind kind = Kind::kRandom;
  std::uint64_t seed = 0;

  static TieBreak Random(std::uint64_t seed) { return {Kind::kRandom, seed}; }
  static TieBreak MaxL2() { return {Kind::kMaxL2, 0}; }
  static TieBreak MinL2() { return {Kind::kMinL2, 0}; }
};

// "random", "max-l2" or "min-l2".
TieBreak ParseTieBreak(std::string_view name, std::uint64_t seed);
std::string_view TieBreakName(TieBreak::Kind kind);

class CoverageInstance {
 public:
  // channel_labels[j][i] is the cluster (within channel j) holding filter
  // i's kernel; clusters_per_channel[j] bounds those labels. Every cluster
  // must hold at least one kernel. `filter_norms` (one per filter) is only
  // needed by the l2-norm tie-breaks.
  CoverageInstance(int num_filters, std::vector<int> clusters_per_channel,
                   const std::vector<std::vector<int>>& channel_labels, int k,
                   std::vector<double> filter_norms = {});

  static CoverageInstance FromUniverse(const LayerClusterUniverse& universe,
                                       int k,
                                       std::vector<double> filter_norms = {});

  int num_filters() const { return num_filters_; }
  int num_channels() const { return num_channels_; }
  int universe_size() const { return universe_size_; }
  int k() const { return k_; }
  // Universe-wide cluster id of kernel (filter, channel).
  int cluster(int filter, int channel) const {
    return cluster_of_[static_cast<std::size_t>(filter) * num_channels_ + channel];
  }
  // Filters whose kernels fall in `cluster`.
  const std::vector<int>& members(int cluster) const { return members_[cluster]; }
  std::span<const double> filter_norms() const { return filter_norms_; }

 private:
  int num_filters_;
  int num_channels_;
  int universe_size_ = 0;
  int k_;
  std::vector<int> cluster_of_;
  std::vector<std::vector<int>> members_;
  std::vector<double> filter_norms_;
};

struct SelectionResult {
  // Filter indices in selection order.
  std::vector<int> selected;
  std::vector<bool> covered;
  // Newly covered clusters at each step.
  std::vector<int> gains;
  // Coverage rate after each step.
  std::vector<double> rates;
  int covered_count = 0;
  double rate = 0.0;
};

// Sum of coverage scores of filter i: how many of its kernels map to a
// cluster not yet in `covered`.
int FilterGain(const CoverageInstance& instance, int filter,
               const std::vector<bool>& covered);

// Binary coverage score per kernel, row-major (filter, channel): 1 while
// the kernel's cluster is uncovered.
std::vector<std::uint8_t> CoverageScores(const CoverageInstance& instance,
                                         const std::vector<bool>& covered);

// Picks exactly k filters. Each step takes a filter of maximal gain; ties
// (zero-gain steps included) are resolved by `tie`. Throws
// Error(kInvalidArgument) when an l2 tie-break lacks filter norms.
SelectionResult SelectGreedy(const CoverageInstance& instance,
                             const TieBreak& tie);

// Exact best coverage over all k-subsets. Throws Error(kOutOfRange) above 20
// filters.
int BruteForceOptimum(const CoverageInstance& instance);

// covered / universe size. Throws Error(kInvalidArgument) on an empty
// universe.
double CoverageRate(const SelectionResult& result, int universe_size);

}  // namespace reprune

#endif  // REPRUNE_COVERAGE_H_
