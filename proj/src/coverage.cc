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

#include "reprune/coverage.h"

#include <algorithm>
#include <bit>
#include <string>

#include "reprune/error.h"
#include "reprune/random.h"

namespace reprune {

TieBreak ParseTieBreak(std::string_view name, std::uint64_t seed) {
  if (name == "random") return TieBreak::Random(seed);
  if (name == "max-l2") return TieBreak::MaxL2();
  if (name == "min-l2") return TieBreak::MinL2();
  throw Error(ErrorCode::kInvalidArgument,
              "unknown tie-break '" + std::string(name) + "'");
}

std::string_view TieBreakName(TieBreak::Kind kind) {
  switch (kind) {
    case TieBreak::Kind::kRandom:
      return "random";
    case TieBreak::Kind::kMaxL2:
      return "max-l2";
    case TieBreak::Kind::kMinL2:
      return "min-l2";
  }
  return "random";
}

CoverageInstance::CoverageInstance(
    int num_filters, std::vector<int> clusters_per_channel,
    const std::vector<std::vector<int>>& channel_labels, int k,
    std::vector<double> filter_norms)
    : num_filters_(num_filters),
      num_channels_(static_cast<int>(clusters_per_channel.size())),
      k_(k),
      filter_norms_(std::move(filter_norms)) {
  if (num_filters_ < 1 || num_channels_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "empty coverage instance");
  }
  if (k_ < 1 || k_ > num_filters_) {
    throw Error(ErrorCode::kInvalidArgument,
                "selection count " + std::to_string(k_) + " outside [1, " +
                    std::to_string(num_filters_) + "]");
  }
  if (channel_labels.size() != clusters_per_channel.size()) {
    throw Error(ErrorCode::kInvalidArgument, "label table / channel mismatch");
  }
  if (!filter_norms_.empty() &&
      filter_norms_.size() != static_cast<std::size_t>(num_filters_)) {
    throw Error(ErrorCode::kInvalidArgument, "one norm per filter required");
  }
  std::vector<int> offset(num_channels_);
  for (int j = 0; j < num_channels_; ++j) {
    offset[j] = universe_size_;
    universe_size_ += clusters_per_channel[j];
  }
  cluster_of_.resize(static_cast<std::size_t>(num_filters_) * num_channels_);
  members_.resize(universe_size_);
  for (int j = 0; j < num_channels_; ++j) {
    if (channel_labels[j].size() != static_cast<std::size_t>(num_filters_)) {
      throw Error(ErrorCode::kInvalidArgument, "label row length mismatch");
    }
    for (int i = 0; i < num_filters_; ++i) {
      const int label = channel_labels[j][i];
      if (label < 0 || label >= clusters_per_channel[j]) {
        throw Error(ErrorCode::kInvalidArgument, "cluster label out of range");
      }
      const int id = offset[j] + label;
      cluster_of_[static_cast<std::size_t>(i) * num_channels_ + j] = id;
      members_[id].push_back(i);
    }
  }
  for (const auto& m : members_) {
    if (m.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "cluster without kernels");
    }
  }
}

CoverageInstance CoverageInstance::FromUniverse(
    const LayerClusterUniverse& universe, int k,
    std::vector<double> filter_norms) {
  std::vector<int> counts;
  std::vector<std::vector<int>> labels;
  for (const ChannelClusters& cc : universe.channels) {
    counts.push_back(cc.num_clusters);
    labels.push_back(cc.labels);
  }
  return CoverageInstance(static_cast<int>(universe.filters.size()),
                          std::move(counts), labels, k, std::move(filter_norms));
}

int FilterGain(const CoverageInstance& instance, int filter,
               const std::vector<bool>& covered) {
  int gain = 0;
  for (int j = 0; j < instance.num_channels(); ++j) {
    if (!covered[instance.cluster(filter, j)]) ++gain;
  }
  return gain;
}

std::vector<std::uint8_t> CoverageScores(const CoverageInstance& instance,
                                         const std::vector<bool>& covered) {
  std::vector<std::uint8_t> scores(
      static_cast<std::size_t>(instance.num_filters()) * instance.num_channels());
  for (int i = 0; i < instance.num_filters(); ++i) {
    for (int j = 0; j < instance.num_channels(); ++j) {
      scores[static_cast<std::size_t>(i) * instance.num_channels() + j] =
          covered[instance.cluster(i, j)] ? 0 : 1;
    }
  }
  return scores;
}

SelectionResult SelectGreedy(const CoverageInstance& instance,
                             const TieBreak& tie) {
  const int n = instance.num_filters();
  if (tie.kind != TieBreak::Kind::kRandom && instance.filter_norms().empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "l2-norm tie-break needs filter norms");
  }
  Rng rng(tie.seed);
  const auto norms = instance.filter_norms();

  SelectionResult result;
  result.covered.assign(instance.universe_size(), false);
  // Kernels of one filter sit in distinct per-channel clusters, so a fresh
  // filter covers one new cluster per channel.
  std::vector<int> gain(n, instance.num_channels());
  std::vector<bool> taken(n, false);
  std::vector<int> candidates;
  candidates.reserve(n);

  while (static_cast<int>(result.selected.size()) < instance.k()) {
    int best = -1;
    candidates.clear();
    for (int i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (gain[i] > best) {
        best = gain[i];
        candidates.clear();
      }
      if (gain[i] == best) candidates.push_back(i);
    }
    int pick = candidates.front();
    switch (tie.kind) {
      case TieBreak::Kind::kRandom:
        pick = candidates[rng.Below(candidates.size())];
        break;
      case TieBreak::Kind::kMaxL2:
        for (int i : candidates) {
          if (norms[i] > norms[pick]) pick = i;
        }
        break;
      case TieBreak::Kind::kMinL2:
        for (int i : candidates) {
          if (norms[i] < norms[pick]) pick = i;
        }
        break;
    }

    taken[pick] = true;
    result.selected.push_back(pick);
    result.gains.push_back(best);
    for (int j = 0; j < instance.num_channels(); ++j) {
      const int c = instance.cluster(pick, j);
      if (result.covered[c]) continue;
      result.covered[c] = true;
      ++result.covered_count;
      for (int f : instance.members(c)) --gain[f];
    }
    result.rates.push_back(static_cast<double>(result.covered_count) /
                           instance.universe_size());
  }
  result.rate = CoverageRate(result, instance.universe_size());
  return result;
}

int BruteForceOptimum(const CoverageInstance& instance) {
  const int n = instance.num_filters();
  if (n > 20) {
    throw Error(ErrorCode::kOutOfRange,
                "brute force limited to 20 filters, got " + std::to_string(n));
  }
  const int k = instance.k();
  int best = 0;
  std::vector<bool> covered(instance.universe_size());
  for (std::uint32_t subset = 0; subset < (1u << n); ++subset) {
    if (std::popcount(subset) != k) continue;
    std::fill(covered.begin(), covered.end(), false);
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (!(subset >> i & 1u)) continue;
      for (int j = 0; j < instance.num_channels(); ++j) {
        const int c = instance.cluster(i, j);
        if (!covered[c]) {
          covered[c] = true;
          ++count;
        }
      }
    }
    best = std::max(best, count);
  }
  return best;
}

double CoverageRate(const SelectionResult& result, int universe_size) {
  if (universe_size <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "coverage rate of an empty universe");
  }
  return static_cast<double>(result.covered_count) / universe_size;
}

}  // namespace reprune
