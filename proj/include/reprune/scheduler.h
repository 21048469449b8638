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

// Sparsity scheduling from BN scaling factors: the global quantile
// threshold, per-layer sparsities, the pruning calendar, and channel
// regrowth.

#ifndef REPRUNE_SCHEDULER_H_
#define REPRUNE_SCHEDULER_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reprune/masks.h"
#include "reprune/model.h"

namespace reprune {

struct GammaEntry {
  int layer = 0;
  int channel = 0;
  double gamma = 0.0;
};

// How channels removed by an earlier event enter the pool.
enum class PoolMode {
  // As zero: a masked channel contributes no scale, and the target stays
  // relative to the original width.
  kMaskedAsZero,
  // Left out: the target applies to the live channels of each event.
  kLiveOnly,
};

std::string_view PoolModeName(PoolMode mode);
// "zeros" or "live".
PoolMode ParsePoolMode(std::string_view name);

// Gammas of prunable layers, filtered or zeroed by `mask` per `mode`.
struct GammaPool {
  std::vector<GammaEntry> entries;

  static GammaPool FromSnapshot(const ModelSnapshot& snapshot,
                                const PruneMask* mask = nullptr,
                                PoolMode mode = PoolMode::kMaskedAsZero);
  std::vector<double> values() const;
};

// inf{g in pool : F(g) >= target} with F the empirical CDF. A target of 0
// means "prune nothing" and yields nullopt. Throws Error(kInvalidArgument)
// for an empty pool or a target outside [0, 1).
std::optional<double> QuantileThreshold(std::span<const double> pool,
                                        double target);
std::optional<double> QuantileThreshold(const GammaPool& pool, double target);

// Number of gammas <= threshold.
int CountAtOrBelow(std::span<const double> gammas, double threshold);

// Fraction of a layer's channels whose gamma is <= threshold. Throws
// Error(kInvalidArgument) for an empty list.
double LayerSparsity(std::span<const double> gammas, double threshold);

struct Schedule {
  int t_prune = 180;
  int delta_t = 2;
  double sparsity = 0.0;  // global target in [0, 1)

  // Throws Error(kInvalidArgument) unless delta_t >= 1, t_prune >= 0 and
  // 0 <= sparsity < 1.
  void Validate() const;
};

// True iff epoch is a multiple of delta_t and epoch <= t_prune. Throws
// Error(kInvalidArgument) for epoch < 1.
bool ShouldPrune(int epoch, const Schedule& schedule);

struct PrunedChannel {
  int channel = 0;
  double last_gamma = 0.0;
  int epoch = 0;
};

struct PruneState {
  PruneMask mask;
  // Most recent s^l per layer (0 for layers never processed).
  std::vector<double> sparsities;
  // Currently pruned channels per layer.
  std::vector<std::vector<PrunedChannel>> pruned;
  int epoch = 0;

  static PruneState Initial(const ModelSnapshot& snapshot);
  int pruned_count(int layer) const {
    return static_cast<int>(pruned[layer].size());
  }
};

// Marks `channels` of `layer` as pruned, remembering their current gammas.
void RecordPruned(PruneState& state, const ModelSnapshot& snapshot, int layer,
                  std::span<const int> channels);

// Restores the `count` pruned channels of `layer` with the highest
// last-known gamma (lowest index on ties). Weights were never discarded, so
// restored channels come back as they were. Returns the restored indices.
// Throws Error(kOutOfRange) if count exceeds the pruned channels.
std::vector<int> Regrow(PruneState& state, const ModelSnapshot& snapshot,
                        int layer, int count);

struct RegrowContext {
  int layer = 0;
  double sparsity = 0.0;
  // s^l reached 1 and selection was skipped for this layer.
  bool full_prune = false;
  int live = 0;
  int pruned = 0;
};

class RegrowPolicy {
 public:
  virtual ~RegrowPolicy() = default;
  virtual std::string_view name() const = 0;
  // Channels to restore; must not exceed context.pruned.
  virtual int Count(const RegrowContext& context) const = 0;
};

// Restores one channel whenever a layer hits s^l = 1 (if it has any pruned).
class MinimumOneRegrowth : public RegrowPolicy {
 public:
  std::string_view name() const override { return "min-one"; }
  int Count(const RegrowContext& context) const override;
};

class NoRegrowth : public RegrowPolicy {
 public:
  std::string_view name() const override { return "none"; }
  int Count(const RegrowContext&) const override { return 0; }
};

// "min-one" or "none".
std::unique_ptr<RegrowPolicy> MakeRegrowPolicy(std::string_view name);

}  // namespace reprune

#endif  // REPRUNE_SCHEDULER_H_
