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

#include "reprune/scheduler.h"

#include <algorithm>
#include <cmath>

#include "reprune/error.h"

namespace reprune {

std::string_view PoolModeName(PoolMode mode) {
  return mode == PoolMode::kLiveOnly ? "live" : "zeros";
}

PoolMode ParsePoolMode(std::string_view name) {
  if (name == "zeros") return PoolMode::kMaskedAsZero;
  if (name == "live") return PoolMode::kLiveOnly;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown gamma pool mode '" + std::string(name) + "'");
}

GammaPool GammaPool::FromSnapshot(const ModelSnapshot& snapshot,
                                  const PruneMask* mask, PoolMode mode) {
  GammaPool pool;
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    const ConvLayer& layer = snapshot.layers[l];
    if (!layer.prunable || !layer.has_bn()) continue;
    for (int c = 0; c < layer.out_channels; ++c) {
      const bool live = mask == nullptr || mask->keep_out[l][c];
      if (!live && mode == PoolMode::kLiveOnly) continue;
      pool.entries.push_back(
          {static_cast<int>(l), c, live ? static_cast<double>(layer.gammas[c]) : 0.0});
    }
  }
  return pool;
}

std::vector<double> GammaPool::values() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const GammaEntry& e : entries) out.push_back(e.gamma);
  return out;
}

std::optional<double> QuantileThreshold(std::span<const double> pool,
                                        double target) {
  if (pool.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "quantile of an empty gamma pool");
  }
  if (!(target >= 0.0 && target < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "global sparsity " + std::to_string(target) + " outside [0, 1)");
  }
  if (target == 0.0) return std::nullopt;
  const auto n = static_cast<double>(pool.size());
  // Smallest rank m with m / n >= target, evaluated exactly as F would be.
  std::size_t m = static_cast<std::size_t>(std::ceil(target * n));
  m = std::clamp<std::size_t>(m, 1, pool.size());
  while (m > 1 && static_cast<double>(m - 1) / n >= target) --m;
  while (m < pool.size() && static_cast<double>(m) / n < target) ++m;
  std::vector<double> sorted(pool.begin(), pool.end());
  std::nth_element(sorted.begin(), sorted.begin() + (m - 1), sorted.end());
  return sorted[m - 1];
}

std::optional<double> QuantileThreshold(const GammaPool& pool, double target) {
  const std::vector<double> values = pool.values();
  return QuantileThreshold(std::span<const double>(values), target);
}

int CountAtOrBelow(std::span<const double> gammas, double threshold) {
  return static_cast<int>(std::count_if(
      gammas.begin(), gammas.end(), [threshold](double g) { return g <= threshold; }));
}

double LayerSparsity(std::span<const double> gammas, double threshold) {
  if (gammas.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "layer sparsity of no channels");
  }
  return static_cast<double>(CountAtOrBelow(gammas, threshold)) /
         static_cast<double>(gammas.size());
}

void Schedule::Validate() const {
  if (delta_t < 1) {
    throw Error(ErrorCode::kInvalidArgument, "delta_t must be >= 1");
  }
  if (t_prune < 0) {
    throw Error(ErrorCode::kInvalidArgument, "t_prune must be >= 0");
  }
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sparsity must lie in [0, 1)");
  }
}

bool ShouldPrune(int epoch, const Schedule& schedule) {
  if (epoch < 1) throw Error(ErrorCode::kInvalidArgument, "epochs start at 1");
  return epoch % schedule.delta_t == 0 && epoch <= schedule.t_prune;
}

PruneState PruneState::Initial(const ModelSnapshot& snapshot) {
  PruneState state;
  state.mask = PruneMask::AllTrue(snapshot);
  state.sparsities.assign(snapshot.layers.size(), 0.0);
  state.pruned.resize(snapshot.layers.size());
  return state;
}

void RecordPruned(PruneState& state, const ModelSnapshot& snapshot, int layer,
                  std::span<const int> channels) {
  const ConvLayer& conv = snapshot.layers[layer];
  for (int c : channels) {
    state.mask.keep_out[layer][c] = false;
    const double gamma = conv.has_bn() ? conv.gammas[c] : 0.0;
    state.pruned[layer].push_back({c, gamma, state.epoch});
  }
  state.mask.Align(snapshot);
}

std::vector<int> Regrow(PruneState& state, const ModelSnapshot& snapshot,
                        int layer, int count) {
  auto& history = state.pruned[layer];
  if (count < 0 || count > static_cast<int>(history.size())) {
    throw Error(ErrorCode::kOutOfRange,
                "cannot regrow " + std::to_string(count) + " of " +
                    std::to_string(history.size()) + " pruned channels");
  }
  std::stable_sort(history.begin(), history.end(),
                   [](const PrunedChannel& a, const PrunedChannel& b) {
                     if (a.last_gamma != b.last_gamma) {
                       return a.last_gamma > b.last_gamma;
                     }
                     return a.channel < b.channel;
                   });
  std::vector<int> restored;
  for (int i = 0; i < count; ++i) {
    restored.push_back(history[i].channel);
    state.mask.keep_out[layer][history[i].channel] = true;
  }
  history.erase(history.begin(), history.begin() + count);
  std::sort(history.begin(), history.end(),
            [](const PrunedChannel& a, const PrunedChannel& b) {
              return a.channel < b.channel;
            });
  state.mask.Align(snapshot);
  return restored;
}

int MinimumOneRegrowth::Count(const RegrowContext& context) const {
  return context.full_prune ? std::min(1, context.pruned) : 0;
}

std::unique_ptr<RegrowPolicy> MakeRegrowPolicy(std::string_view name) {
  if (name == "min-one") return std::make_unique<MinimumOneRegrowth>();
  if (name == "none") return std::make_unique<NoRegrowth>();
  throw Error(ErrorCode::kInvalidArgument,
              "unknown regrow policy '" + std::string(name) + "'");
}

}  // namespace reprune
