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

#include "reprune/pipeline.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "reprune/cluster_foundation.h"
#include "reprune/error.h"
#include "reprune/flops.h"
#include "reprune/random.h"

namespace reprune {

std::vector<double> FilterNorms(const ConvLayer& layer,
                                const std::vector<int>& filters,
                                const std::vector<int>& live_in) {
  std::vector<double> norms;
  norms.reserve(filters.size());
  for (int f : filters) {
    double sum = 0.0;
    for (int j : live_in) {
      for (float w : layer.kernel(f, j)) sum += static_cast<double>(w) * w;
    }
    norms.push_back(std::sqrt(sum));
  }
  return norms;
}

ChannelSelectionResult ChannelSelection(const ModelSnapshot& snapshot,
                                        const PruneMask& current,
                                        const std::vector<double>& sparsities,
                                        const SelectionOptions& options,
                                        std::uint64_t event) {
  CheckMask(snapshot, current);
  if (sparsities.size() != snapshot.layers.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need one sparsity per layer, got " +
                    std::to_string(sparsities.size()));
  }
  ChannelSelectionResult result;
  result.mask = current;
  const std::uint64_t event_seed = MixSeed(options.seed, event);
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    const ConvLayer& layer = snapshot.layers[l];
    const double s = sparsities[l];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sparsity of '" + layer.name + "' outside [0, 1]");
    }
    if (!layer.prunable) {
      if (s != 0.0) {
        throw Error(ErrorCode::kConstraintViolation,
                    "sparsity requested on non-prunable layer '" + layer.name + "'");
      }
      continue;
    }
    if (s >= 1.0) {
      result.skipped.push_back(static_cast<int>(l));
      continue;
    }
    const std::vector<int> live_out = current.live_out(static_cast<int>(l));
    const std::vector<int> live_in = current.live_in(static_cast<int>(l));
    const LayerClusterUniverse universe =
        BuildUniverse(layer, s, {.method = options.method, .external_cutoff = std::nullopt},
                      live_out, live_in);
    const int n = static_cast<int>(live_out.size());
    const int k = std::clamp(KeepCount(s, n), 1, n);
    std::vector<double> norms;
    if (options.tie != TieBreak::Kind::kRandom) {
      norms = FilterNorms(layer, live_out, live_in);
    }
    const CoverageInstance instance =
        CoverageInstance::FromUniverse(universe, k, std::move(norms));
    const SelectionResult selection = SelectGreedy(
        instance, {options.tie, MixSeed(event_seed, l)});

    auto& keep = result.mask.keep_out[l];
    std::fill(keep.begin(), keep.end(), false);
    LayerSelection record;
    record.layer = static_cast<int>(l);
    record.name = layer.name;
    record.sparsity = s;
    record.live_before = n;
    record.n_merges = universe.n_merges;
    record.cutoff = universe.cutoff;
    record.universe_size = universe.universe_size;
    record.k = k;
    for (int r : selection.selected) {
      keep[live_out[r]] = true;
      record.selected.push_back(live_out[r]);
    }
    record.gains = selection.gains;
    record.rates = selection.rates;
    record.rate = selection.rate;
    result.layers.push_back(std::move(record));
  }
  result.mask.Align(snapshot);
  return result;
}

PruneMask ChannelSelection(const ModelSnapshot& snapshot,
                           const std::vector<double>& sparsities,
                           const SelectionOptions& options) {
  return ChannelSelection(snapshot, PruneMask::AllTrue(snapshot), sparsities,
                          options)
      .mask;
}

void DriftTrainer::Step(ModelSnapshot& model, int epoch, std::uint64_t seed) {
  Rng rng(seed);
  for (ConvLayer& layer : model.layers) {
    double drift = 0.0;
    if (epoch >= options_.drift_start) {
      const auto it = options_.layer_gamma_drift.find(layer.name);
      drift = it != options_.layer_gamma_drift.end() ? it->second
                                                     : options_.gamma_drift;
    }
    for (float& g : layer.gammas) {
      double delta = drift;
      if (options_.gamma_noise > 0.0) {
        delta += options_.gamma_noise * rng.Uniform(-1.0, 1.0);
      }
      g = static_cast<float>(std::max(0.0, static_cast<double>(g) + delta));
    }
    if (options_.weight_noise > 0.0) {
      for (float& w : layer.weights) {
        w = static_cast<float>(w + options_.weight_noise * rng.Uniform(-1.0, 1.0));
      }
    }
  }
}

PipelineResult RunPipeline(const ModelSnapshot& snapshot, Trainer& trainer,
                           const PipelineConfig& config,
                           const EventObserver& observer) {
  config.schedule.Validate();
  if (config.epochs < 0) {
    throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 0");
  }
  ValidateTensors(snapshot);
  const auto policy = MakeRegrowPolicy(config.regrow);

  ModelSnapshot working = snapshot;
  PruneState state = PruneState::Initial(working);
  RunReport report;
  report.config = config;
  report.model = snapshot.model;

  for (int t = 1; t <= config.epochs; ++t) {
    trainer.Step(working, t, MixSeed(config.trainer_seed, 0x7472'0000u + t));
    for (std::size_t l = 0; l < working.layers.size(); ++l) {
      const ConvLayer& a = working.layers[l];
      const ConvLayer& b = snapshot.layers[l];
      if (a.weights.size() != b.weights.size() || a.gammas.size() != b.gammas.size()) {
        throw Error(ErrorCode::kConstraintViolation,
                    "trainer changed the shape of '" + a.name + "'");
      }
    }
    ValidateTensors(working);
    state.epoch = t;
    if (!ShouldPrune(t, config.schedule)) continue;

    PruningEvent event;
    event.epoch = t;
    const GammaPool pool = GammaPool::FromSnapshot(working, &state.mask, config.pool);
    if (!pool.entries.empty()) {
      event.threshold = QuantileThreshold(pool, config.schedule.sparsity);
    }

    std::vector<double> sparsities(working.layers.size(), 0.0);
    for (int l : working.PrunableLayers()) {
      const ConvLayer& layer = working.layers[l];
      if (!event.threshold || !layer.has_bn()) continue;
      std::vector<double> live;
      for (int c : state.mask.live_out(l)) live.push_back(layer.gammas[c]);
      sparsities[l] = LayerSparsity(live, *event.threshold);
    }

    const ChannelSelectionResult selection = ChannelSelection(
        working, state.mask, sparsities, config.selection, static_cast<std::uint64_t>(t));
    for (const LayerSelection& ls : selection.layers) {
      std::vector<int> dropped;
      for (int c : state.mask.live_out(ls.layer)) {
        if (!selection.mask.keep_out[ls.layer][c]) dropped.push_back(c);
      }
      RecordPruned(state, working, ls.layer, dropped);
    }
    for (int l : selection.skipped) event.skipped.push_back(working.layers[l].name);

    for (int l : working.PrunableLayers()) {
      const RegrowContext context{
          .layer = l,
          .sparsity = sparsities[l],
          .full_prune = std::find(selection.skipped.begin(), selection.skipped.end(),
                                  l) != selection.skipped.end(),
          .live = state.mask.kept(l),
          .pruned = state.pruned_count(l),
      };
      const int count = policy->Count(context);
      if (count == 0) continue;
      event.regrowth.push_back(
          {working.layers[l].name, Regrow(state, working, l, count)});
    }

    CheckMask(working, state.mask);
    state.sparsities = sparsities;
    for (const LayerSelection& ls : selection.layers) {
      report.records.push_back({t, ls, state.mask.kept(ls.layer)});
    }
    report.events.push_back(std::move(event));
    if (observer) observer(t, working, state);
  }

  PipelineResult result;
  result.mask = state.mask;
  result.pruned = ApplyMasks(working, state.mask);
  report.flops_before = ModelFlops(snapshot).total;
  report.flops_after = ModelFlops(result.pruned).total;
  report.flops_reduction = 1.0 - static_cast<double>(report.flops_after) /
                                     static_cast<double>(report.flops_before);
  for (std::size_t l = 0; l < result.pruned.layers.size(); ++l) {
    report.final_layers.push_back({result.pruned.layers[l].name,
                                   result.pruned.layers[l].out_channels,
                                   snapshot.layers[l].out_channels});
  }
  result.report = std::move(report);
  return result;
}

}  // namespace reprune
