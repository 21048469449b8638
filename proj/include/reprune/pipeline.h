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

// Channel selection over a whole model and the progressive
// training-pruning loop around it.

#ifndef REPRUNE_PIPELINE_H_
#define REPRUNE_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reprune/coverage.h"
#include "reprune/linkage.h"
#include "reprune/masks.h"
#include "reprune/model.h"
#include "reprune/scheduler.h"

namespace reprune {

struct SelectionOptions {
  LinkageMethod method = LinkageMethod::kWard;
  TieBreak::Kind tie = TieBreak::Kind::kRandom;
  std::uint64_t seed = 0;
};

// What selection did to one prunable layer at one event.
struct LayerSelection {
  int layer = 0;
  std::string name;
  double sparsity = 0.0;
  int live_before = 0;
  int n_merges = 0;
  double cutoff = 0.0;
  int universe_size = 0;
  int k = 0;
  // Original out-channel indices in selection order.
  std::vector<int> selected;
  std::vector<int> gains;
  std::vector<double> rates;
  double rate = 0.0;
};

struct ChannelSelectionResult {
  PruneMask mask;
  std::vector<LayerSelection> layers;
  // Prunable layers left untouched because their sparsity was 1.
  std::vector<int> skipped;
};

// Runs cluster-then-cover selection on every prunable layer of the masked
// view `current`. `sparsities` is indexed by layer; entries for
// non-prunable layers must be 0. Layers at sparsity 1 are skipped with
// their mask untouched. `event` salts the per-layer random streams.
ChannelSelectionResult ChannelSelection(const ModelSnapshot& snapshot,
                                        const PruneMask& current,
                                        const std::vector<double>& sparsities,
                                        const SelectionOptions& options,
                                        std::uint64_t event = 0);

// One-shot selection from the unpruned model.
PruneMask ChannelSelection(const ModelSnapshot& snapshot,
                           const std::vector<double>& sparsities,
                           const SelectionOptions& options);

// Euclidean norm of each listed filter restricted to `live_in` channels.
std::vector<double> FilterNorms(const ConvLayer& layer,
                                const std::vector<int>& filters,
                                const std::vector<int>& live_in);

// Stand-in for one training epoch. Must be deterministic in its arguments
// and must not change tensor shapes.
class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual void Step(ModelSnapshot& model, int epoch, std::uint64_t seed) = 0;
};

// Adds a fixed per-epoch drift (plus optional bounded noise) to BN gammas,
// clamped at zero, and optional bounded noise to weights.
class DriftTrainer : public Trainer {
 public:
  struct Options {
    double gamma_drift = 0.0;
    // Per-layer drift replacing gamma_drift for the named layers.
    std::map<std::string, double> layer_gamma_drift;
    // Drift applies from this epoch on.
    int drift_start = 1;
    double gamma_noise = 0.0;
    double weight_noise = 0.0;
  };

  DriftTrainer() = default;
  explicit DriftTrainer(Options options) : options_(std::move(options)) {}

  void Step(ModelSnapshot& model, int epoch, std::uint64_t seed) override;

 private:
  Options options_;
};

struct PipelineConfig {
  Schedule schedule;
  int epochs = 0;
  SelectionOptions selection;
  // Seeds the trainer. Kept apart from selection.seed so that changing the
  // selection seed only changes tie-breaks.
  std::uint64_t trainer_seed = 0;
  std::string regrow = "min-one";
  PoolMode pool = PoolMode::kMaskedAsZero;
};

struct RegrowthRecord {
  std::string layer;
  std::vector<int> channels;
};

struct PruningEvent {
  int epoch = 0;
  std::optional<double> threshold;
  std::vector<std::string> skipped;
  std::vector<RegrowthRecord> regrowth;
};

struct LayerRecord {
  int epoch = 0;
  LayerSelection selection;
  int kept_after = 0;
};

struct LayerSummary {
  std::string layer;
  int kept = 0;
  int total = 0;
};

struct RunReport {
  PipelineConfig config;
  std::string model;
  std::vector<PruningEvent> events;
  std::vector<LayerRecord> records;
  std::uint64_t flops_before = 0;
  std::uint64_t flops_after = 0;
  double flops_reduction = 0.0;
  std::vector<LayerSummary> final_layers;
};

struct PipelineResult {
  ModelSnapshot pruned;
  PruneMask mask;
  RunReport report;
};

// Called after each pruning event (regrowth included) with the working
// dense model and the state.
using EventObserver =
    std::function<void(int epoch, const ModelSnapshot&, const PruneState&)>;

// Epoch loop: train a step, and on scheduled epochs derive the threshold
// and layer sparsities, select channels, regrow, and check mask alignment.
// The returned snapshot has the final masks applied.
PipelineResult RunPipeline(const ModelSnapshot& snapshot, Trainer& trainer,
                           const PipelineConfig& config,
                           const EventObserver& observer = nullptr);

}  // namespace reprune

#endif  // REPRUNE_PIPELINE_H_
