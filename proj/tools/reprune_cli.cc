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

// reprune: structured channel pruning from the command line.
//
//   reprune flops    --arch resnet50
//   reprune cluster  --arch net.json --layer layer1.0.conv1 --sparsity 0.5
//   reprune select   --arch net.json --sparsity 0.4 --out masks.json
//   reprune pipeline --arch toy-residual --sparsity 0.5 --t-prune 4 --out run/
//   reprune report   --in run/report.json --format csv
//   reprune init     --arch resnet18 --seed 1 --out r18.json
//
// Global flags may come before or after the subcommand and may be read from
// --config (TOML or INI, keys named like the flags). Exit status: 0 on
// success, 2 on invalid input, 3 on I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reprune/cluster_foundation.h"
#include "reprune/coverage.h"
#include "reprune/descriptors.h"
#include "reprune/error.h"
#include "reprune/flops.h"
#include "reprune/linkage.h"
#include "reprune/masks.h"
#include "reprune/pipeline.h"
#include "reprune/report.h"
#include "reprune/scheduler.h"
#include "reprune/snapshot_io.h"

namespace reprune {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct GlobalFlags {
  std::string arch;
  std::string linkage = "ward";
  std::string tie = "random";
  double sparsity = 0.5;
  std::uint64_t seed = 0;
  int t_prune = 180;
  int delta_t = 2;
  std::string out;
};

SelectionOptions Selection(const GlobalFlags& g) {
  return {ParseLinkageMethod(g.linkage), ParseTieBreak(g.tie, g.seed).kind, g.seed};
}

int LayerOrThrow(const ModelSnapshot& snapshot, const std::string& name) {
  const int l = snapshot.FindLayer(name);
  if (l < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "no layer '" + name + "' in " + snapshot.model);
  }
  return l;
}

void Print(const json& doc) { std::cout << doc.dump(2) << '\n'; }

int RunFlops(const GlobalFlags& g, bool as_json) {
  const ModelSnapshot snapshot = ResolveArch(g.arch, g.seed, false);
  const FlopsReport report = ModelFlops(snapshot);
  if (as_json) {
    json doc = FlopsToJson(report);
    doc["model"] = snapshot.model;
    Print(doc);
    return 0;
  }
  for (const LayerFlops& f : report.per_layer) {
    std::cout << f.name << '\t' << f.flops << '\n';
  }
  if (snapshot.classifier) std::cout << "classifier\t" << report.classifier << '\n';
  std::cout << snapshot.model << " total\t" << report.total << '\n';
  return 0;
}

struct ClusterFlags {
  std::string layer;
  std::optional<double> cutoff;
  std::string dendrogram;
};

int RunCluster(const GlobalFlags& g, const ClusterFlags& f) {
  const ModelSnapshot snapshot = ResolveArch(g.arch, g.seed, true);
  const ConvLayer& layer = snapshot.layers[LayerOrThrow(snapshot, f.layer)];
  const LinkageMethod method = ParseLinkageMethod(g.linkage);
  const LayerClusterUniverse universe =
      BuildUniverse(layer, g.sparsity, {.method = method, .external_cutoff = f.cutoff});
  json doc = UniverseRecordJson(universe);
  json channels = json::array();
  for (const ChannelClusters& c : universe.channels) {
    channels.push_back({{"channel", c.channel},
                        {"distance", c.distance},
                        {"cut_step", c.cut_step},
                        {"clusters", c.num_clusters}});
  }
  doc["channels"] = std::move(channels);
  Print(doc);
  if (!f.dendrogram.empty()) {
    std::ofstream out(f.dendrogram, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write '" + f.dendrogram + "'");
    for (int j = 0; j < layer.in_channels; ++j) {
      const MergeSequence seq =
          Agglomerate(KernelSet::FromLayer(layer, j), method, universe.n_merges);
      WriteDendrogramJsonl(out, seq, j);
    }
    if (!out.flush()) throw Error(ErrorCode::kIo, "short write to '" + f.dendrogram + "'");
  }
  return 0;
}

int RunSelect(const GlobalFlags& g, const std::string& only_layer) {
  const ModelSnapshot snapshot = ResolveArch(g.arch, g.seed, true);
  std::vector<double> sparsities(snapshot.layers.size(), 0.0);
  if (only_layer.empty()) {
    for (int l : snapshot.PrunableLayers()) sparsities[l] = g.sparsity;
  } else {
    sparsities[LayerOrThrow(snapshot, only_layer)] = g.sparsity;
  }
  const ChannelSelectionResult result = ChannelSelection(
      snapshot, PruneMask::AllTrue(snapshot), sparsities, Selection(g));
  for (const LayerSelection& s : result.layers) {
    std::cout << SelectionRecordJson(s).dump() << '\n';
  }
  if (!g.out.empty()) WriteText(g.out, MaskToJson(snapshot, result.mask).dump(2) + "\n");
  return 0;
}

struct PipelineFlags {
  int epochs = -1;
  std::string regrow = "min-one";
  std::string pool = "zeros";
  std::uint64_t trainer_seed = 0;
  double gamma_drift = 0.0;
  double gamma_noise = 0.0;
  double weight_noise = 0.0;
};

int RunPipelineCommand(const GlobalFlags& g, const PipelineFlags& f) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "pipeline needs --out");
  const ModelSnapshot snapshot = ResolveArch(g.arch, g.seed, true);
  PipelineConfig config;
  config.schedule = {.t_prune = g.t_prune, .delta_t = g.delta_t, .sparsity = g.sparsity};
  config.epochs = f.epochs < 0 ? g.t_prune : f.epochs;
  config.selection = Selection(g);
  config.trainer_seed = f.trainer_seed;
  config.regrow = f.regrow;
  config.pool = ParsePoolMode(f.pool);
  DriftTrainer trainer({.gamma_drift = f.gamma_drift,
                        .gamma_noise = f.gamma_noise,
                        .weight_noise = f.weight_noise});
  const PipelineResult result = RunPipeline(snapshot, trainer, config);

  const fs::path dir = g.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "'");
  SaveSnapshot(result.pruned, dir / "pruned.json");
  EmitReport(result.report, dir / "report.json", ReportFormat::kJson);
  EmitReport(result.report, dir / "report.csv", ReportFormat::kCsv);
  WriteText(dir / "masks.json", MaskToJson(snapshot, result.mask).dump(2) + "\n");

  std::cout << result.report.events.size() << " pruning events, FLOPs "
            << result.report.flops_before << " -> " << result.report.flops_after << " ("
            << json(result.report.flops_reduction).dump() << " reduction)\n";
  for (const LayerSummary& s : result.report.final_layers) {
    if (s.kept != s.total) std::cout << "  " << s.layer << ' ' << s.kept << '/' << s.total << '\n';
  }
  return 0;
}

int ConvertReport(const std::string& in, const std::string& format, const std::string& out) {
  const RunReport report = ReportFromJson(ReadJson(in));
  const ReportFormat f = ParseReportFormat(format);
  if (out.empty()) {
    std::cout << (f == ReportFormat::kJson ? ReportToJson(report).dump(2) + "\n"
                                           : ReportToCsv(report));
  } else {
    EmitReport(report, out, f);
  }
  return 0;
}

int RunInit(const GlobalFlags& g, bool shape_only) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "init needs --out");
  ModelSnapshot snapshot = BuiltinDescriptor(g.arch);
  if (shape_only) {
    SaveDescriptor(snapshot, g.out);
  } else {
    MaterializeWeights(snapshot, g.seed);
    SaveSnapshot(snapshot, g.out);
  }
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Structured channel pruning by cluster coverage"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flags from a TOML/INI file");
  app.option_defaults()->always_capture_default();

  GlobalFlags g;
  app.add_option("--arch", g.arch, "Built-in descriptor name or snapshot manifest path");
  app.add_option("--linkage", g.linkage, "ward|single|complete|average")
      ->check(CLI::IsMember({"ward", "single", "complete", "average"}));
  app.add_option("--tie", g.tie, "random|max-l2|min-l2")
      ->check(CLI::IsMember({"random", "max-l2", "min-l2"}));
  app.add_option("--sparsity", g.sparsity, "Target sparsity in [0, 1)");
  app.add_option("--seed", g.seed, "Seed for tie-breaks and generated weights");
  app.add_option("--t-prune", g.t_prune, "Last epoch that may prune");
  app.add_option("--delta-t", g.delta_t, "Epochs between pruning events");
  app.add_option("--out", g.out, "Output file or directory");

  CLI::App* flops = app.add_subcommand("flops", "Count FLOPs of a model");
  bool as_json = false;
  flops->add_flag("--json", as_json, "Print JSON");

  CLI::App* cluster = app.add_subcommand("cluster", "Build the cluster universe of one layer");
  ClusterFlags cf;
  cluster->add_option("--layer", cf.layer, "Layer name")->required();
  cluster->add_option("--cutoff", cf.cutoff, "Use this cut-off height instead of the layer maximum");
  cluster->add_option("--dendrogram", cf.dendrogram, "Write merges as JSON lines");

  CLI::App* select = app.add_subcommand("select", "Select channels at a uniform sparsity");
  std::string only_layer;
  select->add_option("--layer", only_layer, "Restrict selection to one layer");

  CLI::App* pipeline = app.add_subcommand("pipeline", "Run the progressive pruning loop");
  PipelineFlags pf;
  pipeline->add_option("--epochs", pf.epochs, "Trainer steps (default: t-prune)");
  pipeline->add_option("--regrow", pf.regrow, "min-one|none")
      ->check(CLI::IsMember({"min-one", "none"}));
  pipeline->add_option("--gamma-pool", pf.pool, "zeros|live")
      ->check(CLI::IsMember({"zeros", "live"}));
  pipeline->add_option("--trainer-seed", pf.trainer_seed, "Seed of the mock trainer");
  pipeline->add_option("--gamma-drift", pf.gamma_drift, "Per-step gamma drift");
  pipeline->add_option("--gamma-noise", pf.gamma_noise, "Per-step gamma noise amplitude");
  pipeline->add_option("--weight-noise", pf.weight_noise, "Per-step weight noise amplitude");

  CLI::App* report = app.add_subcommand("report", "Convert a run report");
  std::string report_in;
  std::string report_format = "csv";
  report->add_option("--in", report_in, "report.json")->required();
  report->add_option("--format", report_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* init = app.add_subcommand("init", "Write a built-in model as a snapshot");
  bool shape_only = false;
  init->add_flag("--shape-only", shape_only, "Write the manifest without weights");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    const bool needs_arch = !report->parsed();
    if (needs_arch && g.arch.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--arch is required");
    }
    if (flops->parsed()) return RunFlops(g, as_json);
    if (cluster->parsed()) return RunCluster(g, cf);
    if (select->parsed()) return RunSelect(g, only_layer);
    if (pipeline->parsed()) return RunPipelineCommand(g, pf);
    if (report->parsed()) return ConvertReport(report_in, report_format, g.out);
    if (init->parsed()) return RunInit(g, shape_only);
  } catch (const Error& e) {
    std::cerr << "reprune: " << e.what() << '\n';
    return e.code() == ErrorCode::kIo ? kExitIo : kExitValidation;
  }
  return kExitValidation;
}

}  // namespace
}  // namespace reprune

int main(int argc, char** argv) { return reprune::Main(argc, argv); }
