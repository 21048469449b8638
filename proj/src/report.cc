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

#include "reprune/report.h"

#include <fstream>
#include <iterator>
#include <sstream>

#include "reprune/coverage.h"
#include "reprune/error.h"

namespace reprune {
namespace {

using nlohmann::json;

json RecordToJson(const LayerRecord& record) {
  const LayerSelection& s = record.selection;
  return {{"epoch", record.epoch},
          {"layer", s.name},
          {"layer_index", s.layer},
          {"s_l", s.sparsity},
          {"live_before", s.live_before},
          {"n_merges", s.n_merges},
          {"h_l", s.cutoff},
          {"universe_size", s.universe_size},
          {"k", s.k},
          {"kept", record.kept_after},
          {"rate", s.rate},
          {"selected_indices", s.selected},
          {"gains_per_step", s.gains},
          {"rates_per_step", s.rates}};
}

template <typename T>
T Get(const json& object, const char* key) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedManifest,
                std::string("report field \"") + key + "\": " + e.what());
  }
}

}  // namespace

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown report format '" + std::string(name) + "'");
}

json ReportToJson(const RunReport& report) {
  const PipelineConfig& c = report.config;
  json doc;
  doc["schema"] = kReportSchema;
  doc["model"] = report.model;
  doc["seed"] = c.selection.seed;
  doc["config"] = {{"sparsity", c.schedule.sparsity},
                   {"t_prune", c.schedule.t_prune},
                   {"delta_t", c.schedule.delta_t},
                   {"epochs", c.epochs},
                   {"linkage", LinkageMethodName(c.selection.method)},
                   {"tie", TieBreakName(c.selection.tie)},
                   {"seed", c.selection.seed},
                   {"trainer_seed", c.trainer_seed},
                   {"regrow", c.regrow},
                   {"gamma_pool", PoolModeName(c.pool)}};
  json events = json::array();
  for (const PruningEvent& e : report.events) {
    json regrowth = json::array();
    for (const RegrowthRecord& r : e.regrowth) {
      regrowth.push_back({{"layer", r.layer}, {"channels", r.channels}});
    }
    events.push_back({{"epoch", e.epoch},
                      {"threshold", e.threshold ? json(*e.threshold) : json(nullptr)},
                      {"skipped", e.skipped},
                      {"regrowth", std::move(regrowth)}});
  }
  doc["events"] = std::move(events);
  json records = json::array();
  for (const LayerRecord& r : report.records) records.push_back(RecordToJson(r));
  doc["records"] = std::move(records);
  doc["flops"] = {{"baseline", report.flops_before},
                  {"pruned", report.flops_after},
                  {"reduction", report.flops_reduction}};
  json final_layers = json::array();
  for (const LayerSummary& s : report.final_layers) {
    final_layers.push_back({{"layer", s.layer}, {"kept", s.kept}, {"total", s.total}});
  }
  doc["final"] = std::move(final_layers);
  return doc;
}

RunReport ReportFromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema") ||
      doc.at("schema") != json(kReportSchema)) {
    throw Error(ErrorCode::kMalformedManifest, "not a schema-1 run report");
  }
  RunReport report;
  report.model = Get<std::string>(doc, "model");
  const json& c = doc.at("config");
  report.config.schedule.sparsity = Get<double>(c, "sparsity");
  report.config.schedule.t_prune = Get<int>(c, "t_prune");
  report.config.schedule.delta_t = Get<int>(c, "delta_t");
  report.config.epochs = Get<int>(c, "epochs");
  report.config.regrow = Get<std::string>(c, "regrow");
  report.config.selection.seed = Get<std::uint64_t>(c, "seed");
  report.config.trainer_seed = Get<std::uint64_t>(c, "trainer_seed");
  try {
    report.config.selection.method = ParseLinkageMethod(Get<std::string>(c, "linkage"));
    report.config.selection.tie = ParseTieBreak(Get<std::string>(c, "tie"), 0).kind;
    report.config.pool = ParsePoolMode(Get<std::string>(c, "gamma_pool"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedManifest, e.what());
  }
  for (const json& e : doc.at("events")) {
    PruningEvent event;
    event.epoch = Get<int>(e, "epoch");
    if (!e.at("threshold").is_null()) event.threshold = Get<double>(e, "threshold");
    event.skipped = Get<std::vector<std::string>>(e, "skipped");
    for (const json& r : e.at("regrowth")) {
      event.regrowth.push_back(
          {Get<std::string>(r, "layer"), Get<std::vector<int>>(r, "channels")});
    }
    report.events.push_back(std::move(event));
  }
  for (const json& r : doc.at("records")) {
    LayerRecord record;
    record.epoch = Get<int>(r, "epoch");
    record.kept_after = Get<int>(r, "kept");
    LayerSelection& s = record.selection;
    s.name = Get<std::string>(r, "layer");
    s.layer = Get<int>(r, "layer_index");
    s.sparsity = Get<double>(r, "s_l");
    s.live_before = Get<int>(r, "live_before");
    s.n_merges = Get<int>(r, "n_merges");
    s.cutoff = Get<double>(r, "h_l");
    s.universe_size = Get<int>(r, "universe_size");
    s.k = Get<int>(r, "k");
    s.rate = Get<double>(r, "rate");
    s.selected = Get<std::vector<int>>(r, "selected_indices");
    s.gains = Get<std::vector<int>>(r, "gains_per_step");
    s.rates = Get<std::vector<double>>(r, "rates_per_step");
    report.records.push_back(std::move(record));
  }
  const json& flops = doc.at("flops");
  report.flops_before = Get<std::uint64_t>(flops, "baseline");
  report.flops_after = Get<std::uint64_t>(flops, "pruned");
  report.flops_reduction = Get<double>(flops, "reduction");
  for (const json& f : doc.at("final")) {
    report.final_layers.push_back(
        {Get<std::string>(f, "layer"), Get<int>(f, "kept"), Get<int>(f, "total")});
  }
  return report;
}

std::string ReportToCsv(const RunReport& report) {
  std::ostringstream out;
  out << "epoch,layer,s_l,n_merges,h_l,universe_size,k,kept,rate\n";
  for (const LayerRecord& r : report.records) {
    const LayerSelection& s = r.selection;
    // json::dump gives the shortest round-trip form of a double.
    out << r.epoch << ',' << s.name << ',' << json(s.sparsity).dump() << ','
        << s.n_merges << ',' << json(s.cutoff).dump() << ',' << s.universe_size
        << ',' << s.k << ',' << r.kept_after << ',' << json(s.rate).dump()
        << '\n';
  }
  return out.str();
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "short write to '" + path.string() + "'");
}

json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  const std::string text(std::istreambuf_iterator<char>(in), {});
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedManifest,
                "'" + path.string() + "': " + e.what());
  }
}

void EmitReport(const RunReport& report, const std::filesystem::path& path,
                ReportFormat format) {
  WriteText(path, format == ReportFormat::kJson ? ReportToJson(report).dump(2) + "\n"
                                                : ReportToCsv(report));
}

json UniverseRecordJson(const LayerClusterUniverse& universe) {
  return {{"layer", universe.layer},
          {"s_l", universe.sparsity},
          {"n_merges", universe.n_merges},
          {"h_l", universe.cutoff},
          {"universe_size", universe.universe_size}};
}

json SelectionRecordJson(const LayerSelection& selection) {
  return {{"layer", selection.name},
          {"k", selection.k},
          {"selected_indices", selection.selected},
          {"rate", selection.rate},
          {"gains_per_step", selection.gains}};
}

json FlopsToJson(const FlopsReport& flops) {
  json per_layer = json::array();
  for (const LayerFlops& f : flops.per_layer) {
    per_layer.push_back({{"layer", f.name}, {"flops", f.flops}});
  }
  json doc = {{"total", flops.total},
              {"classifier", flops.classifier},
              {"per_layer", std::move(per_layer)}};
  if (flops.reduction) doc["reduction"] = *flops.reduction;
  return doc;
}

json MaskToJson(const ModelSnapshot& snapshot, const PruneMask& mask) {
  json layers = json::array();
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    layers.push_back({{"name", snapshot.layers[l].name},
                      {"kept", mask.live_out(static_cast<int>(l))}});
  }
  return {{"schema", kReportSchema}, {"model", snapshot.model}, {"layers", layers}};
}

PruneMask MaskFromJson(const ModelSnapshot& snapshot, const json& doc) {
  PruneMask mask = PruneMask::AllTrue(snapshot);
  if (!doc.is_object() || !doc.contains("layers") || !doc.at("layers").is_array()) {
    throw Error(ErrorCode::kMalformedManifest, "mask document lacks \"layers\"");
  }
  for (const json& entry : doc.at("layers")) {
    const std::string name = Get<std::string>(entry, "name");
    const int l = snapshot.FindLayer(name);
    if (l < 0) {
      throw Error(ErrorCode::kMalformedManifest, "mask names unknown layer '" + name + "'");
    }
    auto& keep = mask.keep_out[l];
    std::fill(keep.begin(), keep.end(), false);
    for (int c : Get<std::vector<int>>(entry, "kept")) {
      if (c < 0 || c >= static_cast<int>(keep.size())) {
        throw Error(ErrorCode::kMalformedManifest,
                    "channel index out of range in mask for '" + name + "'");
      }
      keep[c] = true;
    }
  }
  mask.Align(snapshot);
  return mask;
}

}  // namespace reprune
