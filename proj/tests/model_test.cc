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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include <gtest/gtest.h>

#include "oracles.h"
#include "reprune/error.h"
#include "reprune/flops.h"
#include "reprune/masks.h"
#include "reprune/model.h"
#include "reprune/snapshot_io.h"

namespace reprune {
namespace {

namespace fs = std::filesystem;

class SnapshotIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("reprune_model_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

bool BitIdentical(const ModelSnapshot& a, const ModelSnapshot& b) {
  if (a.model != b.model || a.input_hw != b.input_hw ||
      a.layers.size() != b.layers.size()) {
    return false;
  }
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const ConvLayer& x = a.layers[l];
    const ConvLayer& y = b.layers[l];
    if (x.name != y.name || x.out_channels != y.out_channels ||
        x.in_channels != y.in_channels || x.kernel_h != y.kernel_h ||
        x.kernel_w != y.kernel_w || x.out_hw != y.out_hw ||
        x.block.kind != y.block.kind || x.block.pos != y.block.pos ||
        x.prunable != y.prunable || x.weights.size() != y.weights.size() ||
        x.gammas.size() != y.gammas.size()) {
      return false;
    }
    if (std::memcmp(x.weights.data(), y.weights.data(), x.weights.size() * 4) != 0 ||
        std::memcmp(x.gammas.data(), y.gammas.data(), x.gammas.size() * 4) != 0) {
      return false;
    }
  }
  const bool ca = a.classifier.has_value();
  if (ca != b.classifier.has_value()) return false;
  return !ca || (a.classifier->in_features == b.classifier->in_features &&
                 a.classifier->out_features == b.classifier->out_features);
}

TEST(ArchGraphTest, PrunabilityFollowsBlockRoles) {
  const ModelSnapshot net = BuiltinDescriptor("toy-residual");
  auto prunable = [&](const char* name) { return net.layers[net.FindLayer(name)].prunable; };
  EXPECT_FALSE(prunable("conv1"));  // feeds a residual block
  EXPECT_TRUE(prunable("basic.conv1"));
  EXPECT_FALSE(prunable("basic.conv2"));
  EXPECT_TRUE(prunable("bottle.conv1"));
  EXPECT_TRUE(prunable("bottle.conv2"));
  EXPECT_FALSE(prunable("bottle.conv3"));
  EXPECT_FALSE(prunable("bottle.downsample.0"));
  EXPECT_EQ(net.arch.producer(net.FindLayer("bottle.downsample.0")),
            net.FindLayer("basic.conv2"));
  EXPECT_EQ(net.arch.producer(net.FindLayer("bottle.conv2")), net.FindLayer("bottle.conv1"));
  EXPECT_EQ(net.arch.final_producer(), net.FindLayer("bottle.conv3"));
}

TEST(ArchGraphTest, PlainNetIsFullyPrunable) {
  const ModelSnapshot net = BuiltinDescriptor("toy-plain");
  EXPECT_EQ(net.PrunableLayers(), (std::vector<int>{0, 1, 2}));
}

TEST(ArchGraphTest, RejectsChannelMismatch) {
  ModelSnapshot net = BuiltinDescriptor("toy-plain");
  net.layers[1].in_channels = 7;
  EXPECT_THROW(MakeSnapshot(net.model, net.input_hw, net.layers, net.classifier), Error);
}

TEST(ArchGraphTest, ZeroSpatialSizeIsMissingMetadata) {
  ModelSnapshot net = BuiltinDescriptor("toy-plain");
  net.layers[0].out_hw = 0;
  EXPECT_EQ(CodeOf([&] { MakeSnapshot(net.model, net.input_hw, net.layers, net.classifier); }),
            ErrorCode::kMissingMetadata);
}

TEST_F(SnapshotIoTest, RoundTripIsBitIdentical) {
  for (const char* name : {"toy-plain", "toy-residual"}) {
    const ModelSnapshot original = oracle::Materialized(name, 11);
    SaveSnapshot(original, dir_ / "m.json");
    const ModelSnapshot loaded = LoadSnapshot(dir_ / "m.json");
    EXPECT_TRUE(BitIdentical(original, loaded)) << name;
    EXPECT_EQ(loaded.layers.size(), original.layers.size());
  }
}

TEST_F(SnapshotIoTest, ShortBlobIsSizeMismatch) {
  SaveSnapshot(oracle::Materialized("toy-plain", 1), dir_ / "m.json");
  fs::resize_file(dir_ / "m.bin", fs::file_size(dir_ / "m.bin") - 4);
  EXPECT_EQ(CodeOf([&] { LoadSnapshot(dir_ / "m.json"); }), ErrorCode::kSizeMismatch);
}

TEST_F(SnapshotIoTest, NanWeightIsNonFinite) {
  ModelSnapshot net = oracle::Materialized("toy-plain", 1);
  SaveSnapshot(net, dir_ / "m.json");
  // Overwrite the first float of the blob with a NaN.
  std::fstream blob(dir_ / "m.bin", std::ios::in | std::ios::out | std::ios::binary);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  blob.write(reinterpret_cast<const char*>(&nan), sizeof nan);
  blob.close();
  EXPECT_EQ(CodeOf([&] { LoadSnapshot(dir_ / "m.json"); }), ErrorCode::kNonFinite);
}

TEST_F(SnapshotIoTest, MalformedManifest) {
  std::ofstream(dir_ / "bad.json") << "{\"schema\": 1, \"layers\": [";
  EXPECT_EQ(CodeOf([&] { LoadSnapshot(dir_ / "bad.json"); }), ErrorCode::kMalformedManifest);
  std::ofstream(dir_ / "wrong.json") << "{\"schema\": 7}";
  EXPECT_EQ(CodeOf([&] { LoadSnapshot(dir_ / "wrong.json"); }), ErrorCode::kMalformedManifest);
}

TEST_F(SnapshotIoTest, UnwritablePathIsIo) {
  const ModelSnapshot net = oracle::Materialized("toy-plain", 1);
  EXPECT_EQ(CodeOf([&] { SaveSnapshot(net, dir_ / "missing" / "m.json"); }), ErrorCode::kIo);
  EXPECT_EQ(CodeOf([&] { LoadSnapshot(dir_ / "absent.json"); }), ErrorCode::kIo);
}

TEST_F(SnapshotIoTest, DescriptorWithoutBlobLoadsShapeOnly) {
  SaveDescriptor(BuiltinDescriptor("resnet18"), dir_ / "r18.json");
  const ModelSnapshot shape = LoadDescriptor(dir_ / "r18.json");
  EXPECT_FALSE(shape.layers.front().has_weights());
  EXPECT_EQ(ModelFlops(shape).total, ModelFlops(BuiltinDescriptor("resnet18")).total);
  EXPECT_THROW(LoadSnapshot(dir_ / "r18.json"), Error);
}

TEST_F(SnapshotIoTest, MaskedSnapshotReloadsWithKeptShapes) {
  const ModelSnapshot net = oracle::Materialized("toy-plain", 5);
  PruneMask mask = PruneMask::AllTrue(net);
  // s = 0.5 on 8 channels keeps 4; s = 0.3 keeps ceil(5.6) = 6.
  for (int c = 4; c < 8; ++c) mask.keep_out[0][c] = false;
  mask.keep_out[1][0] = mask.keep_out[1][3] = false;
  mask.Align(net);
  SaveSnapshot(ApplyMasks(net, mask), dir_ / "p.json");
  const ModelSnapshot loaded = LoadSnapshot(dir_ / "p.json");
  EXPECT_EQ(loaded.layers[0].out_channels, 4);
  EXPECT_EQ(loaded.layers[1].in_channels, 4);
  EXPECT_EQ(loaded.layers[1].out_channels, 6);
  EXPECT_EQ(loaded.layers[2].in_channels, 6);
  EXPECT_EQ(loaded.layers[2].out_channels, 8);
}

TEST(ApplyMasksTest, AllTrueIsIdentity) {
  const ModelSnapshot net = oracle::Materialized("toy-residual", 3);
  EXPECT_TRUE(BitIdentical(ApplyMasks(net, PruneMask::AllTrue(net)), net));
}

TEST(ApplyMasksTest, BasicBlockKeepsOutputWidth) {
  const ModelSnapshot net = oracle::Materialized("toy-residual", 3);
  const int c1 = net.FindLayer("basic.conv1");
  const int c2 = net.FindLayer("basic.conv2");
  PruneMask mask = PruneMask::AllTrue(net);
  for (int c : {1, 3, 5, 7}) mask.keep_out[c1][c] = false;
  mask.Align(net);
  const ModelSnapshot pruned = ApplyMasks(net, mask);
  EXPECT_EQ(pruned.layers[c1].out_channels, 4);
  EXPECT_EQ(pruned.layers[c2].in_channels, 4);
  EXPECT_EQ(pruned.layers[c2].out_channels, 8);
  // Kept filters and gammas are copied verbatim, dropped in-channels removed.
  const ConvLayer& before = net.layers[c2];
  const ConvLayer& after = pruned.layers[c2];
  for (int o = 0; o < 8; ++o) {
    int r = 0;
    for (int i : {0, 2, 4, 6}) {
      const auto want = before.kernel(o, i);
      const auto got = after.kernel(o, r++);
      EXPECT_TRUE(std::equal(want.begin(), want.end(), got.begin()));
    }
  }
  EXPECT_EQ(pruned.layers[c1].gammas[1], net.layers[c1].gammas[2]);
}

TEST(ApplyMasksTest, BottleneckThirdConvKeepsOutputWidth) {
  const ModelSnapshot net = oracle::Materialized("toy-residual", 3);
  const int b1 = net.FindLayer("bottle.conv1");
  const int b2 = net.FindLayer("bottle.conv2");
  const int b3 = net.FindLayer("bottle.conv3");
  PruneMask mask = PruneMask::AllTrue(net);
  mask.keep_out[b1][0] = mask.keep_out[b1][5] = false;
  mask.keep_out[b2][1] = mask.keep_out[b2][2] = mask.keep_out[b2][4] = false;
  mask.Align(net);
  const ModelSnapshot pruned = ApplyMasks(net, mask);
  EXPECT_EQ(pruned.layers[b2].in_channels, 4);
  EXPECT_EQ(pruned.layers[b2].out_channels, 3);
  EXPECT_EQ(pruned.layers[b3].in_channels, 3);
  EXPECT_EQ(pruned.layers[b3].out_channels, 16);
  EXPECT_EQ(pruned.classifier->in_features, 16);
}

TEST(ApplyMasksTest, NonPrunableLayerMaskIsRejected) {
  const ModelSnapshot net = oracle::Materialized("toy-residual", 3);
  PruneMask mask = PruneMask::AllTrue(net);
  mask.keep_out[net.FindLayer("bottle.conv3")][0] = false;
  mask.Align(net);
  EXPECT_EQ(CodeOf([&] { ApplyMasks(net, mask); }), ErrorCode::kConstraintViolation);
}

TEST(ApplyMasksTest, MisalignedInChannelsAreRejected) {
  const ModelSnapshot net = oracle::Materialized("toy-plain", 3);
  PruneMask mask = PruneMask::AllTrue(net);
  mask.keep_out[0][2] = false;  // no Align()
  EXPECT_EQ(CodeOf([&] { CheckMask(net, mask); }), ErrorCode::kConstraintViolation);
}

TEST(ApplyMasksTest, EveryEdgeKeepsChannelCountsEqual) {
  const ModelSnapshot net = oracle::Materialized("toy-residual", 4);
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    PruneMask mask = PruneMask::AllTrue(net);
    for (int l : net.PrunableLayers()) {
      auto& keep = mask.keep_out[l];
      for (std::size_t c = 1; c < keep.size(); ++c) keep[c] = rng.Below(2) == 0;
    }
    mask.Align(net);
    const ModelSnapshot pruned = ApplyMasks(net, mask);
    for (std::size_t l = 0; l < pruned.layers.size(); ++l) {
      if (const auto p = pruned.arch.producer(static_cast<int>(l))) {
        EXPECT_EQ(pruned.layers[l].in_channels, pruned.layers[*p].out_channels);
      }
    }
  }
}

TEST(FlopsTest, SingleConvArithmetic) {
  ConvLayer stem{.name = "s", .out_channels = 64, .in_channels = 3, .kernel_h = 7, .kernel_w = 7};
  EXPECT_EQ(ConvFlops(stem, 112), 118'013'952u);
  ConvLayer point{.name = "p", .out_channels = 64, .in_channels = 64, .kernel_h = 1, .kernel_w = 1};
  EXPECT_EQ(ConvFlops(point, 56), 12'845'056u);
  EXPECT_EQ(CodeOf([&] { ConvFlops(point, 0); }), ErrorCode::kMissingMetadata);
}

TEST(FlopsTest, BaselineDescriptors) {
  auto total = [](const char* name) {
    return static_cast<double>(ModelFlops(BuiltinDescriptor(name)).total);
  };
  EXPECT_NEAR(total("resnet18"), 1.81e9, 0.01 * 1.81e9);
  EXPECT_NEAR(total("resnet34"), 3.6e9, 0.02 * 3.6e9);
  EXPECT_NEAR(total("resnet50"), 4.1e9, 0.02 * 4.1e9);
  EXPECT_NEAR(total("resnet56"), 1.27e8, 0.02 * 1.27e8);
}

TEST(FlopsTest, TotalIsSumOfParts) {
  const FlopsReport report = ModelFlops(BuiltinDescriptor("resnet50"));
  std::uint64_t sum = report.classifier;
  for (const LayerFlops& f : report.per_layer) sum += f.flops;
  EXPECT_EQ(sum, report.total);
  EXPECT_EQ(report.classifier, 2048u * 1000u);
}

TEST(FlopsTest, PruningNeverAddsFlops) {
  const ModelSnapshot net = oracle::Materialized("toy-residual", 8);
  const std::uint64_t base = ModelFlops(net).total;
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    PruneMask mask = PruneMask::AllTrue(net);
    bool all_true = true;
    for (int l : net.PrunableLayers()) {
      auto& keep = mask.keep_out[l];
      for (std::size_t c = 1; c < keep.size(); ++c) {
        keep[c] = rng.Below(3) != 0;
        all_true = all_true && keep[c];
      }
    }
    mask.Align(net);
    const ModelSnapshot pruned = ApplyMasks(net, mask);
    const FlopsReport report = ModelFlops(pruned, &net);
    EXPECT_EQ(report.total, MaskedFlops(net, mask).total);
    if (all_true) {
      EXPECT_EQ(report.total, base);
    } else {
      EXPECT_LT(report.total, base);
    }
    EXPECT_DOUBLE_EQ(*report.reduction,
                     1.0 - static_cast<double>(report.total) / static_cast<double>(base));
  }
}

}  // namespace
}  // namespace reprune
