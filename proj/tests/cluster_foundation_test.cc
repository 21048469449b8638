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

#include <set>

#include <gtest/gtest.h>

#include "oracles.h"
#include "reprune/cluster_foundation.h"
#include "reprune/error.h"

namespace reprune {
namespace {

// 4 filters, 2 in-channels, 1x1 kernels. Channel 0 pairs {0,1} and {2,3};
// channel 1 pairs {0,2} and {1,3}.
ConvLayer ToyLayer() {
  ConvLayer layer{.name = "toy", .out_channels = 4, .in_channels = 2, .kernel_h = 1,
                  .kernel_w = 1, .out_hw = 2,
                  .weights = {0.0f, 0.0f, 0.1f, 5.0f, 5.0f, 0.2f, 5.2f, 5.1f}};
  layer.prunable = true;
  return layer;
}

TEST(MergeBudgetTest, Ceiling) {
  EXPECT_EQ(MergeBudget(0.5, 10), 5);
  EXPECT_EQ(MergeBudget(0.33, 7), 3);
  EXPECT_EQ(MergeBudget(0.0, 9), 0);
  EXPECT_EQ(MergeBudget(0.7, 10), 7);
  EXPECT_THROW(MergeBudget(1.5, 3), Error);
  EXPECT_EQ(KeepCount(0.5, 10), 5);
  EXPECT_EQ(KeepCount(0.3, 8), 6);
}

TEST(LayerCutoffTest, Maximum) {
  EXPECT_EQ(LayerCutoff(std::vector<double>{0.5, 2.0, 1.2}), 2.0);
  EXPECT_EQ(LayerCutoff(std::vector<double>{0.7}), 0.7);
  EXPECT_EQ(LayerCutoff(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_THROW(LayerCutoff(std::vector<double>{}), Error);
}

TEST(ClustersPerChannelTest, BothBranches) {
  // Scalars 0, 0.5, 3: d(2) = 2/3 * 2.75^2 = 5.041...
  const std::vector<oracle::Point> pts{{0.0}, {0.5}, {3.0}};
  const MergeSequence seq = Agglomerate(oracle::ToKernelSet(pts), LinkageMethod::kWard, 2);
  const double d2 = oracle::NaiveAgglomerate(pts, LinkageMethod::kWard, 2)[1].distance;
  EXPECT_LT(oracle::RelativeError(seq.Objective(2), d2), 1e-12);
  EXPECT_EQ(ClustersPerChannel(seq, 2, seq.Objective(2)).size(), 1u);
  EXPECT_EQ(ClustersPerChannel(seq, 2, 2.0).size(), 2u);  // d(2) > 2.0
  EXPECT_EQ(ClustersPerChannel(seq, 0, 0.0).size(), 3u);
}

TEST(BuildUniverseTest, ToyLayerHalfSparsity) {
  const LayerClusterUniverse u = BuildUniverse(ToyLayer(), 0.5);
  EXPECT_EQ(u.n_merges, 2);
  ASSERT_EQ(u.channels.size(), 2u);
  EXPECT_EQ(u.universe_size, 4);
  EXPECT_EQ(u.channels[0].labels, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(u.channels[1].labels, (std::vector<int>{0, 1, 0, 1}));
  // Cut-off is the larger of the per-channel second merge distances.
  auto f = [](float v) { return oracle::Point{static_cast<double>(v)}; };
  const auto d0 = oracle::NaiveAgglomerate({f(0.0f), f(0.1f), f(5.0f), f(5.2f)},
                                           LinkageMethod::kWard, 2)[1].distance;
  const auto d1 = oracle::NaiveAgglomerate({f(0.0f), f(5.0f), f(0.2f), f(5.1f)},
                                           LinkageMethod::kWard, 2)[1].distance;
  EXPECT_LT(oracle::RelativeError(u.cutoff, std::max(d0, d1)), 1e-9);
  for (const ChannelClusters& c : u.channels) {
    EXPECT_EQ(c.num_clusters, 4 - u.n_merges);
    EXPECT_EQ(c.cut_step, u.n_merges);
  }
}

TEST(BuildUniverseTest, ZeroSparsityKeepsSingletons) {
  const LayerClusterUniverse u = BuildUniverse(ToyLayer(), 0.0);
  EXPECT_EQ(u.n_merges, 0);
  EXPECT_EQ(u.cutoff, 0.0);
  EXPECT_EQ(u.universe_size, 8);
}

TEST(BuildUniverseTest, SingleFilterClampsBudget) {
  ConvLayer layer{.name = "one", .out_channels = 1, .in_channels = 3, .kernel_h = 1,
                  .kernel_w = 1, .out_hw = 1, .weights = {1.0f, 2.0f, 3.0f}};
  layer.prunable = true;
  const LayerClusterUniverse u = BuildUniverse(layer, 0.4);
  EXPECT_EQ(u.n_merges, 0);
  EXPECT_EQ(u.universe_size, 3);
}

TEST(BuildUniverseTest, ExternalCutoffTakesEarlierPartition) {
  const LayerClusterUniverse u =
      BuildUniverse(ToyLayer(), 0.5, {.method = LinkageMethod::kWard, .external_cutoff = 0.01});
  EXPECT_EQ(u.cutoff, 0.01);
  for (const ChannelClusters& c : u.channels) {
    EXPECT_EQ(c.cut_step, 1);
    EXPECT_EQ(c.num_clusters, 3);
  }
  EXPECT_EQ(u.universe_size, 6);
}

TEST(BuildUniverseTest, RestrictsToLiveRowsAndChannels) {
  const std::vector<int> rows{0, 2, 3};
  const std::vector<int> chans{1};
  const LayerClusterUniverse u = BuildUniverse(ToyLayer(), 0.34, {}, rows, chans);
  EXPECT_EQ(u.filters, rows);
  ASSERT_EQ(u.channels.size(), 1u);
  EXPECT_EQ(u.channels[0].channel, 1);
  EXPECT_EQ(u.n_merges, 2);
  EXPECT_EQ(u.universe_size, 1);
}

TEST(BuildUniverseTest, Preconditions) {
  ConvLayer fixed = ToyLayer();
  fixed.prunable = false;
  try {
    BuildUniverse(fixed, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstraintViolation);
  }
  EXPECT_THROW(BuildUniverse(ToyLayer(), 1.0), Error);
}

TEST(BuildUniverseTest, UniverseInvariantsOnMaterializedNet) {
  const ModelSnapshot net = oracle::Materialized("toy-residual", 17);
  for (int l : net.PrunableLayers()) {
    for (double s : {0.0, 0.25, 0.5, 0.9}) {
      const LayerClusterUniverse u = BuildUniverse(net.layers[l], s);
      int total = 0;
      for (const ChannelClusters& c : u.channels) {
        total += c.num_clusters;
        EXPECT_EQ(c.num_clusters, net.layers[l].out_channels - u.n_merges);
        std::set<int> seen(c.labels.begin(), c.labels.end());
        EXPECT_EQ(static_cast<int>(seen.size()), c.num_clusters);
        EXPECT_EQ(*seen.rbegin(), c.num_clusters - 1);
      }
      EXPECT_EQ(total, u.universe_size);
      EXPECT_GE(u.universe_size, net.layers[l].in_channels);
    }
  }
}

}  // namespace
}  // namespace reprune
