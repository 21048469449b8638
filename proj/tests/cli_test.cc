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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("reprune_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI inside the scratch directory; stdout goes to out.txt.
  int Run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" REPRUNE_CLI "' " + args +
                            " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Read(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }

  fs::path dir_;
};

TEST_F(CliTest, FlopsJson) {
  ASSERT_EQ(Run("flops --arch resnet18 --json"), 0);
  const auto doc = nlohmann::json::parse(Read("out.txt"));
  EXPECT_EQ(doc.at("total"), 1814073344u);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Run("flops"), 2);
  EXPECT_EQ(Run("flops --arch no-such-model"), 3);
  EXPECT_EQ(Run("flops --arch resnet18 --linkage median"), 2);
  EXPECT_EQ(Run("pipeline --arch toy-plain --sparsity 1.2 --out run"), 2);
  EXPECT_EQ(Run("--config absent.toml flops --arch resnet18"), 3);
  EXPECT_EQ(Run("report --in absent.json"), 3);
  std::ofstream(dir_ / "junk.json") << "{";
  EXPECT_EQ(Run("report --in junk.json"), 2);
}

TEST_F(CliTest, PipelineWritesArtifactsDeterministically) {
  std::ofstream(dir_ / "run.toml") << "arch = \"toy-residual\"\nsparsity = 0.5\n"
                                      "t-prune = 4\ndelta-t = 2\nseed = 3\n"
                                      "[pipeline]\nepochs = 6\ngamma-noise = 0.02\n";
  ASSERT_EQ(Run("pipeline --config run.toml --out a"), 0) << Read("err.txt");
  ASSERT_EQ(Run("pipeline --config run.toml --out b"), 0);
  for (const char* name : {"report.json", "report.csv", "masks.json", "pruned.json", "pruned.bin"}) {
    EXPECT_FALSE(Read(std::string("a/") + name).empty()) << name;
    EXPECT_EQ(Read(std::string("a/") + name), Read(std::string("b/") + name)) << name;
  }
  const auto report = nlohmann::json::parse(Read("a/report.json"));
  EXPECT_EQ(report.at("schema"), 1);
  EXPECT_EQ(report.at("config").at("t_prune"), 4);
  EXPECT_EQ(report.at("events").size(), 2u);

  ASSERT_EQ(Run("report --in a/report.json --format csv"), 0);
  EXPECT_EQ(Read("out.txt"), Read("a/report.csv"));
}

TEST_F(CliTest, InitClusterSelect) {
  ASSERT_EQ(Run("init --arch toy-plain --seed 2 --out toy.json"), 0);
  ASSERT_EQ(Run("cluster --arch toy.json --layer conv2 --sparsity 0.5 --dendrogram d.jsonl"), 0);
  const auto universe = nlohmann::json::parse(Read("out.txt"));
  EXPECT_EQ(universe.at("n_merges"), 4);
  EXPECT_EQ(universe.at("universe_size"), 32);
  EXPECT_FALSE(Read("d.jsonl").empty());
  ASSERT_EQ(Run("select --arch toy.json --sparsity 0.5 --tie min-l2 --out m.json"), 0);
  const auto mask = nlohmann::json::parse(Read("m.json"));
  for (const auto& layer : mask.at("layers")) EXPECT_EQ(layer.at("kept").size(), 4u);
  EXPECT_EQ(Run("cluster --arch toy.json --layer missing --sparsity 0.5"), 2);
}

}  // namespace
