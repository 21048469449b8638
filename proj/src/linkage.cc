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

#include "reprune/linkage.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "reprune/error.h"

namespace reprune {
namespace {

struct Candidate {
  double distance;
  int left;
  int right;

  // Inverted for std::priority_queue: the top is the smallest distance,
  // then the smallest (left, right).
  bool operator<(const Candidate& other) const {
    return std::tie(distance, left, right) >
           std::tie(other.distance, other.left, other.right);
  }
};

double SquaredDistance(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum;
}

double InitialDistance(LinkageMethod method, std::span<const double> x,
                       std::span<const double> y) {
  const double sq = SquaredDistance(x, y);
  return method == LinkageMethod::kWard ? 0.5 * sq : std::sqrt(sq);
}

double LanceWilliams(LinkageMethod method, double d_ki, double d_kj,
                     double d_ij, double n_i, double n_j, double n_k) {
  switch (method) {
    case LinkageMethod::kSingle:
      return std::min(d_ki, d_kj);
    case LinkageMethod::kComplete:
      return std::max(d_ki, d_kj);
    case LinkageMethod::kAverage:
      return (n_i * d_ki + n_j * d_kj) / (n_i + n_j);
    case LinkageMethod::kWard:
      return ((n_i + n_k) * d_ki + (n_j + n_k) * d_kj - n_k * d_ij) /
             (n_i + n_j + n_k);
  }
  return 0.0;
}

int Find(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::string_view LinkageMethodName(LinkageMethod method) {
  switch (method) {
    case LinkageMethod::kWard:
      return "ward";
    case LinkageMethod::kSingle:
      return "single";
    case LinkageMethod::kComplete:
      return "complete";
    case LinkageMethod::kAverage:
      return "average";
  }
  return "ward";
}

LinkageMethod ParseLinkageMethod(std::string_view name) {
  if (name == "ward") return LinkageMethod::kWard;
  if (name == "single") return LinkageMethod::kSingle;
  if (name == "complete") return LinkageMethod::kComplete;
  if (name == "average") return LinkageMethod::kAverage;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown linkage '" + std::string(name) + "'");
}

KernelSet::KernelSet(int channel, int dim, std::vector<double> values)
    : channel_(channel), dim_(dim), values_(std::move(values)) {
  if (dim_ <= 0 || values_.empty() || values_.size() % dim_ != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel set needs at least one kernel of positive length");
  }
}

KernelSet KernelSet::FromLayer(const ConvLayer& layer, int in_channel,
                               std::span<const int> rows) {
  if (!layer.has_weights()) {
    throw Error(ErrorCode::kInvalidArgument,
                "layer '" + layer.name + "' has no weights to cluster");
  }
  if (in_channel < 0 || in_channel >= layer.in_channels) {
    throw Error(ErrorCode::kOutOfRange, "in-channel out of range");
  }
  std::vector<double> values;
  auto append = [&](int row) {
    const auto k = layer.kernel(row, in_channel);
    values.insert(values.end(), k.begin(), k.end());
  };
  if (rows.empty()) {
    values.reserve(static_cast<std::size_t>(layer.out_channels) * layer.kernel_size());
    for (int r = 0; r < layer.out_channels; ++r) append(r);
  } else {
    values.reserve(rows.size() * layer.kernel_size());
    for (int r : rows) append(r);
  }
  return KernelSet(in_channel, layer.kernel_size(), std::move(values));
}

MergeSequence::MergeSequence(int num_points, std::vector<Merge> merges)
    : num_points_(num_points), merges_(std::move(merges)) {
  if (num_points_ < 1 || steps() > num_points_ - 1) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent merge sequence");
  }
}

double MergeSequence::Objective(int c) const {
  if (c < 0 || c > steps()) {
    throw Error(ErrorCode::kOutOfRange,
                "step " + std::to_string(c) + " beyond " +
                    std::to_string(steps()) + " performed merges");
  }
  return c == 0 ? 0.0 : merges_[c - 1].distance;
}

std::vector<int> MergeSequence::Labels(int c) const {
  Objective(c);  // range check
  std::vector<int> parent(num_points_ + c);
  std::iota(parent.begin(), parent.end(), 0);
  for (int s = 0; s < c; ++s) {
    const int merged = num_points_ + s;
    parent[merges_[s].left] = merged;
    parent[merges_[s].right] = merged;
  }
  std::vector<int> label_of_root(parent.size(), -1);
  std::vector<int> labels(num_points_);
  int next = 0;
  for (int i = 0; i < num_points_; ++i) {
    const int root = Find(parent, i);
    if (label_of_root[root] < 0) label_of_root[root] = next++;
    labels[i] = label_of_root[root];
  }
  return labels;
}

std::vector<std::vector<int>> MergeSequence::Partition(int c) const {
  const std::vector<int> labels = Labels(c);
  std::vector<std::vector<int>> clusters(num_points_ - c);
  for (int i = 0; i < num_points_; ++i) clusters[labels[i]].push_back(i);
  return clusters;
}

double WardDistance(std::span<const std::vector<double>> a,
                    std::span<const std::vector<double>> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ward distance of an empty cluster");
  }
  const std::size_t dim = a.front().size();
  auto centroid = [dim](std::span<const std::vector<double>> cluster) {
    std::vector<double> m(dim, 0.0);
    for (const auto& v : cluster) {
      if (v.size() != dim) {
        throw Error(ErrorCode::kInvalidArgument, "ragged kernel vectors");
      }
      for (std::size_t d = 0; d < dim; ++d) m[d] += v[d];
    }
    for (double& x : m) x /= static_cast<double>(cluster.size());
    return m;
  };
  const std::vector<double> ma = centroid(a);
  const std::vector<double> mb = centroid(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return na * nb / (na + nb) * SquaredDistance(ma, mb);
}

MergeSequence Agglomerate(const KernelSet& kernels, LinkageMethod method,
                          int steps) {
  const int n = kernels.size();
  if (steps < 0 || steps > n - 1) {
    throw Error(ErrorCode::kOutOfRange,
                "cannot perform " + std::to_string(steps) + " merges on " +
                    std::to_string(n) + " kernels");
  }
  std::vector<Merge> merges;
  if (steps == 0) return MergeSequence(n, std::move(merges));
  merges.reserve(steps);

  // Slots hold the live clusters; a merge reuses the left slot.
  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&dist, n](int a, int b) -> double& {
    return dist[static_cast<std::size_t>(a) * n + b];
  };
  std::vector<int> slot_id(n), slot_size(n, 1);
  std::vector<int> slot_of_id(n + steps, -1);
  std::vector<Candidate> initial;
  initial.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    slot_id[i] = i;
    slot_of_id[i] = i;
    for (int j = i + 1; j < n; ++j) {
      const double d = InitialDistance(method, kernels[i], kernels[j]);
      at(i, j) = at(j, i) = d;
      initial.push_back({d, i, j});
    }
  }
  std::priority_queue<Candidate> heap(std::less<Candidate>(), std::move(initial));

  std::vector<bool> active(n + steps, false);
  std::fill(active.begin(), active.begin() + n, true);
  for (int c = 1; c <= steps; ++c) {
    Candidate best = heap.top();
    heap.pop();
    while (!active[best.left] || !active[best.right]) {
      best = heap.top();
      heap.pop();
    }
    const int si = slot_of_id[best.left];
    const int sj = slot_of_id[best.right];
    const int new_id = n + c - 1;
    const double ni = slot_size[si];
    const double nj = slot_size[sj];
    const double d_ij = at(si, sj);
    merges.push_back({c, best.left, best.right, best.distance,
                      slot_size[si] + slot_size[sj]});

    active[best.left] = active[best.right] = false;
    active[new_id] = true;
    slot_of_id[new_id] = si;
    slot_id[si] = new_id;
    slot_size[si] += slot_size[sj];
    slot_id[sj] = -1;

    if (c == steps) break;
    for (int sk = 0; sk < n; ++sk) {
      if (sk == si || slot_id[sk] < 0) continue;
      const double d = LanceWilliams(method, at(sk, si), at(sk, sj), d_ij, ni,
                                     nj, slot_size[sk]);
      at(sk, si) = at(si, sk) = d;
      heap.push({d, std::min(slot_id[sk], new_id), std::max(slot_id[sk], new_id)});
    }
  }
  return MergeSequence(n, std::move(merges));
}

int CutStep(const MergeSequence& seq, int c, double h) {
  if (c == 0) return 0;
  return h >= seq.Objective(c) ? c : c - 1;
}

std::vector<std::vector<int>> ControlCut(const MergeSequence& seq, int c,
                                         double h) {
  return seq.Partition(CutStep(seq, c, h));
}

bool CheckMonotone(const MergeSequence& seq) {
  for (int c = 1; c <= seq.steps(); ++c) {
    if (seq.Objective(c - 1) > seq.Objective(c)) return false;
  }
  return true;
}

void WriteDendrogramJsonl(std::ostream& out, const MergeSequence& seq,
                          int channel) {
  for (const Merge& m : seq.merges()) {
    nlohmann::json line = {{"channel", channel},
                           {"step", m.step},
                           {"a", m.left},
                           {"b", m.right},
                           {"distance", m.distance}};
    out << line.dump() << '\n';
  }
}

}  // namespace reprune
