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

// Reference implementations used only by tests. They recompute everything
// from scratch and share no code with the library.

#ifndef REPRUNE_TESTS_ORACLES_H_
#define REPRUNE_TESTS_ORACLES_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "reprune/coverage.h"
#include "reprune/descriptors.h"
#include "reprune/linkage.h"
#include "reprune/model.h"
#include "reprune/random.h"

namespace reprune::oracle {

using Point = std::vector<double>;

inline double SquaredDistance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Within-cluster sum of squared deviations from the mean, in extended
// precision: the SSE difference below cancels heavily for nearby clusters.
inline long double Sse(const std::vector<Point>& points) {
  const std::size_t dim = points.front().size();
  std::vector<long double> mean(dim, 0.0L);
  for (const Point& p : points) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
  }
  for (long double& m : mean) m /= static_cast<long double>(points.size());
  long double s = 0.0L;
  for (const Point& p : points) {
    for (std::size_t d = 0; d < dim; ++d) s += (p[d] - mean[d]) * (p[d] - mean[d]);
  }
  return s;
}

inline double SseIncrease(const std::vector<Point>& a, const std::vector<Point>& b) {
  std::vector<Point> both = a;
  both.insert(both.end(), b.begin(), b.end());
  return static_cast<double>(Sse(both) - Sse(a) - Sse(b));
}

inline double RelativeError(double got, double want) {
  const double scale = std::max({std::abs(got), std::abs(want), 1e-300});
  return std::abs(got - want) / scale;
}

// Distance between two clusters of point indices, recomputed from members.
inline double ClusterDistance(const std::vector<Point>& points,
                              const std::vector<int>& a,
                              const std::vector<int>& b, LinkageMethod method) {
  if (method == LinkageMethod::kWard) {
    std::vector<Point> pa, pb;
    for (int i : a) pa.push_back(points[i]);
    for (int i : b) pb.push_back(points[i]);
    return SseIncrease(pa, pb);
  }
  double best = method == LinkageMethod::kSingle
                    ? std::numeric_limits<double>::infinity()
                    : 0.0;
  double sum = 0.0;
  for (int i : a) {
    for (int j : b) {
      const double d = std::sqrt(SquaredDistance(points[i], points[j]));
      if (method == LinkageMethod::kSingle) best = std::min(best, d);
      if (method == LinkageMethod::kComplete) best = std::max(best, d);
      sum += d;
    }
  }
  if (method == LinkageMethod::kAverage) {
    return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  }
  return best;
}

struct NaiveStep {
  double distance = 0.0;
  // Partition after this step, each cluster sorted, ordered by smallest member.
  std::vector<std::vector<int>> partition;
};

inline std::vector<std::vector<int>> Canonical(std::vector<std::vector<int>> p) {
  for (auto& c : p) std::sort(c.begin(), c.end());
  std::sort(p.begin(), p.end());
  return p;
}

// O(n^3) agglomeration: every step recomputes all pairwise cluster distances.
inline std::vector<NaiveStep> NaiveAgglomerate(const std::vector<Point>& points,
                                               LinkageMethod method, int steps) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) clusters.push_back({i});
  std::vector<NaiveStep> out;
  for (int s = 0; s < steps; ++s) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = ClusterDistance(points, clusters[i], clusters[j], method);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    out.push_back({best, Canonical(clusters)});
  }
  return out;
}

inline std::vector<Point> RandomPoints(Rng& rng, int n, int dim) {
  std::vector<Point> points(n, Point(dim));
  for (Point& p : points) {
    for (double& v : p) v = rng.Normal(0.0, 1.0);
  }
  return points;
}

inline KernelSet ToKernelSet(const std::vector<Point>& points) {
  std::vector<double> flat;
  for (const Point& p : points) flat.insert(flat.end(), p.begin(), p.end());
  return KernelSet(0, static_cast<int>(points.front().size()), std::move(flat));
}

// inf{g : F(g) >= target} by sorting and scanning, with F(g) the count of
// pool values <= g over the pool size.
inline double SortQuantile(std::vector<double> pool, double target) {
  std::sort(pool.begin(), pool.end());
  const double n = static_cast<double>(pool.size());
  for (double g : pool) {
    const auto at_or_below = std::upper_bound(pool.begin(), pool.end(), g) - pool.begin();
    if (static_cast<double>(at_or_below) / n >= target) return g;
  }
  return pool.back();
}

// Coverage instance as plain sets: filter i covers elements sets[i].
struct SetSystem {
  int universe = 0;
  std::vector<std::vector<int>> sets;
  int k = 0;
};

inline int CoveredBy(const SetSystem& system, std::uint32_t subset) {
  std::set<int> covered;
  for (std::size_t i = 0; i < system.sets.size(); ++i) {
    if (subset >> i & 1u) covered.insert(system.sets[i].begin(), system.sets[i].end());
  }
  return static_cast<int>(covered.size());
}

// Best coverage over every k-subset, by enumerating all bitmasks.
inline int ExhaustiveOptimum(const SetSystem& system) {
  const int n = static_cast<int>(system.sets.size());
  int best = 0;
  for (std::uint32_t subset = 0; subset < (1u << n); ++subset) {
    if (std::popcount(subset) != system.k) continue;
    best = std::max(best, CoveredBy(system, subset));
  }
  return best;
}

// Random dense labels for `channels` channels over `filters` filters, with
// the matching CoverageInstance and set-system view.
struct RandomCoverage {
  std::vector<int> clusters_per_channel;
  std::vector<std::vector<int>> labels;  // [channel][filter]
  SetSystem system;
};

inline RandomCoverage MakeRandomCoverage(Rng& rng, int filters, int channels, int k) {
  RandomCoverage out;
  out.system.k = k;
  out.system.sets.assign(filters, {});
  for (int j = 0; j < channels; ++j) {
    const int groups = 1 + static_cast<int>(rng.Below(filters));
    std::vector<int> raw(filters);
    for (int& r : raw) r = static_cast<int>(rng.Below(groups));
    // Relabel densely in order of first appearance.
    std::vector<int> dense(groups, -1);
    int next = 0;
    std::vector<int> labels(filters);
    for (int i = 0; i < filters; ++i) {
      if (dense[raw[i]] < 0) dense[raw[i]] = next++;
      labels[i] = dense[raw[i]];
      out.system.sets[i].push_back(out.system.universe + labels[i]);
    }
    out.system.universe += next;
    out.clusters_per_channel.push_back(next);
    out.labels.push_back(std::move(labels));
  }
  return out;
}

inline ModelSnapshot Materialized(const std::string& name, std::uint64_t seed) {
  ModelSnapshot snapshot = BuiltinDescriptor(name);
  MaterializeWeights(snapshot, seed);
  return snapshot;
}

}  // namespace reprune::oracle

#endif  // REPRUNE_TESTS_ORACLES_H_
