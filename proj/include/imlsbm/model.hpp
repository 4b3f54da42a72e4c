// Copyright 2026 The imlsbm Authors.
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

#ifndef IMLSBM_MODEL_HPP_
#define IMLSBM_MODEL_HPP_

// Inhomogeneous multilayer two-block SBM: parameters, labelings, graphs and
// the hierarchical sampler (layer labels flip independently, then each layer
// is an SBM on its own labels).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/random.hpp"

namespace imlsbm {

struct ModelParams {
  std::size_t n = 0;
  std::size_t L = 0;
  double rho = 0.0;
  std::vector<double> p;
  std::vector<double> q;
  double beta = 1.0;

  // Throws ParameterError unless p_l > q_l, 0 <= rho < 1/2 and the vectors
  // have length L with entries in the probability range.
  void validate() const {
    detail::require(n >= 1, "n must be positive");
    detail::require(L >= 1, "L must be positive");
    detail::require(rho >= 0.0 && rho < 0.5, "rho must lie in [0, 1/2)");
    detail::require(p.size() == L && q.size() == L,
                    "p and q must have one entry per layer");
    detail::require(beta >= 1.0, "beta must be at least 1");
    for (std::size_t l = 0; l < L; ++l) {
      detail::require(p[l] > 0.0 && p[l] <= 1.0,
                      "p[" + std::to_string(l) + "] must lie in (0, 1]");
      detail::require(q[l] >= 0.0 && q[l] < 1.0,
                      "q[" + std::to_string(l) + "] must lie in [0, 1)");
      detail::require(p[l] > q[l],
                      "p[" + std::to_string(l) + "] must exceed q");
    }
  }
};

// A +1/-1 labeling of n nodes.
class Assignment {
 public:
  Assignment() = default;

  explicit Assignment(std::vector<int> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      detail::require(labels_[i] == 1 || labels_[i] == -1,
                      "label " + std::to_string(i) + " is not +1 or -1");
    }
  }

  Assignment(std::initializer_list<int> labels)
      : Assignment(std::vector<int>(labels)) {}

  static Assignment constant(std::size_t n, int label) {
    return Assignment(std::vector<int>(n, label));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }

  std::size_t count_plus() const noexcept {
    std::size_t count = 0;
    for (int s : labels_) count += (s == 1);
    return count;
  }
  std::size_t count_minus() const noexcept { return size() - count_plus(); }

  Assignment negated() const {
    Assignment out = *this;
    for (int& s : out.labels_) s = -s;
    return out;
  }

  Assignment with(std::size_t i, int label) const {
    Assignment out = *this;
    detail::require(label == 1 || label == -1, "label must be +1 or -1");
    out.labels_.at(i) = label;
    return out;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<int> labels_;
};

// First floor(n/2) nodes +1, the rest -1.
inline Assignment balanced_assignment(std::size_t n) {
  detail::require(n >= 2, "balanced assignment needs n >= 2");
  std::vector<int> labels(n, -1);
  for (std::size_t i = 0; i < n / 2; ++i) labels[i] = 1;
  return Assignment(std::move(labels));
}

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// L symmetric 0/1 layers with zero diagonal.  Each layer is stored as a
// bit-packed strict upper triangle plus a CSR neighbor index; both are
// built once and never mutated.
class MultilayerGraph {
 public:
  MultilayerGraph() = default;

  // edges[l] lists the undirected edges of layer l; any orientation is
  // accepted, duplicates and self-loops are rejected.
  MultilayerGraph(std::size_t n, const std::vector<std::vector<Edge>>& edges)
      : n_(n), layers_(edges.size()) {
    const std::size_t pairs = n * (n > 0 ? n - 1 : 0) / 2;
    for (std::size_t l = 0; l < edges.size(); ++l) {
      Layer& layer = layers_[l];
      layer.bits.assign((pairs + 63) / 64, 0);
      std::vector<std::uint32_t> degree(n, 0);
      for (auto [a, b] : edges[l]) {
        detail::require(a < n && b < n, "edge endpoint out of range");
        detail::require(a != b, "self-loops are not allowed");
        const auto [i, j] = std::minmax(a, b);
        const std::size_t bit = pair_index(i, j);
        detail::require(!(layer.bits[bit / 64] >> (bit % 64) & 1ULL),
                        "duplicate edge in layer " + std::to_string(l));
        layer.bits[bit / 64] |= 1ULL << (bit % 64);
        ++degree[i];
        ++degree[j];
      }
      layer.edge_count = edges[l].size();
      layer.offsets.assign(n + 1, 0);
      for (std::size_t i = 0; i < n; ++i) {
        layer.offsets[i + 1] = layer.offsets[i] + degree[i];
      }
      layer.neighbors.resize(layer.offsets[n]);
      std::vector<std::uint32_t> cursor(layer.offsets.begin(),
                                        layer.offsets.end() - 1);
      // Walk the bit triangle in order so neighbor lists come out sorted.
      for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
          if (has_bit(layer, pair_index(i, j))) {
            layer.neighbors[cursor[i]++] = j;
            layer.neighbors[cursor[j]++] = i;
          }
        }
      }
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t num_layers() const noexcept { return layers_.size(); }

  bool has_edge(std::size_t l, std::size_t i, std::size_t j) const {
    if (i == j) return false;
    const auto [a, b] = std::minmax(i, j);
    return has_bit(layers_[l], pair_index(a, b));
  }

  std::span<const std::uint32_t> neighbors(std::size_t l,
                                           std::size_t i) const {
    const Layer& layer = layers_[l];
    return {layer.neighbors.data() + layer.offsets[i],
            layer.neighbors.data() + layer.offsets[i + 1]};
  }

  std::size_t degree(std::size_t l, std::size_t i) const {
    return layers_[l].offsets[i + 1] - layers_[l].offsets[i];
  }

  std::size_t edge_count(std::size_t l) const {
    return layers_[l].edge_count;
  }

  // Row i of layer l as a dense 0/1 vector.
  std::vector<std::uint8_t> dense_row(std::size_t l, std::size_t i) const {
    std::vector<std::uint8_t> row(n_, 0);
    for (std::uint32_t j : neighbors(l, i)) row[j] = 1;
    return row;
  }

  // Edges (i, j) with i < j in lexicographic order.
  std::vector<Edge> edges(std::size_t l) const {
    std::vector<Edge> out;
    out.reserve(edge_count(l));
    for (std::uint32_t i = 0; i < n_; ++i) {
      for (std::uint32_t j : neighbors(l, i)) {
        if (j > i) out.emplace_back(i, j);
      }
    }
    return out;
  }

  friend bool operator==(const MultilayerGraph& a, const MultilayerGraph& b) {
    if (a.n_ != b.n_ || a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
      if (a.layers_[l].bits != b.layers_[l].bits) return false;
    }
    return true;
  }

 private:
  struct Layer {
    std::vector<std::uint64_t> bits;
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> neighbors;
    std::size_t edge_count = 0;
  };

  std::size_t pair_index(std::size_t i, std::size_t j) const {
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }
  static bool has_bit(const Layer& layer, std::size_t bit) {
    return (layer.bits[bit / 64] >> (bit % 64)) & 1ULL;
  }

  std::size_t n_ = 0;
  std::vector<Layer> layers_;
};

struct SampleRecord {
  ModelParams params;
  Assignment z_star;
  std::vector<Assignment> z_layers;
  MultilayerGraph graph;
  std::uint64_t seed = 0;
  std::vector<std::size_t> flip_counts;
};

// Draws layer labels z^(l)_i = z*_i * (2 Bern(1 - rho) - 1) and then each
// edge i < j of layer l with probability p_l (same label) or q_l.  Layer l
// consumes only its own stream, so layers could be sampled concurrently.
inline SampleRecord sample_imlsbm(const ModelParams& params,
                                  const Assignment& z_star,
                                  std::uint64_t seed) {
  params.validate();
  detail::require(z_star.size() == params.n, "z_star must have length n");
  const std::size_t n = params.n;
  SampleRecord record;
  record.params = params;
  record.z_star = z_star;
  record.seed = seed;
  record.z_layers.reserve(params.L);
  record.flip_counts.assign(params.L, 0);
  std::vector<std::vector<Edge>> edges(params.L);
  for (std::size_t l = 0; l < params.L; ++l) {
    Engine engine = make_engine(seed, StreamTag::kLayer, l);
    std::vector<int> labels(z_star.labels().begin(), z_star.labels().end());
    for (std::size_t i = 0; i < n; ++i) {
      if (uniform01(engine) < params.rho) {
        labels[i] = -labels[i];
        ++record.flip_counts[l];
      }
    }
    const double p = params.p[l];
    const double q = params.q[l];
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j < n; ++j) {
        const double prob = labels[i] == labels[j] ? p : q;
        if (uniform01(engine) < prob) edges[l].emplace_back(i, j);
      }
    }
    record.z_layers.emplace_back(std::move(labels));
  }
  record.graph = MultilayerGraph(n, edges);
  return record;
}

enum class LayerGroup { kWeak, kIntermediate, kStrong };

inline const char* to_string(LayerGroup group) {
  switch (group) {
    case LayerGroup::kWeak:
      return "weak";
    case LayerGroup::kIntermediate:
      return "intermediate";
    case LayerGroup::kStrong:
      return "strong";
  }
  return "unknown";
}

// kMixed is the three-group layout: layers [0, floor(0.3L)) weak,
// [floor(0.3L), floor(0.95L)) intermediate, the remainder strong.  The
// other values put every layer in one group.
enum class Scaling { kWeak, kIntermediate, kStrong, kMixed };

struct ExperimentDesign {
  ModelParams params;
  std::vector<LayerGroup> groups;
};

inline ExperimentDesign experiment_params(std::size_t n, std::size_t L,
                                          double c, double rho,
                                          Scaling scaling) {
  detail::require(n >= 2 && L >= 1, "need n >= 2 and L >= 1");
  detail::require(c > 1.0, "signal constant c must exceed 1");
  ExperimentDesign design;
  ModelParams& params = design.params;
  params.n = n;
  params.L = L;
  params.rho = rho;
  const double nd = static_cast<double>(n);
  const double ld = static_cast<double>(L);
  const double log_n = std::log(nd);
  // floor(0.3 L) and floor(0.95 L) in exact integer arithmetic.
  const std::size_t weak_end = (3 * L) / 10;
  const std::size_t intermediate_end = (19 * L) / 20;
  for (std::size_t l = 0; l < L; ++l) {
    LayerGroup group = LayerGroup::kStrong;
    switch (scaling) {
      case Scaling::kWeak:
        group = LayerGroup::kWeak;
        break;
      case Scaling::kIntermediate:
        group = LayerGroup::kIntermediate;
        break;
      case Scaling::kStrong:
        group = LayerGroup::kStrong;
        break;
      case Scaling::kMixed:
        group = l < weak_end           ? LayerGroup::kWeak
                : l < intermediate_end ? LayerGroup::kIntermediate
                                       : LayerGroup::kStrong;
        break;
    }
    double base = 0.0;
    switch (group) {
      case LayerGroup::kWeak:
        base = 1.0 / (nd * ld);
        break;
      case LayerGroup::kIntermediate:
        base = log_n / (nd * ld);
        break;
      case LayerGroup::kStrong:
        base = log_n / nd;
        break;
    }
    const double p = c * base;
    detail::require(p < 1.0, "layer " + std::to_string(l) +
                                 " has p >= 1; reduce c or grow n");
    params.p.push_back(p);
    params.q.push_back(base);
    design.groups.push_back(group);
  }
  params.validate();
  return design;
}

}  // namespace imlsbm

#endif  // IMLSBM_MODEL_HPP_
