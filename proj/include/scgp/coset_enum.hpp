// Copyright 2026 The SCGP Authors
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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "scgp/modular_group.hpp"

namespace scgp {

inline constexpr std::size_t kGeneratorCount = 4;

/// The four elementary generators, labeled in this order:
///   g0 = (1,1;0,1), g1 = (1,-1;0,1), g2 = (1,0;1,1), g3 = (1,0;-1,1).
/// g1 = g0^-1 and g3 = g2^-1. At n = 2 the pairs coincide numerically but stay
/// distinct labels.
struct GeneratorSet {
  Modulus modulus;
  std::array<Mat2, kGeneratorCount> generators;

  static GeneratorSet standard(Modulus n);
  [[nodiscard]] const Mat2& operator[](std::size_t label) const { return generators.at(label); }
};

/// Label of the inverse generator: 0 <-> 1, 2 <-> 3.
constexpr std::uint8_t inverse_label(std::uint8_t label) noexcept { return label ^ 1u; }

/// The diagonal subgroup H = {(a,0;0,a^-1) : a a unit mod n}, ordered by a.
struct SubgroupSpec {
  Modulus modulus;
  std::vector<Mat2> elements;

  static SubgroupSpec diagonal(Modulus n);
};

struct Edge {
  std::uint32_t src;
  std::uint8_t label;
  std::uint32_t dst;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class GraphKind { schreier, cayley };

/// A generator-labeled directed multigraph whose vertices are matrices.
/// Self-loops and parallel edges are kept; edges are (src, label, dst).
struct LabeledGraph {
  Modulus modulus;
  GraphKind kind;
  std::vector<Mat2> vertices;
  std::vector<Edge> edges;

  [[nodiscard]] std::size_t vertex_count() const noexcept { return vertices.size(); }
};

/// Schreier-coset graph on right cosets Hg. Vertex i is the canonical
/// representative of the i-th coset discovered by BFS from the identity coset.
struct SchreierGraph : LabeledGraph {
  std::unordered_map<Mat2, std::uint32_t, Mat2Hash> rep_index;

  /// Rebuilds rep_index from vertices.
  void reindex();
};

/// Full Cayley graph: vertices in lexicographic order, edge g -> g * g_label.
struct CayleyGraph : LabeledGraph {};

/// psi(M): the lexicographically smallest h*M over h in H.
Mat2 canonicalize(const Mat2& m, const SubgroupSpec& h);

/// BFS coset enumeration from the identity coset, FIFO, generators in label
/// order. Deterministic.
SchreierGraph enumerate_cosets(Modulus n);

inline constexpr std::uint32_t kCayleyGuard = 12;

CayleyGraph build_cayley(Modulus n, std::uint32_t guard = kCayleyGuard);

}  // namespace scgp
