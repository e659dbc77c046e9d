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

#include "scgp/coset_enum.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "scgp/error.hpp"

namespace scgp {

GeneratorSet GeneratorSet::standard(Modulus n) {
  const std::int64_t m = n.value();
  return GeneratorSet{n,
                      {Mat2::make(1, 1, 0, 1, n), Mat2::make(1, m - 1, 0, 1, n),
                       Mat2::make(1, 0, 1, 1, n), Mat2::make(1, 0, m - 1, 1, n)}};
}

SubgroupSpec SubgroupSpec::diagonal(Modulus n) {
  SubgroupSpec h{n, {}};
  for (std::uint32_t a = 1; a < n.value(); ++a) {
    if (std::gcd(a, n.value()) != 1) continue;
    h.elements.push_back(Mat2::make(a, 0, 0, inverse_mod(a, n), n));
  }
  return h;
}

void SchreierGraph::reindex() {
  rep_index.clear();
  rep_index.reserve(vertices.size());
  for (std::uint32_t i = 0; i < vertices.size(); ++i) rep_index.emplace(vertices[i], i);
}

Mat2 canonicalize(const Mat2& m, const SubgroupSpec& h) {
  if (h.elements.empty()) throw InvalidArgument("canonicalize: empty subgroup");
  Mat2 best = mat_mul(h.elements.front(), m);
  for (std::size_t i = 1; i < h.elements.size(); ++i) {
    Mat2 candidate = mat_mul(h.elements[i], m);
    if (candidate < best) best = candidate;
  }
  return best;
}

SchreierGraph enumerate_cosets(Modulus n) {
  const GeneratorSet gens = GeneratorSet::standard(n);
  const SubgroupSpec h = SubgroupSpec::diagonal(n);

  SchreierGraph g{{n, GraphKind::schreier, {}, {}}, {}};
  const std::uint64_t expected = coset_count(n);
  g.vertices.reserve(expected);
  g.edges.reserve(expected * kGeneratorCount);
  g.rep_index.reserve(expected);

  auto intern = [&g](const Mat2& rep) {
    auto [it, inserted] = g.rep_index.try_emplace(rep, static_cast<std::uint32_t>(g.vertices.size()));
    if (inserted) g.vertices.push_back(rep);
    return it->second;
  };

  intern(canonicalize(Mat2::identity(n), h));
  // Vertices are appended in discovery order, so the vertex list is the queue.
  for (std::uint32_t head = 0; head < g.vertices.size(); ++head) {
    const Mat2 rep = g.vertices[head];
    for (std::uint8_t label = 0; label < kGeneratorCount; ++label) {
      const std::uint32_t dst = intern(canonicalize(mat_mul(rep, gens[label]), h));
      g.edges.push_back({head, label, dst});
    }
  }

  if (g.vertices.size() != expected) {
    throw InternalError("enumerate_cosets: found " + std::to_string(g.vertices.size()) +
                        " cosets, formula gives " + std::to_string(expected));
  }
  return g;
}

CayleyGraph build_cayley(Modulus n, std::uint32_t guard) {
  if (n.value() > guard) {
    throw GuardExceeded("Cayley graph for n = " + std::to_string(n.value()) + " exceeds guard n <= " +
                        std::to_string(guard) + " (it has " + std::to_string(group_order(n)) +
                        " vertices); use the Schreier-coset graph instead");
  }
  const GeneratorSet gens = GeneratorSet::standard(n);
  CayleyGraph g{{n, GraphKind::cayley, enumerate_group(n, guard), {}}};
  g.edges.reserve(g.vertices.size() * kGeneratorCount);
  for (std::uint32_t i = 0; i < g.vertices.size(); ++i) {
    for (std::uint8_t label = 0; label < kGeneratorCount; ++label) {
      const Mat2 target = mat_mul(g.vertices[i], gens[label]);
      const auto it = std::lower_bound(g.vertices.begin(), g.vertices.end(), target);
      g.edges.push_back({i, label, static_cast<std::uint32_t>(it - g.vertices.begin())});
    }
  }
  return g;
}

}  // namespace scgp
