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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "scgp/cache_store.hpp"
#include "scgp/embedder.hpp"

namespace scgp {

/// Node features, one row per node in node order. dim 0 is a featureless graph.
using FeatureMatrix = DenseMatrix;

/// Throws InvalidArgument for zero rows or non-finite entries.
void validate_features(const FeatureMatrix& x);

struct AugmentRequest {
  FeatureMatrix input_features;
  std::optional<std::uint64_t> modulus_override;
  PropagationConfig config;
};

enum class RowMapping { exact, pad, truncate };

struct Provenance {
  std::uint32_t n = 0;
  std::size_t schreier_vertex_count = 0;
  std::size_t num_nodes = 0;
  std::size_t input_dim = 0;
  std::size_t embed_dim = 0;
  std::size_t output_dim = 0;
  std::string config_hash;
  std::string embedding_hash;
  bool cache_hit = false;
  bool modulus_overridden = false;
  RowMapping mapping = RowMapping::exact;
  std::size_t padded_rows = 0;
};

nlohmann::ordered_json to_json(const Provenance& p);

struct AugmentResult {
  FeatureMatrix features;
  Provenance provenance;
};

/// Smallest n >= 2 with coset_count(n) >= num_nodes, by forward scan
/// (coset_count is not monotone in n).
Modulus select_modulus(std::size_t num_nodes);

/// Positional mapping of Z_S onto `num_nodes` rows: zero-padded when Z_S is
/// shorter, otherwise its first `num_nodes` rows in BFS vertex order.
DenseMatrix map_embeddings(const DenseMatrix& z, std::size_t num_nodes);
inline DenseMatrix map_embeddings(const EmbeddingMatrix& z, std::size_t num_nodes) {
  return map_embeddings(z.values, num_nodes);
}

/// [x_in | z_mapped], x_in columns first.
FeatureMatrix concat_features(const FeatureMatrix& x_in, const DenseMatrix& z_mapped);

/// Full pipeline: choose n, fetch Z_S from the cache, map, concatenate.
AugmentResult augment(const AugmentRequest& request, ArtifactCache& cache);

}  // namespace scgp
