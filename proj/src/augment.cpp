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

#include "scgp/augment.hpp"

#include <algorithm>
#include <cmath>

#include "scgp/error.hpp"

namespace scgp {

void validate_features(const FeatureMatrix& x) {
  if (x.rows == 0) throw InvalidArgument("feature matrix must have at least one node");
  if (x.values.size() != x.rows * x.cols) throw InvalidArgument("feature matrix storage does not match its shape");
  for (double v : x.values) {
    if (!std::isfinite(v)) throw InvalidArgument("feature matrix contains a non-finite value");
  }
}

Modulus select_modulus(std::size_t num_nodes) {
  if (num_nodes == 0) throw InvalidArgument("select_modulus: num_nodes must be >= 1");
  for (std::uint64_t n = 2;; ++n) {
    if (coset_count(Modulus(n)) >= num_nodes) return Modulus(n);
  }
}

DenseMatrix map_embeddings(const DenseMatrix& z, std::size_t num_nodes) {
  if (num_nodes == 0) throw InvalidArgument("map_embeddings: num_nodes must be >= 1");
  DenseMatrix out(num_nodes, z.cols);
  const std::size_t copied = std::min(num_nodes, z.rows);
  std::copy_n(z.values.begin(), copied * z.cols, out.values.begin());
  return out;
}

FeatureMatrix concat_features(const FeatureMatrix& x_in, const DenseMatrix& z_mapped) {
  if (x_in.rows != z_mapped.rows) {
    throw InvalidArgument("concat_features: row counts differ (" + std::to_string(x_in.rows) + " vs " +
                          std::to_string(z_mapped.rows) + ")");
  }
  FeatureMatrix out(x_in.rows, x_in.cols + z_mapped.cols);
  for (std::size_t i = 0; i < out.rows; ++i) {
    auto dst = out.row(i);
    std::copy(x_in.row(i).begin(), x_in.row(i).end(), dst.begin());
    std::copy(z_mapped.row(i).begin(), z_mapped.row(i).end(), dst.begin() + static_cast<std::ptrdiff_t>(x_in.cols));
  }
  return out;
}

AugmentResult augment(const AugmentRequest& request, ArtifactCache& cache) {
  validate_features(request.input_features);
  request.config.validate();
  const std::size_t num_nodes = request.input_features.rows;
  const Modulus n = request.modulus_override ? Modulus(*request.modulus_override) : select_modulus(num_nodes);

  const Fetched<EmbeddingMatrix> z = cache.fetch_embeddings(n, request.config);
  const DenseMatrix mapped = map_embeddings(z.value, num_nodes);

  AugmentResult result;
  result.features = concat_features(request.input_features, mapped);

  Provenance& p = result.provenance;
  p.n = n.value();
  p.schreier_vertex_count = z.value.values.rows;
  p.num_nodes = num_nodes;
  p.input_dim = request.input_features.cols;
  p.embed_dim = z.value.values.cols;
  p.output_dim = result.features.cols;
  p.config_hash = cache_config_hash(request.config);
  p.embedding_hash = to_hex(z.value.meta.content_hash);
  p.cache_hit = z.cache_hit;
  p.modulus_overridden = request.modulus_override.has_value();
  if (p.schreier_vertex_count < num_nodes) {
    p.mapping = RowMapping::pad;
    p.padded_rows = num_nodes - p.schreier_vertex_count;
  } else {
    p.mapping = p.schreier_vertex_count == num_nodes ? RowMapping::exact : RowMapping::truncate;
  }
  return result;
}

nlohmann::ordered_json to_json(const Provenance& p) {
  nlohmann::ordered_json j;
  j["n"] = p.n;
  j["schreier_vertex_count"] = p.schreier_vertex_count;
  j["num_nodes"] = p.num_nodes;
  j["input_dim"] = p.input_dim;
  j["embed_dim"] = p.embed_dim;
  j["output_dim"] = p.output_dim;
  j["modulus_overridden"] = p.modulus_overridden;
  j["config_hash"] = p.config_hash;
  j["embedding_hash"] = p.embedding_hash;
  j["cache_hit"] = p.cache_hit;
  j["row_mapping"] = p.mapping == RowMapping::pad ? "pad" : p.mapping == RowMapping::truncate ? "truncate" : "exact";
  j["padded_rows"] = p.padded_rows;
  // Positional alignment: input node i receives the coset discovered i-th by
  // BFS from the identity coset. One Z_S per (n, config) is shared by all
  // graphs that select the same n.
  j["row_order"] = "bfs-from-identity-coset";
  j["embedding_sharing"] = "one-per-modulus-and-config";
  j["weights"] = "fixed-seeded-random";
  return j;
}

}  // namespace scgp
