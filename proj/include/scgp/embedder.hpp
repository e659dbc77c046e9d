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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scgp/coset_enum.hpp"
#include "scgp/graph_analysis.hpp"
#include "scgp/hash.hpp"

namespace scgp {

enum class Activation : std::uint8_t { relu = 0, tanh = 1, identity = 2 };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);

/// Settings of the fixed propagation network. All randomness comes from `seed`.
struct PropagationConfig {
  std::uint32_t layers = 4;
  std::uint32_t hidden_dim = 64;
  std::uint32_t embed_dim = 64;
  std::uint64_t seed = 0;
  Activation activation = Activation::relu;

  /// Throws InvalidArgument when a dimension or the layer count is zero.
  void validate() const;

  friend bool operator==(const PropagationConfig&, const PropagationConfig&) = default;
};

/// Stable digest of every config field plus a format-version tag.
Digest config_digest(const PropagationConfig& config);

/// Row-major dense matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  [[nodiscard]] double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  [[nodiscard]] std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

struct EmbeddingMeta {
  std::uint32_t n = 0;
  PropagationConfig config;
  Digest content_hash{};
};

/// Z_S: row i is the embedding of Schreier vertex i.
struct EmbeddingMatrix {
  DenseMatrix values;
  EmbeddingMeta meta;
};

/// Symmetric propagation operator D^-1/2 (A + I) D^-1/2 in CSR form, columns
/// ascending per row. A counts edge multiplicity.
struct PropagationOperator {
  std::size_t size = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> value;
};

PropagationOperator propagation_operator(GraphView g);

/// Weight matrices for each layer: [input_dim -> hidden], [hidden -> hidden]
/// x (layers - 2), [hidden -> embed]; a single layer maps input_dim -> embed.
///
/// Entries are uniform in (-s, s) with s = sqrt(6 / (fan_in + fan_out)).
/// Layer l draws from std::mt19937_64 seeded with
/// splitmix64(splitmix64(seed) + l * 0x9e3779b97f4a7c15); each draw's top
/// 53 bits u give s * (2 * (u + 0.5) * 2^-53 - 1). Values are filled row-major.
std::vector<DenseMatrix> init_weights(const PropagationConfig& config, std::size_t input_dim);

/// H_{l+1} = act(P (H_l W_l)), H_0 = I. The identity is never materialized:
/// the first layer starts from W_0 directly. The last layer is linear.
/// Throws NonFiniteValue naming the layer if a NaN/Inf appears.
EmbeddingMatrix gcn_propagate(const SchreierGraph& graph, const PropagationConfig& config);

/// Same network over any graph view. With `initial_features` the input matrix
/// is multiplied explicitly (used to check the identity shortcut).
DenseMatrix propagate(GraphView g, const PropagationConfig& config,
                      const DenseMatrix* initial_features = nullptr);

/// out = a * b, accumulating rows of b in index order.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// out = op * x, accumulating neighbor rows in column order.
DenseMatrix apply_operator(const PropagationOperator& op, const DenseMatrix& x);

/// SHA-256 over the canonical embedding-file encoding (little-endian header
/// with dims and config, then the values as 32-bit floats).
Digest embedding_hash(const EmbeddingMatrix& z);

/// Rounds every value to float32, the precision stored on disk, and refreshes
/// the content hash. Cached and freshly built embeddings then agree bitwise.
EmbeddingMatrix to_storage_precision(EmbeddingMatrix z);

}  // namespace scgp
