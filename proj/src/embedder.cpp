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

#include "scgp/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "scgp/error.hpp"
#include "scgp/formats.hpp"
#include "scgp/kernels.hpp"

namespace scgp {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_finite(const DenseMatrix& m, std::size_t layer) {
  for (double v : m.values) {
    if (!std::isfinite(v)) {
      throw NonFiniteValue("non-finite value produced in propagation layer " + std::to_string(layer));
    }
  }
}

void activate(DenseMatrix& m, Activation act) {
  switch (act) {
    case Activation::relu:
      kernels::relu(m.values);
      break;
    case Activation::tanh:
      for (double& v : m.values) v = std::tanh(v);
      break;
    case Activation::identity:
      break;
  }
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw InvalidArgument("unknown activation '" + std::string(name) + "' (relu|tanh|identity)");
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
  }
  return "unknown";
}

void PropagationConfig::validate() const {
  if (layers == 0) throw InvalidArgument("layers must be >= 1");
  if (layers > 0xffff) throw InvalidArgument("layers must fit in 16 bits");
  if (hidden_dim == 0) throw InvalidArgument("hidden_dim must be >= 1");
  if (embed_dim == 0) throw InvalidArgument("embed_dim must be >= 1");
}

Digest config_digest(const PropagationConfig& c) {
  std::vector<std::uint8_t> bytes;
  auto put = [&bytes](std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(c.layers, 4);
  put(c.hidden_dim, 4);
  put(c.embed_dim, 4);
  put(c.seed, 8);
  put(static_cast<std::uint8_t>(c.activation), 1);
  return Sha256().update("scgp-propagation-config/v1").update(bytes).finish();
}

PropagationOperator propagation_operator(GraphView g) {
  WeightedAdjacency adj = multiplicity_adjacency(g);
  PropagationOperator op;
  op.size = adj.vertex_count;
  op.row_ptr.assign(op.size + 1, 0);
  std::vector<double> deg(op.size);
  for (std::size_t v = 0; v < op.size; ++v) deg[v] = adj.degree[v] + 1.0;

  for (std::uint32_t u = 0; u < op.size; ++u) {
    bool diag_done = false;
    auto emit = [&](std::uint32_t v, double w) {
      op.col.push_back(v);
      op.value.push_back(w / std::sqrt(deg[u] * deg[v]));
    };
    for (std::size_t k = adj.row_ptr[u]; k < adj.row_ptr[u + 1]; ++k) {
      const std::uint32_t v = adj.col[k];
      if (!diag_done && v >= u) {
        if (v == u) {
          emit(u, adj.weight[k] + 1.0);
          diag_done = true;
          continue;
        }
        emit(u, 1.0);
        diag_done = true;
      }
      emit(v, adj.weight[k]);
    }
    if (!diag_done) emit(u, 1.0);
    op.row_ptr[u + 1] = op.col.size();
  }
  return op;
}

std::vector<DenseMatrix> init_weights(const PropagationConfig& config, std::size_t input_dim) {
  config.validate();
  if (input_dim == 0) throw InvalidArgument("init_weights: input dimension must be >= 1");
  std::vector<DenseMatrix> weights;
  weights.reserve(config.layers);
  for (std::uint32_t l = 0; l < config.layers; ++l) {
    const std::size_t fan_in = l == 0 ? input_dim : config.hidden_dim;
    const std::size_t fan_out = l + 1 == config.layers ? config.embed_dim : config.hidden_dim;
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::mt19937_64 engine(splitmix64(splitmix64(config.seed) + std::uint64_t{l} * kGolden));
    DenseMatrix w(fan_in, fan_out);
    for (double& v : w.values) {
      const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
      v = s * (2.0 * u - 1.0);
    }
    weights.push_back(std::move(w));
  }
  return weights;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw InvalidArgument("matmul: inner dimensions differ");
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double alpha = a.at(i, k);
      // Adding alpha * b_k with alpha == 0 cannot change dst (never -0.0).
      if (alpha != 0.0) kernels::axpy(alpha, b.row(k), dst);
    }
  }
  return out;
}

DenseMatrix apply_operator(const PropagationOperator& op, const DenseMatrix& x) {
  if (op.size != x.rows) throw InvalidArgument("apply_operator: size mismatch");
  DenseMatrix out(x.rows, x.cols);
  for (std::size_t u = 0; u < op.size; ++u) {
    auto dst = out.row(u);
    for (std::size_t k = op.row_ptr[u]; k < op.row_ptr[u + 1]; ++k) kernels::axpy(op.value[k], x.row(op.col[k]), dst);
  }
  return out;
}

DenseMatrix propagate(GraphView g, const PropagationConfig& config, const DenseMatrix* initial_features) {
  config.validate();
  if (g.vertex_count == 0) throw InvalidArgument("propagate: empty graph");
  const PropagationOperator op = propagation_operator(g);
  const std::size_t input_dim = initial_features ? initial_features->cols : g.vertex_count;
  if (initial_features && initial_features->rows != g.vertex_count) {
    throw InvalidArgument("propagate: feature rows must equal vertex count");
  }
  std::vector<DenseMatrix> weights = init_weights(config, input_dim);

  DenseMatrix h;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    DenseMatrix transformed;
    if (l == 0) {
      // I * W_0 == W_0.
      transformed = initial_features ? matmul(*initial_features, weights[0]) : std::move(weights[0]);
    } else {
      transformed = matmul(h, weights[l]);
    }
    h = apply_operator(op, transformed);
    check_finite(h, l);
    if (l + 1 < weights.size()) activate(h, config.activation);
  }
  return h;
}

EmbeddingMatrix gcn_propagate(const SchreierGraph& graph, const PropagationConfig& config) {
  EmbeddingMatrix z;
  z.values = propagate(view(graph), config);
  z.meta.n = graph.modulus.value();
  z.meta.config = config;
  z.meta.content_hash = embedding_hash(z);
  return z;
}

Digest embedding_hash(const EmbeddingMatrix& z) { return sha256(io::encode_embedding_body(z)); }

EmbeddingMatrix to_storage_precision(EmbeddingMatrix z) {
  for (double& v : z.values.values) v = static_cast<double>(static_cast<float>(v));
  z.meta.content_hash = embedding_hash(z);
  return z;
}

}  // namespace scgp
