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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scgp/coset_enum.hpp"
#include "scgp/embedder.hpp"

// On-disk formats.
//
// Graph file (JSON):
//   {"format": "scgp-graph", "version": 1, "n": N, "kind": "schreier"|"cayley",
//    "vertices": [[a,b,c,d], ...], "edges": [[src, label, dst], ...]}
//
// Embedding file (binary, little-endian):
//   off  size  field
//     0     4  magic "SCGP"
//     4     2  version = 1
//     6     2  flags = 0
//     8     4  n
//    12     4  rows
//    16     4  cols
//    20     8  seed
//    28     2  layers
//    30     1  activation (0 relu, 1 tanh, 2 identity)
//    31     1  reserved = 0
//    32     4  hidden_dim
//    36  4*rows*cols  values as float32, row-major
//   end    32  SHA-256 of every preceding byte
//
// Feature file (CSV): header "node_id,<col>,..." then one row per node, with
// node_id equal to the row index.

namespace scgp::io {

inline constexpr std::uint16_t kGraphFormatVersion = 1;
inline constexpr std::uint16_t kEmbeddingFormatVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderSize = 36;
inline constexpr std::size_t kDigestSize = 32;

nlohmann::ordered_json graph_to_json(const LabeledGraph& g);
std::string encode_graph(const LabeledGraph& g);

/// Parses and validates a graph file of the given kind. Throws CorruptData
/// when the content violates the graph invariants.
SchreierGraph decode_schreier(std::string_view text);
CayleyGraph decode_cayley(std::string_view text);
/// Kind of a graph file without full validation.
GraphKind peek_graph_kind(std::string_view text);

/// Header and float32 payload, without the trailing digest.
std::vector<std::uint8_t> encode_embedding_body(const EmbeddingMatrix& z);
/// Complete file: body followed by its SHA-256.
std::vector<std::uint8_t> encode_embedding_file(const EmbeddingMatrix& z);
/// Throws CorruptData on bad magic, size mismatch, or digest mismatch.
EmbeddingMatrix decode_embedding_file(std::span<const std::uint8_t> bytes);

/// Shortest text that parses back to exactly `v` (float-width when `v` is a
/// float32 value).
std::string format_value(double v);

/// Reads a feature CSV; dim 0 (header "node_id" only) is allowed.
/// When `header` is given it receives the column names after node_id.
DenseMatrix read_feature_csv(std::istream& in, std::vector<std::string>* header = nullptr);
DenseMatrix read_feature_csv(const std::filesystem::path& path, std::vector<std::string>* header = nullptr);

/// Writes node_id plus one column per entry of `column_names`.
void write_feature_csv(std::ostream& out, const DenseMatrix& m, std::span<const std::string> column_names);
std::vector<std::string> column_names(std::string_view prefix, std::size_t count);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace scgp::io
