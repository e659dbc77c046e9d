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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scgp/coset_enum.hpp"
#include "scgp/embedder.hpp"
#include "scgp/hash.hpp"

namespace scgp {

inline constexpr std::string_view kCacheFormatTag = "scgp/v1";

/// Identifies a cached artifact. config_hash is empty for graph entries.
struct CacheKey {
  std::uint32_t n = 0;
  std::string config_hash;

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

/// 32 hex characters over the config digest and the cache format tag.
std::string cache_config_hash(const PropagationConfig& config);

struct ManifestEntry {
  CacheKey key;
  std::filesystem::path graph_file;
  std::optional<std::filesystem::path> embedding_file;
  std::string created_at;
  std::string content_hash;
};

struct CacheManifest {
  std::vector<ManifestEntry> entries;
};

struct CacheStats {
  std::size_t graph_builds = 0;
  std::size_t embedding_builds = 0;
  std::size_t graph_hits = 0;
  std::size_t embedding_hits = 0;
  std::size_t repairs = 0;
};

template <typename T>
struct Fetched {
  T value;
  bool cache_hit = false;
};

/// Source of graphs and embeddings for the augmentation pipeline.
class ArtifactCache {
 public:
  virtual ~ArtifactCache() = default;
  virtual Fetched<SchreierGraph> fetch_graph(Modulus n) = 0;
  /// Embeddings are returned at storage (float32) precision.
  virtual Fetched<EmbeddingMatrix> fetch_embeddings(Modulus n, const PropagationConfig& config) = 0;
  [[nodiscard]] virtual CacheStats stats() const = 0;

  SchreierGraph get_or_build_graph(Modulus n) { return fetch_graph(n).value; }
  EmbeddingMatrix get_or_build_embeddings(Modulus n, const PropagationConfig& config) {
    return fetch_embeddings(n, config).value;
  }
};

/// Process-local memo; nothing touches the disk.
class InMemoryCache final : public ArtifactCache {
 public:
  Fetched<SchreierGraph> fetch_graph(Modulus n) override;
  Fetched<EmbeddingMatrix> fetch_embeddings(Modulus n, const PropagationConfig& config) override;
  [[nodiscard]] CacheStats stats() const override;

 private:
  mutable std::mutex mu_;
  std::map<std::uint32_t, SchreierGraph> graphs_;
  std::map<CacheKey, EmbeddingMatrix> embeddings_;
  CacheStats stats_;
};

/// Persistent cache rooted at `<root>/scgp/v1/`.
///
/// Layout per modulus: `<n>/graph.json` and `<n>/<config_hash>.emb`, each
/// with a `.meta.json` record holding the content hash. Entries are written
/// to a temporary name and renamed into place, so readers never see partial
/// files. Builds of one entry are serialized across processes with flock on
/// a per-entry lock file; a caller that waited re-reads instead of
/// rebuilding. Entries whose bytes do not match their recorded hash are
/// reported through the warning sink and rebuilt.
class CacheStore final : public ArtifactCache {
 public:
  using WarningSink = std::function<void(const std::string&)>;

  explicit CacheStore(std::filesystem::path root, bool read_only = false);

  /// The flag wins over the SCGP_CACHE environment variable.
  static std::optional<std::filesystem::path> resolve_root(const std::optional<std::string>& flag);

  Fetched<SchreierGraph> fetch_graph(Modulus n) override;
  Fetched<EmbeddingMatrix> fetch_embeddings(Modulus n, const PropagationConfig& config) override;
  [[nodiscard]] CacheStats stats() const override;

  /// Scans the cache directory; entries without a readable record are skipped.
  [[nodiscard]] CacheManifest manifest() const;

  [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
  [[nodiscard]] std::filesystem::path entry_dir(Modulus n) const;
  [[nodiscard]] std::filesystem::path graph_path(Modulus n) const;
  [[nodiscard]] std::filesystem::path embedding_path(Modulus n, const PropagationConfig& config) const;

  void set_warning_sink(WarningSink sink) { warn_ = std::move(sink); }
  [[nodiscard]] std::vector<std::string> warnings() const;

 private:
  std::optional<Fetched<SchreierGraph>> load_graph(Modulus n, bool repair);
  std::optional<EmbeddingMatrix> load_embeddings(Modulus n, const PropagationConfig& config, bool repair);
  void warn(const std::string& msg);

  std::filesystem::path root_;
  bool read_only_;
  WarningSink warn_;
  mutable std::mutex mu_;
  std::vector<std::string> warnings_;
  std::atomic<std::size_t> graph_builds_{0}, embedding_builds_{0}, graph_hits_{0}, embedding_hits_{0},
      repairs_{0};
};

}  // namespace scgp
