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

#include "scgp/cache_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>

#include <json.hpp>

#include "scgp/error.hpp"
#include "scgp/formats.hpp"

namespace scgp {

namespace fs = std::filesystem;

namespace {

constexpr const char* kGraphFile = "graph.json";
constexpr const char* kMetaSuffix = ".meta.json";

class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open cache lock " + path.string() + ": " + std::strerror(errno));
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error("cannot lock " + path.string() + ": " + std::strerror(errno));
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path meta_path(const fs::path& data) { return data.string() + kMetaSuffix; }

nlohmann::json make_record(const CacheKey& key, const fs::path& graph_file,
                           const std::optional<fs::path>& embedding_file, const std::string& content_hash) {
  nlohmann::json j;
  j["key"] = {{"n", key.n}, {"config_hash", key.config_hash}, {"format", kCacheFormatTag}};
  j["graph_file"] = graph_file.filename().string();
  j["embedding_file"] = embedding_file ? nlohmann::json(embedding_file->filename().string()) : nlohmann::json(nullptr);
  j["created_at"] = utc_now();
  j["content_hash"] = content_hash;
  return j;
}

std::optional<nlohmann::json> read_record(const fs::path& data) {
  std::error_code ec;
  if (!fs::exists(meta_path(data), ec)) return std::nullopt;
  try {
    return nlohmann::json::parse(io::read_text_file(meta_path(data)));
  } catch (const std::exception&) {
    return nlohmann::json(nullptr);
  }
}

void remove_entry(const fs::path& data) {
  std::error_code ec;
  fs::remove(meta_path(data), ec);
  fs::remove(data, ec);
}

}  // namespace

std::string cache_config_hash(const PropagationConfig& config) {
  const Digest d = Sha256().update(kCacheFormatTag).update(config_digest(config)).finish();
  return to_hex(std::span(d).first(16));
}

// InMemoryCache

Fetched<SchreierGraph> InMemoryCache::fetch_graph(Modulus n) {
  std::lock_guard lock(mu_);
  if (auto it = graphs_.find(n.value()); it != graphs_.end()) {
    ++stats_.graph_hits;
    return {it->second, true};
  }
  ++stats_.graph_builds;
  return {graphs_.emplace(n.value(), enumerate_cosets(n)).first->second, false};
}

Fetched<EmbeddingMatrix> InMemoryCache::fetch_embeddings(Modulus n, const PropagationConfig& config) {
  config.validate();
  const CacheKey key{n.value(), cache_config_hash(config)};
  {
    std::lock_guard lock(mu_);
    if (auto it = embeddings_.find(key); it != embeddings_.end()) {
      ++stats_.embedding_hits;
      return {it->second, true};
    }
  }
  const SchreierGraph graph = fetch_graph(n).value;
  EmbeddingMatrix z = to_storage_precision(gcn_propagate(graph, config));
  std::lock_guard lock(mu_);
  ++stats_.embedding_builds;
  return {embeddings_.try_emplace(key, std::move(z)).first->second, false};
}

CacheStats InMemoryCache::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

// CacheStore

CacheStore::CacheStore(fs::path root, bool read_only) : root_(std::move(root)), read_only_(read_only) {}

std::optional<fs::path> CacheStore::resolve_root(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return fs::path(*flag);
  if (const char* env = std::getenv("SCGP_CACHE"); env != nullptr && *env != '\0') return fs::path(env);
  return std::nullopt;
}

fs::path CacheStore::entry_dir(Modulus n) const { return root_ / "scgp" / "v1" / std::to_string(n.value()); }

fs::path CacheStore::graph_path(Modulus n) const { return entry_dir(n) / kGraphFile; }

fs::path CacheStore::embedding_path(Modulus n, const PropagationConfig& config) const {
  return entry_dir(n) / (cache_config_hash(config) + ".emb");
}

void CacheStore::warn(const std::string& msg) {
  ++repairs_;
  {
    std::lock_guard lock(mu_);
    warnings_.push_back(msg);
  }
  if (warn_) warn_(msg);
}

std::vector<std::string> CacheStore::warnings() const {
  std::lock_guard lock(mu_);
  return warnings_;
}

CacheStats CacheStore::stats() const {
  return {graph_builds_.load(), embedding_builds_.load(), graph_hits_.load(), embedding_hits_.load(),
          repairs_.load()};
}

std::optional<Fetched<SchreierGraph>> CacheStore::load_graph(Modulus n, bool repair) {
  const fs::path data = graph_path(n);
  std::error_code ec;
  const auto record = read_record(data);
  if (!record || !fs::exists(data, ec)) {
    if (repair && (record || fs::exists(data, ec))) {
      warn("cache entry " + data.string() + " is incomplete; rebuilding");
      remove_entry(data);
    }
    return std::nullopt;
  }
  try {
    const std::string text = io::read_text_file(data);
    const std::string actual = to_hex(sha256(text));
    if (record->is_null() || record->value("content_hash", "") != actual) {
      throw CorruptData("content hash mismatch");
    }
    SchreierGraph g = io::decode_schreier(text);
    if (g.modulus != n) throw CorruptData("entry is for a different modulus");
    return Fetched<SchreierGraph>{std::move(g), true};
  } catch (const Error& e) {
    if (repair) {
      warn("corrupt cache entry " + data.string() + " (" + e.what() + "); rebuilding");
      remove_entry(data);
    }
    return std::nullopt;
  }
}

Fetched<SchreierGraph> CacheStore::fetch_graph(Modulus n) {
  if (auto hit = load_graph(n, false)) {
    ++graph_hits_;
    return std::move(*hit);
  }
  if (read_only_) {
    ++graph_builds_;
    return {enumerate_cosets(n), false};
  }
  std::error_code ec;
  fs::create_directories(entry_dir(n), ec);
  if (ec) throw Error("cache directory " + entry_dir(n).string() + " is not writable: " + ec.message());

  FileLock lock(entry_dir(n) / "graph.lock");
  if (auto hit = load_graph(n, true)) {
    ++graph_hits_;
    return std::move(*hit);
  }
  SchreierGraph g = enumerate_cosets(n);
  const std::string text = io::encode_graph(g);
  const fs::path data = graph_path(n);
  io::write_file_atomic(data, text);
  io::write_file_atomic(meta_path(data),
                        make_record({n.value(), ""}, data, std::nullopt, to_hex(sha256(text))).dump(2) + "\n");
  ++graph_builds_;
  return {std::move(g), false};
}

std::optional<EmbeddingMatrix> CacheStore::load_embeddings(Modulus n, const PropagationConfig& config,
                                                           bool repair) {
  const fs::path data = embedding_path(n, config);
  std::error_code ec;
  const auto record = read_record(data);
  if (!record || !fs::exists(data, ec)) {
    if (repair && (record || fs::exists(data, ec))) {
      warn("cache entry " + data.string() + " is incomplete; rebuilding");
      remove_entry(data);
    }
    return std::nullopt;
  }
  try {
    EmbeddingMatrix z = io::decode_embedding_file(io::read_file(data));
    if (record->is_null() || record->value("content_hash", "") != to_hex(z.meta.content_hash)) {
      throw CorruptData("content hash mismatch");
    }
    if (z.meta.n != n.value() || !(z.meta.config == config) || z.values.rows != coset_count(n)) {
      throw CorruptData("entry does not match its key");
    }
    return z;
  } catch (const Error& e) {
    if (repair) {
      warn("corrupt cache entry " + data.string() + " (" + e.what() + "); rebuilding");
      remove_entry(data);
    }
    return std::nullopt;
  }
}

Fetched<EmbeddingMatrix> CacheStore::fetch_embeddings(Modulus n, const PropagationConfig& config) {
  config.validate();
  if (auto hit = load_embeddings(n, config, false)) {
    ++embedding_hits_;
    return {std::move(*hit), true};
  }
  if (read_only_) {
    ++embedding_builds_;
    return {to_storage_precision(gcn_propagate(fetch_graph(n).value, config)), false};
  }
  std::error_code ec;
  fs::create_directories(entry_dir(n), ec);
  if (ec) throw Error("cache directory " + entry_dir(n).string() + " is not writable: " + ec.message());

  const fs::path data = embedding_path(n, config);
  FileLock lock(data.string() + ".lock");
  if (auto hit = load_embeddings(n, config, true)) {
    ++embedding_hits_;
    return {std::move(*hit), true};
  }
  const SchreierGraph graph = fetch_graph(n).value;
  EmbeddingMatrix z = to_storage_precision(gcn_propagate(graph, config));
  const auto bytes = io::encode_embedding_file(z);
  io::write_file_atomic(data, bytes);
  io::write_file_atomic(meta_path(data), make_record({n.value(), cache_config_hash(config)}, graph_path(n), data,
                                                     to_hex(z.meta.content_hash))
                                             .dump(2) +
                                             "\n");
  ++embedding_builds_;
  return {std::move(z), false};
}

CacheManifest CacheStore::manifest() const {
  CacheManifest m;
  const fs::path base = root_ / "scgp" / "v1";
  std::error_code ec;
  if (!fs::is_directory(base, ec)) return m;
  for (const auto& dir : fs::directory_iterator(base, ec)) {
    if (!dir.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(dir.path(), ec)) {
      const std::string name = file.path().filename().string();
      if (name.size() <= std::strlen(kMetaSuffix) || !name.ends_with(kMetaSuffix)) continue;
      try {
        const auto j = nlohmann::json::parse(io::read_text_file(file.path()));
        ManifestEntry e;
        e.key.n = j.at("key").at("n").get<std::uint32_t>();
        e.key.config_hash = j.at("key").at("config_hash").get<std::string>();
        e.graph_file = dir.path() / j.at("graph_file").get<std::string>();
        if (!j.at("embedding_file").is_null()) e.embedding_file = dir.path() / j.at("embedding_file").get<std::string>();
        e.created_at = j.at("created_at").get<std::string>();
        e.content_hash = j.at("content_hash").get<std::string>();
        m.entries.push_back(std::move(e));
      } catch (const std::exception&) {
        continue;
      }
    }
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.key < b.key; });
  return m;
}

}  // namespace scgp
