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

#include <gtest/gtest.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "scgp/error.hpp"
#include "scgp/formats.hpp"

namespace scgp {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("scgp-cache-test-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::permissions(path_, fs::perms::owner_all, fs::perm_options::add, ec);
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void truncate_file(const fs::path& p, std::size_t keep) {
  auto bytes = io::read_file(p);
  bytes.resize(std::min(keep, bytes.size()));
  std::ofstream(p, std::ios::binary | std::ios::trunc).write(reinterpret_cast<const char*>(bytes.data()),
                                                            static_cast<std::streamsize>(bytes.size()));
}

void flip_byte(const fs::path& p, std::size_t offset) {
  auto bytes = io::read_file(p);
  bytes.at(offset) ^= 0x40;
  std::ofstream(p, std::ios::binary | std::ios::trunc).write(reinterpret_cast<const char*>(bytes.data()),
                                                            static_cast<std::streamsize>(bytes.size()));
}

PropagationConfig small_config(std::uint64_t seed = 0) {
  PropagationConfig c;
  c.hidden_dim = 16;
  c.embed_dim = 8;
  c.seed = seed;
  return c;
}

TEST(CacheConfigHash, StableAndKeyed) {
  EXPECT_EQ(cache_config_hash(PropagationConfig{}), "9336968821f324172a8f91384527b055");
  PropagationConfig c;
  c.seed = 7;
  c.embed_dim = 8;
  EXPECT_EQ(cache_config_hash(c), "002b9741fee81bf6e4357137e129457a");
  EXPECT_NE(cache_config_hash(small_config(1)), cache_config_hash(small_config(2)));
  EXPECT_EQ(cache_config_hash(small_config(1)), cache_config_hash(small_config(1)));
}

TEST(InMemoryCache, CountsBuildsAndHits) {
  InMemoryCache cache;
  EXPECT_FALSE(cache.fetch_graph(Modulus(5)).cache_hit);
  EXPECT_TRUE(cache.fetch_graph(Modulus(5)).cache_hit);
  EXPECT_FALSE(cache.fetch_embeddings(Modulus(5), small_config()).cache_hit);
  EXPECT_TRUE(cache.fetch_embeddings(Modulus(5), small_config()).cache_hit);
  const CacheStats s = cache.stats();
  EXPECT_EQ(s.graph_builds, 1u);
  EXPECT_EQ(s.embedding_builds, 1u);
  EXPECT_EQ(s.embedding_hits, 1u);
}

TEST(CacheStore, LayoutAndMissThenHit) {
  TempDir dir;
  CacheStore store(dir.path());
  EXPECT_EQ(store.graph_path(Modulus(5)), dir.path() / "scgp" / "v1" / "5" / "graph.json");
  EXPECT_EQ(store.embedding_path(Modulus(5), small_config()),
            dir.path() / "scgp" / "v1" / "5" / (cache_config_hash(small_config()) + ".emb"));

  const auto first = store.fetch_graph(Modulus(5));
  EXPECT_FALSE(first.cache_hit);
  EXPECT_TRUE(fs::exists(store.graph_path(Modulus(5))));
  const auto second = store.fetch_graph(Modulus(5));
  EXPECT_TRUE(second.cache_hit);
  EXPECT_EQ(io::encode_graph(first.value), io::encode_graph(second.value));
  EXPECT_EQ(second.value.vertices, enumerate_cosets(Modulus(5)).vertices);
  EXPECT_EQ(store.stats().graph_builds, 1u);
  EXPECT_EQ(store.stats().graph_hits, 1u);
}

TEST(CacheStore, SecondProcessViewRebuildsNothing) {
  TempDir dir;
  Digest original{};
  {
    CacheStore store(dir.path());
    original = store.fetch_embeddings(Modulus(6), small_config()).value.meta.content_hash;
  }
  CacheStore again(dir.path());
  const auto hit = again.fetch_embeddings(Modulus(6), small_config());
  EXPECT_TRUE(hit.cache_hit);
  EXPECT_EQ(hit.value.meta.content_hash, original);
  EXPECT_EQ(again.stats().graph_builds, 0u);
  EXPECT_EQ(again.stats().embedding_builds, 0u);
}

TEST(CacheStore, HitReturnsStoredBytes) {
  TempDir dir;
  CacheStore store(dir.path());
  const auto built = store.fetch_embeddings(Modulus(5), small_config());
  const auto on_disk = io::read_file(store.embedding_path(Modulus(5), small_config()));
  EXPECT_EQ(io::encode_embedding_file(built.value), on_disk);
  const auto hit = store.fetch_embeddings(Modulus(5), small_config());
  EXPECT_EQ(io::encode_embedding_file(hit.value), on_disk);
  EXPECT_EQ(hit.value.values, built.value.values);
}

TEST(CacheStore, DistinctSeedsGiveDistinctEntries) {
  TempDir dir;
  CacheStore store(dir.path());
  store.fetch_embeddings(Modulus(5), small_config(1));
  store.fetch_embeddings(Modulus(5), small_config(2));
  EXPECT_EQ(store.stats().embedding_builds, 2u);
  EXPECT_EQ(store.stats().graph_builds, 1u);
  const CacheManifest m = store.manifest();
  ASSERT_EQ(m.entries.size(), 3u);
  std::set<std::string> keys;
  for (const auto& e : m.entries) {
    EXPECT_EQ(e.key.n, 5u);
    EXPECT_TRUE(fs::exists(e.graph_file));
    EXPECT_EQ(e.content_hash.size(), 64u);
    EXPECT_FALSE(e.created_at.empty());
    if (e.embedding_file) {
      EXPECT_TRUE(fs::exists(*e.embedding_file));
      EXPECT_EQ(to_hex(io::decode_embedding_file(io::read_file(*e.embedding_file)).meta.content_hash), e.content_hash);
    } else {
      EXPECT_EQ(to_hex(sha256(io::read_text_file(e.graph_file))), e.content_hash);
    }
    keys.insert(e.key.config_hash);
  }
  EXPECT_EQ(keys.size(), 3u);
}

TEST(CacheStore, TruncatedGraphIsRebuilt) {
  TempDir dir;
  CacheStore store(dir.path());
  const auto original = store.fetch_graph(Modulus(7));
  truncate_file(store.graph_path(Modulus(7)), 100);

  std::vector<std::string> seen;
  CacheStore reader(dir.path());
  reader.set_warning_sink([&seen](const std::string& m) { seen.push_back(m); });
  const auto repaired = reader.fetch_graph(Modulus(7));
  EXPECT_FALSE(repaired.cache_hit);
  EXPECT_EQ(repaired.value.edges, original.value.edges);
  EXPECT_EQ(reader.stats().graph_builds, 1u);
  EXPECT_EQ(reader.stats().repairs, 1u);
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_NE(seen[0].find("corrupt"), std::string::npos);
  EXPECT_TRUE(reader.fetch_graph(Modulus(7)).cache_hit);
}

TEST(CacheStore, TamperedGraphWithValidJsonIsRebuilt) {
  TempDir dir;
  CacheStore store(dir.path());
  store.fetch_graph(Modulus(4));
  // Swap two edge labels: still parseable, but the recorded hash no longer matches.
  std::string text = io::read_text_file(store.graph_path(Modulus(4)));
  const auto pos = text.find("[0,0,");
  ASSERT_NE(pos, std::string::npos);
  text[pos + 3] = '2';
  std::ofstream(store.graph_path(Modulus(4)), std::ios::trunc) << text;
  CacheStore reader(dir.path());
  EXPECT_FALSE(reader.fetch_graph(Modulus(4)).cache_hit);
  EXPECT_EQ(reader.stats().repairs, 1u);
}

TEST(CacheStore, CorruptEmbeddingIsRebuilt) {
  TempDir dir;
  CacheStore store(dir.path());
  const auto original = store.fetch_embeddings(Modulus(5), small_config());
  const fs::path emb = store.embedding_path(Modulus(5), small_config());
  flip_byte(emb, io::kEmbeddingHeaderSize + 5);

  CacheStore reader(dir.path());
  const auto repaired = reader.fetch_embeddings(Modulus(5), small_config());
  EXPECT_FALSE(repaired.cache_hit);
  EXPECT_EQ(repaired.value.meta.content_hash, original.value.meta.content_hash);
  EXPECT_EQ(reader.stats().embedding_builds, 1u);
  EXPECT_EQ(reader.stats().graph_builds, 0u);
  EXPECT_EQ(reader.stats().repairs, 1u);

  truncate_file(emb, 10);
  CacheStore third(dir.path());
  EXPECT_FALSE(third.fetch_embeddings(Modulus(5), small_config()).cache_hit);
  EXPECT_EQ(third.warnings().size(), 1u);
}

TEST(CacheStore, MissingRecordIsRebuilt) {
  TempDir dir;
  CacheStore store(dir.path());
  store.fetch_graph(Modulus(3));
  fs::remove(store.graph_path(Modulus(3)).string() + ".meta.json");
  CacheStore reader(dir.path());
  EXPECT_FALSE(reader.fetch_graph(Modulus(3)).cache_hit);
  EXPECT_EQ(reader.stats().repairs, 1u);
  EXPECT_TRUE(CacheStore(dir.path()).fetch_graph(Modulus(3)).cache_hit);
}

TEST(CacheStore, GarbageRecordIsRebuilt) {
  TempDir dir;
  CacheStore store(dir.path());
  store.fetch_graph(Modulus(3));
  std::ofstream(store.graph_path(Modulus(3)).string() + ".meta.json", std::ios::trunc) << "{not json";
  CacheStore reader(dir.path());
  EXPECT_FALSE(reader.fetch_graph(Modulus(3)).cache_hit);
  EXPECT_EQ(reader.stats().repairs, 1u);
}

TEST(CacheStore, ReadOnlyWritesNothing) {
  TempDir dir;
  CacheStore store(dir.path(), true);
  EXPECT_FALSE(store.fetch_embeddings(Modulus(5), small_config()).cache_hit);
  EXPECT_FALSE(fs::exists(dir.path() / "scgp"));
  EXPECT_EQ(store.stats().embedding_builds, 1u);

  CacheStore writer(dir.path());
  writer.fetch_embeddings(Modulus(5), small_config());
  EXPECT_TRUE(store.fetch_embeddings(Modulus(5), small_config()).cache_hit);
}

TEST(CacheStore, UnwritableDirectoryFails) {
  TempDir dir;
  const fs::path blocker = dir.path() / "file";
  std::ofstream(blocker) << "x";
  CacheStore store(blocker / "cache");
  EXPECT_THROW(store.fetch_graph(Modulus(5)), Error);
}

TEST(CacheStore, ResolveRootPrecedence) {
  ::unsetenv("SCGP_CACHE");
  EXPECT_EQ(CacheStore::resolve_root(std::nullopt), std::nullopt);
  ::setenv("SCGP_CACHE", "/env/cache", 1);
  EXPECT_EQ(CacheStore::resolve_root(std::nullopt), fs::path("/env/cache"));
  EXPECT_EQ(CacheStore::resolve_root(std::string("/flag/cache")), fs::path("/flag/cache"));
  ::unsetenv("SCGP_CACHE");
}

TEST(CacheStore, ConcurrentThreadsBuildOnce) {
  TempDir dir;
  CacheStore store(dir.path());
  std::vector<Digest> hashes(8);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < hashes.size(); ++t) {
    threads.emplace_back([&, t] { hashes[t] = store.fetch_embeddings(Modulus(11), small_config()).value.meta.content_hash; });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(store.stats().embedding_builds, 1u);
  EXPECT_EQ(store.stats().graph_builds, 1u);
  for (const Digest& h : hashes) EXPECT_EQ(h, hashes[0]);
}

TEST(CacheStore, ConcurrentProcessesBuildOnce) {
  TempDir dir;
  constexpr int kProcs = 6;
  struct Report {
    std::size_t graph_builds;
    std::size_t embedding_builds;
    Digest hash;
  };
  std::vector<int> fds;
  std::vector<pid_t> pids;
  for (int i = 0; i < kProcs; ++i) {
    int fd[2];
    ASSERT_EQ(::pipe(fd), 0);
    const pid_t pid = ::fork();
    ASSERT_GE(pid, 0);
    if (pid == 0) {
      ::close(fd[0]);
      Report r{};
      try {
        CacheStore store(dir.path());
        r.hash = store.fetch_embeddings(Modulus(13), small_config(3)).value.meta.content_hash;
        r.graph_builds = store.stats().graph_builds;
        r.embedding_builds = store.stats().embedding_builds;
      } catch (...) {
        ::_exit(3);
      }
      const bool ok = ::write(fd[1], &r, sizeof r) == static_cast<ssize_t>(sizeof r);
      ::_exit(ok ? 0 : 4);
    }
    ::close(fd[1]);
    fds.push_back(fd[0]);
    pids.push_back(pid);
  }
  std::size_t graph_builds = 0, embedding_builds = 0;
  std::set<Digest> hashes;
  for (int i = 0; i < kProcs; ++i) {
    Report r{};
    ASSERT_EQ(::read(fds[i], &r, sizeof r), static_cast<ssize_t>(sizeof r));
    ::close(fds[i]);
    int status = 0;
    ::waitpid(pids[i], &status, 0);
    EXPECT_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0);
    graph_builds += r.graph_builds;
    embedding_builds += r.embedding_builds;
    hashes.insert(r.hash);
  }
  EXPECT_EQ(graph_builds, 1u);
  EXPECT_EQ(embedding_builds, 1u);
  EXPECT_EQ(hashes.size(), 1u);
}

TEST(CacheStore, NoTemporaryFilesLeftBehind) {
  TempDir dir;
  CacheStore store(dir.path());
  store.fetch_embeddings(Modulus(5), small_config());
  for (const auto& f : fs::recursive_directory_iterator(dir.path())) {
    EXPECT_EQ(f.path().filename().string().find(".tmp"), std::string::npos) << f.path();
  }
}

}  // namespace
}  // namespace scgp
