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

#include "scgp/formats.hpp"

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "scgp/error.hpp"

namespace scgp::io {

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void put_f32(float f) { put(std::bit_cast<std::uint32_t>(f)); }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > in_.size()) throw CorruptData("embedding file truncated");
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<decltype(u)>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::string_view kind_name(GraphKind k) { return k == GraphKind::schreier ? "schreier" : "cayley"; }

struct RawGraph {
  Modulus n{2};
  GraphKind kind = GraphKind::schreier;
  std::vector<Mat2> vertices;
  std::vector<Edge> edges;
};

RawGraph parse_graph(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptData(std::string("graph file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "scgp-graph") throw CorruptData("not an scgp-graph file");
    if (j.at("version").get<int>() != kGraphFormatVersion) {
      throw CorruptData("unsupported graph file version " + j.at("version").dump());
    }
    RawGraph g;
    g.n = Modulus(j.at("n").get<std::uint64_t>());
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "schreier") {
      g.kind = GraphKind::schreier;
    } else if (kind == "cayley") {
      g.kind = GraphKind::cayley;
    } else {
      throw CorruptData("unknown graph kind '" + kind + "'");
    }
    for (const auto& v : j.at("vertices")) {
      if (v.size() != 4) throw CorruptData("vertex must have 4 entries");
      const auto e = v.get<std::vector<std::int64_t>>();
      for (std::int64_t x : e) {
        if (x < 0 || x >= g.n.value()) throw CorruptData("vertex entry out of range [0, n)");
      }
      g.vertices.push_back(Mat2::make(e[0], e[1], e[2], e[3], g.n));
    }
    for (const auto& e : j.at("edges")) {
      if (e.size() != 3) throw CorruptData("edge must have 3 entries");
      const auto src = e[0].get<std::uint64_t>();
      const auto label = e[1].get<std::uint64_t>();
      const auto dst = e[2].get<std::uint64_t>();
      if (src >= g.vertices.size() || dst >= g.vertices.size() || label >= kGeneratorCount) {
        throw CorruptData("edge index out of range");
      }
      g.edges.push_back({static_cast<std::uint32_t>(src), static_cast<std::uint8_t>(label),
                         static_cast<std::uint32_t>(dst)});
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptData(std::string("malformed graph file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptData(std::string("malformed graph file: ") + e.what());
  }
}

// Each vertex has exactly one out-edge per label, and (u, l, v) pairs with
// (v, l^1, u).
void check_labeled_regular(const RawGraph& g) {
  if (g.edges.size() != kGeneratorCount * g.vertices.size()) {
    throw CorruptData("graph must have exactly 4 edges per vertex");
  }
  std::vector<std::uint32_t> target(g.edges.size(), std::numeric_limits<std::uint32_t>::max());
  for (const Edge& e : g.edges) {
    auto& slot = target[std::size_t{e.src} * kGeneratorCount + e.label];
    if (slot != std::numeric_limits<std::uint32_t>::max()) throw CorruptData("duplicate (vertex, label) edge");
    slot = e.dst;
  }
  for (const Edge& e : g.edges) {
    if (target[std::size_t{e.dst} * kGeneratorCount + inverse_label(e.label)] != e.src) {
      throw CorruptData("edge (" + std::to_string(e.src) + ", " + std::to_string(e.label) + ", " +
                        std::to_string(e.dst) + ") has no inverse partner");
    }
  }
}

}  // namespace

nlohmann::ordered_json graph_to_json(const LabeledGraph& g) {
  nlohmann::ordered_json j;
  j["format"] = "scgp-graph";
  j["version"] = kGraphFormatVersion;
  j["n"] = g.modulus.value();
  j["kind"] = kind_name(g.kind);
  auto vertices = nlohmann::ordered_json::array();
  for (const Mat2& m : g.vertices) vertices.push_back({m.a(), m.b(), m.c(), m.d()});
  j["vertices"] = std::move(vertices);
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges) edges.push_back({e.src, e.label, e.dst});
  j["edges"] = std::move(edges);
  return j;
}

std::string encode_graph(const LabeledGraph& g) { return graph_to_json(g).dump() + "\n"; }

GraphKind peek_graph_kind(std::string_view text) { return parse_graph(text).kind; }

SchreierGraph decode_schreier(std::string_view text) {
  RawGraph raw = parse_graph(text);
  if (raw.kind != GraphKind::schreier) throw CorruptData("expected a schreier graph file");
  if (raw.vertices.size() != coset_count(raw.n)) {
    throw CorruptData("schreier graph has " + std::to_string(raw.vertices.size()) + " vertices, expected " +
                      std::to_string(coset_count(raw.n)));
  }
  check_labeled_regular(raw);
  const SubgroupSpec h = SubgroupSpec::diagonal(raw.n);
  if (raw.vertices.front() != canonicalize(Mat2::identity(raw.n), h)) {
    throw CorruptData("vertex 0 is not the identity coset");
  }
  for (const Mat2& v : raw.vertices) {
    if (canonicalize(v, h) != v) throw CorruptData("vertex " + v.to_string() + " is not a canonical representative");
  }
  SchreierGraph g{{raw.n, GraphKind::schreier, std::move(raw.vertices), std::move(raw.edges)}, {}};
  g.reindex();
  if (g.rep_index.size() != g.vertices.size()) throw CorruptData("duplicate coset representative");
  return g;
}

CayleyGraph decode_cayley(std::string_view text) {
  RawGraph raw = parse_graph(text);
  if (raw.kind != GraphKind::cayley) throw CorruptData("expected a cayley graph file");
  if (raw.vertices.size() != group_order(raw.n)) throw CorruptData("cayley graph has the wrong vertex count");
  if (!std::is_sorted(raw.vertices.begin(), raw.vertices.end()) ||
      std::adjacent_find(raw.vertices.begin(), raw.vertices.end()) != raw.vertices.end()) {
    throw CorruptData("cayley vertices must be strictly increasing");
  }
  check_labeled_regular(raw);
  return CayleyGraph{{raw.n, GraphKind::cayley, std::move(raw.vertices), std::move(raw.edges)}};
}

std::vector<std::uint8_t> encode_embedding_body(const EmbeddingMatrix& z) {
  const auto& cfg = z.meta.config;
  std::vector<std::uint8_t> out;
  out.reserve(kEmbeddingHeaderSize + 4 * z.values.values.size() + kDigestSize);
  ByteWriter w(out);
  for (char ch : {'S', 'C', 'G', 'P'}) out.push_back(static_cast<std::uint8_t>(ch));
  w.put<std::uint16_t>(kEmbeddingFormatVersion);
  w.put<std::uint16_t>(0);
  w.put<std::uint32_t>(z.meta.n);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(z.values.rows));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(z.values.cols));
  w.put<std::uint64_t>(cfg.seed);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(cfg.layers));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.activation));
  w.put<std::uint8_t>(0);
  w.put<std::uint32_t>(cfg.hidden_dim);
  for (double v : z.values.values) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw InvalidArgument("embedding value does not fit in float32");
    w.put_f32(f);
  }
  return out;
}

std::vector<std::uint8_t> encode_embedding_file(const EmbeddingMatrix& z) {
  auto out = encode_embedding_body(z);
  const Digest d = sha256(out);
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

EmbeddingMatrix decode_embedding_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEmbeddingHeaderSize + kDigestSize) throw CorruptData("embedding file truncated");
  if (std::memcmp(bytes.data(), "SCGP", 4) != 0) throw CorruptData("embedding file has bad magic");
  const auto body = bytes.first(bytes.size() - kDigestSize);
  Digest stored{};
  std::copy(bytes.end() - kDigestSize, bytes.end(), stored.begin());

  ByteReader r(body.subspan(4));
  if (r.get<std::uint16_t>() != kEmbeddingFormatVersion) throw CorruptData("unsupported embedding file version");
  r.get<std::uint16_t>();
  EmbeddingMatrix z;
  z.meta.n = r.get<std::uint32_t>();
  const std::uint64_t rows = r.get<std::uint32_t>();
  const std::uint64_t cols = r.get<std::uint32_t>();
  z.meta.config.seed = r.get<std::uint64_t>();
  z.meta.config.layers = r.get<std::uint16_t>();
  const auto act = r.get<std::uint8_t>();
  if (act > static_cast<std::uint8_t>(Activation::identity)) throw CorruptData("unknown activation code");
  z.meta.config.activation = static_cast<Activation>(act);
  r.get<std::uint8_t>();
  z.meta.config.hidden_dim = r.get<std::uint32_t>();
  z.meta.config.embed_dim = static_cast<std::uint32_t>(cols);
  if (body.size() != kEmbeddingHeaderSize + 4 * rows * cols) {
    throw CorruptData("embedding payload length does not match declared " + std::to_string(rows) + " x " +
                      std::to_string(cols));
  }
  if (sha256(body) != stored) throw CorruptData("embedding file digest mismatch");
  z.values = DenseMatrix(rows, cols);
  for (double& v : z.values.values) v = r.get_f32();
  z.meta.content_hash = stored;
  return z;
}

std::string format_value(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("cannot format non-finite value");
  char buf[64];
  std::to_chars_result res;
  const auto f = static_cast<float>(v);
  if (static_cast<double>(f) == v) {
    res = std::to_chars(buf, buf + sizeof buf, f);
  } else {
    res = std::to_chars(buf, buf + sizeof buf, v);
  }
  return {buf, res.ptr};
}

std::vector<std::string> column_names(std::string_view prefix, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(std::string(prefix) + std::to_string(i));
  return out;
}

void write_feature_csv(std::ostream& out, const DenseMatrix& m, std::span<const std::string> names) {
  if (names.size() != m.cols) throw InvalidArgument("column name count does not match matrix width");
  out << "node_id";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < m.rows; ++i) {
    out << i;
    for (double v : m.row(i)) out << ',' << format_value(v);
    out << '\n';
  }
}

DenseMatrix read_feature_csv(std::istream& in, std::vector<std::string>* header_out) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("feature file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      out.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  };
  const auto header = split(line);
  if (header.front() != "node_id") throw InvalidArgument("feature file header must start with node_id");
  const std::size_t dim = header.size() - 1;
  if (header_out) header_out->assign(header.begin() + 1, header.end());

  DenseMatrix m(0, dim);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    const std::string where = "feature file row " + std::to_string(row + 1);
    if (fields.size() != header.size()) throw InvalidArgument(where + ": expected " + std::to_string(header.size()) + " fields");
    std::size_t id = 0;
    if (auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), id);
        ec != std::errc() || p != fields[0].data() + fields[0].size() || id != row) {
      throw InvalidArgument(where + ": node_id must equal the row index " + std::to_string(row));
    }
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      const auto& f = fields[j];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v)) {
        throw InvalidArgument(where + ": bad value '" + f + "'");
      }
      m.values.push_back(v);
    }
    ++row;
  }
  if (row == 0) throw InvalidArgument("feature file has no rows");
  m.rows = row;
  return m;
}

DenseMatrix read_feature_csv(const std::filesystem::path& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature file " + path.string());
  return read_feature_csv(in, header);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  thread_local std::mt19937_64 salt{std::random_device{}()};
  const auto tmp = path.parent_path() /
                   ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(salt()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace scgp::io
