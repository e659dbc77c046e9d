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

#include "scgp/graph_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include "scgp/error.hpp"
#include "scgp/kernels.hpp"

namespace scgp {

namespace {

void check_range(GraphView g) {
  for (const Edge& e : g.edges) {
    if (e.src >= g.vertex_count || e.dst >= g.vertex_count) {
      throw InvalidArgument("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                            ") out of range for " + std::to_string(g.vertex_count) + " vertices");
    }
  }
}

// Undirected simple neighbor lists (duplicates and self-loops dropped).
std::vector<std::vector<std::uint32_t>> neighbor_lists(GraphView g) {
  check_range(g);
  std::vector<std::vector<std::uint32_t>> adj(g.vertex_count);
  for (const Edge& e : g.edges) {
    if (e.src == e.dst) continue;
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

void require_spectral_input(const WeightedAdjacency& adj) {
  if (adj.vertex_count < 2) throw InvalidArgument("spectral gap needs at least two vertices");
  for (std::size_t v = 0; v < adj.vertex_count; ++v) {
    if (adj.degree[v] <= 0.0) {
      throw InvalidArgument("vertex " + std::to_string(v) + " is isolated (degree 0)");
    }
  }
}

}  // namespace

WeightedAdjacency multiplicity_adjacency(GraphView g) {
  check_range(g);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(g.edges.size());
  for (const Edge& e : g.edges) pairs.emplace_back(e.src, e.dst);
  std::sort(pairs.begin(), pairs.end());

  WeightedAdjacency adj;
  adj.vertex_count = g.vertex_count;
  adj.row_ptr.assign(g.vertex_count + 1, 0);
  adj.degree.assign(g.vertex_count, 0.0);
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    adj.col.push_back(pairs[i].second);
    adj.weight.push_back(static_cast<double>(j - i));
    adj.row_ptr[pairs[i].first + 1] += 1;
    adj.degree[pairs[i].first] += static_cast<double>(j - i);
    i = j;
  }
  std::partial_sum(adj.row_ptr.begin(), adj.row_ptr.end(), adj.row_ptr.begin());

  auto weight_at = [&adj](std::uint32_t u, std::uint32_t v) {
    const auto first = adj.col.begin() + static_cast<std::ptrdiff_t>(adj.row_ptr[u]);
    const auto last = adj.col.begin() + static_cast<std::ptrdiff_t>(adj.row_ptr[u + 1]);
    const auto it = std::lower_bound(first, last, v);
    return (it != last && *it == v) ? adj.weight[static_cast<std::size_t>(it - adj.col.begin())] : 0.0;
  };
  for (std::uint32_t u = 0; u < g.vertex_count; ++u) {
    for (std::size_t k = adj.row_ptr[u]; k < adj.row_ptr[u + 1]; ++k) {
      if (weight_at(adj.col[k], u) != adj.weight[k]) {
        throw InvalidArgument("edge multiset is not symmetric at (" + std::to_string(u) + ", " +
                              std::to_string(adj.col[k]) + ")");
      }
    }
  }
  return adj;
}

Connectivity connectivity(GraphView g) {
  const auto adj = neighbor_lists(g);
  std::vector<char> seen(g.vertex_count, 0);
  std::vector<std::uint32_t> stack;
  std::size_t components = 0;
  for (std::uint32_t s = 0; s < g.vertex_count; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      for (std::uint32_t w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return {components == 1, components};
}

Eigen::MatrixXd normalized_laplacian(GraphView g) {
  const WeightedAdjacency adj = multiplicity_adjacency(g);
  const auto n = static_cast<Eigen::Index>(adj.vertex_count);
  std::vector<double> inv_sqrt(adj.vertex_count);
  for (std::size_t v = 0; v < adj.vertex_count; ++v) {
    if (adj.degree[v] <= 0.0) {
      throw InvalidArgument("vertex " + std::to_string(v) + " is isolated (degree 0)");
    }
    inv_sqrt[v] = 1.0 / std::sqrt(adj.degree[v]);
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t u = 0; u < adj.vertex_count; ++u) {
    lap(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u)) = 1.0;
    for (std::size_t k = adj.row_ptr[u]; k < adj.row_ptr[u + 1]; ++k) {
      const std::uint32_t v = adj.col[k];
      lap(static_cast<Eigen::Index>(u), v) -= adj.weight[k] * inv_sqrt[u] * inv_sqrt[v];
    }
  }
  return lap;
}

std::vector<double> laplacian_spectrum(GraphView g) {
  const Eigen::MatrixXd lap = normalized_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NonConvergence("dense eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

SpectralResult spectral_gap_dense(GraphView g) {
  if (g.vertex_count < 2) throw InvalidArgument("spectral gap needs at least two vertices");
  const auto spectrum = laplacian_spectrum(g);
  return {spectrum[1], SpectralMethod::dense, 0};
}

SpectralResult spectral_gap_iterative(GraphView g, const SpectralOptions& options) {
  const WeightedAdjacency adj = multiplicity_adjacency(g);
  require_spectral_input(adj);
  const std::size_t n = adj.vertex_count;

  // Entries of P = D^-1/2 A D^-1/2 in CSR order.
  std::vector<double> scaled(adj.weight.size());
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t k = adj.row_ptr[u]; k < adj.row_ptr[u + 1]; ++k) {
      scaled[k] = adj.weight[k] / std::sqrt(adj.degree[u] * adj.degree[adj.col[k]]);
    }
  }
  std::vector<double> v0(n);
  for (std::size_t i = 0; i < n; ++i) v0[i] = std::sqrt(adj.degree[i]);
  kernels::scale(1.0 / std::sqrt(kernels::dot(v0, v0)), v0);

  // w = (I + P) x with the v0 component removed.
  auto apply = [&](std::span<const double> x, std::span<double> w) {
    for (std::size_t u = 0; u < n; ++u) {
      double acc = x[u];
      for (std::size_t k = adj.row_ptr[u]; k < adj.row_ptr[u + 1]; ++k) acc += scaled[k] * x[adj.col[k]];
      w[u] = acc;
    }
    kernels::axpy(-kernels::dot(v0, w), v0, w);
  };

  // Fixed-seed start vector so the result does not depend on call history.
  std::mt19937_64 engine(0x5c6f'5eed'0000'0001ULL);
  std::vector<double> start(n);
  for (double& xi : start) xi = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
  kernels::axpy(-kernels::dot(v0, start), v0, start);
  kernels::scale(1.0 / std::sqrt(kernels::dot(start, start)), start);

  // The deflated space has dimension n - 1.
  const std::size_t m = std::max<std::size_t>(2, std::min(options.krylov_dim, n - 1));
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> w(n);
  std::size_t applications = 0;
  double theta = 0.0;

  while (applications < options.max_iterations) {
    basis.assign(1, start);
    alpha.clear();
    beta.clear();
    Eigen::VectorXd ritz_vec;
    for (std::size_t j = 0; j < m && applications < options.max_iterations; ++j) {
      apply(basis[j], w);
      ++applications;
      alpha.push_back(kernels::dot(basis[j], w));
      // Full reorthogonalization, twice, against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) kernels::axpy(-kernels::dot(q, w), q, w);
        kernels::axpy(-kernels::dot(v0, w), v0, w);
      }
      const double b = std::sqrt(kernels::dot(w, w));

      const auto k = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
      Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      if (tri.info() != Eigen::Success) throw NonConvergence("tridiagonal eigensolver failed");
      theta = tri.eigenvalues()(k - 1);
      ritz_vec = tri.eigenvectors().col(k - 1);
      const double residual = b * std::abs(ritz_vec(k - 1));

      const bool exhausted = b <= 1e-14 || basis.size() == n - 1;
      if (residual < options.tolerance || exhausted) {
        return {std::max(0.0, 2.0 - theta), SpectralMethod::lanczos, applications};
      }
      if (j + 1 == m) break;
      beta.push_back(b);
      kernels::scale(1.0 / b, w);
      basis.push_back(w);
    }
    // Restart from the current Ritz vector.
    std::fill(start.begin(), start.end(), 0.0);
    for (std::size_t i = 0; i < basis.size() && i < static_cast<std::size_t>(ritz_vec.size()); ++i) {
      kernels::axpy(ritz_vec(static_cast<Eigen::Index>(i)), basis[i], start);
    }
    kernels::axpy(-kernels::dot(v0, start), v0, start);
    kernels::scale(1.0 / std::sqrt(kernels::dot(start, start)), start);
  }
  throw NonConvergence("Lanczos iteration did not converge within " + std::to_string(options.max_iterations) +
                       " operator applications (last estimate " + std::to_string(2.0 - theta) + ")");
}

SpectralResult spectral_gap(GraphView g, const SpectralOptions& options) {
  if (g.vertex_count <= options.dense_threshold) return spectral_gap_dense(g);
  return spectral_gap_iterative(g, options);
}

std::optional<std::uint32_t> diameter(GraphView g) {
  const auto adj = neighbor_lists(g);
  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(g.vertex_count);
  std::vector<std::uint32_t> queue(g.vertex_count);
  std::uint32_t best = 0;
  for (std::uint32_t s = 0; s < g.vertex_count; ++s) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const std::uint32_t v = queue[head++];
      for (std::uint32_t w : adj[v]) {
        if (dist[w] == kUnseen) {
          dist[w] = dist[v] + 1;
          queue[tail++] = w;
        }
      }
    }
    if (tail != g.vertex_count) return std::nullopt;
    best = std::max(best, dist[queue[tail - 1]]);
  }
  return best;
}

QuotientCheck verify_quotient(const CayleyGraph& cayley, const SchreierGraph& schreier) {
  QuotientCheck out;
  auto fail = [&out](QuotientViolation::Kind kind, Edge e, std::string detail) {
    out.ok = false;
    out.violations.push_back({kind, e, std::move(detail)});
  };
  if (cayley.modulus != schreier.modulus) {
    fail(QuotientViolation::Kind::unknown_vertex, {}, "modulus mismatch");
    return out;
  }
  const SubgroupSpec h = SubgroupSpec::diagonal(schreier.modulus);

  std::vector<std::uint32_t> image(cayley.vertex_count());
  std::vector<std::uint64_t> fiber(schreier.vertex_count(), 0);
  constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();
  for (std::size_t i = 0; i < cayley.vertex_count(); ++i) {
    const auto it = schreier.rep_index.find(canonicalize(cayley.vertices[i], h));
    image[i] = it == schreier.rep_index.end() ? kMissing : it->second;
    if (image[i] != kMissing && image[i] < fiber.size()) ++fiber[image[i]];
  }

  std::vector<Edge> sorted(schreier.edges.begin(), schreier.edges.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<char> covered(sorted.size(), 0);

  for (const Edge& e : cayley.edges) {
    if (image[e.src] == kMissing || image[e.dst] == kMissing) {
      fail(QuotientViolation::Kind::unknown_vertex, e,
           "Cayley vertex has no Schreier representative");
      continue;
    }
    const Edge target{image[e.src], e.label, image[e.dst]};
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), target);
    if (it == sorted.end() || *it != target) {
      fail(QuotientViolation::Kind::missing_schreier_edge, e,
           "image edge (" + std::to_string(target.src) + ", " + std::to_string(target.label) + ", " +
               std::to_string(target.dst) + ") absent from Schreier graph");
      continue;
    }
    // Mark every parallel copy with the same label as covered.
    for (auto jt = it; jt != sorted.end() && *jt == target; ++jt) covered[jt - sorted.begin()] = 1;
  }
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (!covered[k]) {
      fail(QuotientViolation::Kind::uncovered_schreier_edge, sorted[k],
           "Schreier edge is not the image of any Cayley edge");
    }
  }
  const std::uint64_t phi = euler_phi(schreier.modulus);
  for (std::size_t v = 0; v < fiber.size(); ++v) {
    if (fiber[v] != phi) {
      fail(QuotientViolation::Kind::fiber_size, {static_cast<std::uint32_t>(v), 0, static_cast<std::uint32_t>(v)},
           "fiber of vertex " + std::to_string(v) + " has " + std::to_string(fiber[v]) +
               " elements, expected " + std::to_string(phi));
    }
  }
  return out;
}

Rational Rational::reduced(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

GraphReport analyze(GraphView g, std::optional<Modulus> modulus, const AnalyzeOptions& options) {
  check_range(g);
  GraphReport r;
  r.vertex_count = g.vertex_count;
  r.directed_edge_count = g.edges.size();

  std::vector<std::size_t> out_degree(g.vertex_count, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    ++out_degree[e.src];
    if (e.src == e.dst) {
      ++r.self_loop_count;
    } else {
      pairs.emplace_back(e.src, e.dst);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i] == pairs[i - 1]) ++r.parallel_edge_count;
  }
  if (g.vertex_count > 0) {
    const auto [lo, hi] = std::minmax_element(out_degree.begin(), out_degree.end());
    r.min_degree = *lo;
    r.max_degree = *hi;
  }

  const Connectivity conn = connectivity(g);
  r.is_connected = conn.is_connected;
  r.component_count = conn.component_count;

  if (options.spectral && g.vertex_count >= 2) {
    // lambda_1 is exactly zero when there are several components.
    r.lambda1 = conn.component_count > 1 ? 0.0 : spectral_gap(g, options.spectral_options).lambda1;
  }
  if (options.diameter && g.vertex_count <= options.diameter_limit) r.diameter = diameter(g);

  if (modulus) {
    r.n = modulus->value();
    r.cayley_vertex_count = group_order(*modulus);
    if (g.vertex_count > 0) r.compression_ratio = Rational::reduced(*r.cayley_vertex_count, g.vertex_count);
  }
  return r;
}

GraphReport analyze(const LabeledGraph& g, const AnalyzeOptions& options) {
  return analyze(view(g), g.modulus, options);
}

nlohmann::ordered_json to_json(const GraphReport& r) {
  using json = nlohmann::ordered_json;
  auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
  json j;
  j["n"] = opt(r.n);
  j["vertex_count"] = r.vertex_count;
  j["directed_edge_count"] = r.directed_edge_count;
  j["self_loop_count"] = r.self_loop_count;
  j["parallel_edge_count"] = r.parallel_edge_count;
  j["is_connected"] = r.is_connected;
  j["component_count"] = r.component_count;
  j["min_degree"] = r.min_degree;
  j["max_degree"] = r.max_degree;
  j["lambda1"] = opt(r.lambda1);
  j["diameter"] = opt(r.diameter);
  j["cayley_vertex_count"] = opt(r.cayley_vertex_count);
  j["compression_ratio"] =
      r.compression_ratio
          ? json{{"numerator", r.compression_ratio->numerator}, {"denominator", r.compression_ratio->denominator}}
          : json(nullptr);
  return j;
}

GraphReport report_from_json(const nlohmann::json& j) {
  GraphReport r;
  auto opt = [&j](const char* key, auto& field) {
    using T = typename std::remove_reference_t<decltype(field)>::value_type;
    if (!j.at(key).is_null()) field = j.at(key).get<T>();
  };
  opt("n", r.n);
  r.vertex_count = j.at("vertex_count").get<std::size_t>();
  r.directed_edge_count = j.at("directed_edge_count").get<std::size_t>();
  r.self_loop_count = j.at("self_loop_count").get<std::size_t>();
  r.parallel_edge_count = j.at("parallel_edge_count").get<std::size_t>();
  r.is_connected = j.at("is_connected").get<bool>();
  r.component_count = j.at("component_count").get<std::size_t>();
  r.min_degree = j.at("min_degree").get<std::size_t>();
  r.max_degree = j.at("max_degree").get<std::size_t>();
  opt("lambda1", r.lambda1);
  opt("diameter", r.diameter);
  opt("cayley_vertex_count", r.cayley_vertex_count);
  if (const auto& c = j.at("compression_ratio"); !c.is_null()) {
    r.compression_ratio = Rational{c.at("numerator").get<std::uint64_t>(), c.at("denominator").get<std::uint64_t>()};
  }
  return r;
}

}  // namespace scgp
