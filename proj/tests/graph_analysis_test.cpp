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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles/oracles.hpp"
#include "scgp/error.hpp"

namespace scgp {
namespace {

// Undirected simple graph as a symmetric directed edge list.
std::vector<Edge> undirected(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  std::vector<Edge> out;
  for (const auto& [u, v] : pairs) {
    out.push_back({u, 0, v});
    out.push_back({v, 1, u});
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs(const LabeledGraph& g) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const Edge& e : g.edges) out.emplace_back(e.src, e.dst);
  return out;
}

TEST(Connectivity, SchreierGraphsAreConnected) {
  EXPECT_TRUE(connectivity(view(enumerate_cosets(Modulus(5)))).is_connected);
  EXPECT_EQ(connectivity(view(enumerate_cosets(Modulus(5)))).component_count, 1u);
  for (std::uint32_t n = 2; n <= 50; ++n) EXPECT_TRUE(connectivity(view(enumerate_cosets(Modulus(n)))).is_connected);
}

TEST(Connectivity, TwoIsolatedVertices) {
  const Connectivity c = connectivity(GraphView{2, {}});
  EXPECT_FALSE(c.is_connected);
  EXPECT_EQ(c.component_count, 2u);
}

TEST(NormalizedLaplacian, SingleEdge) {
  const auto edges = undirected({{0, 1}});
  const Eigen::MatrixXd l = normalized_laplacian(GraphView{2, edges});
  EXPECT_DOUBLE_EQ(l(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(l(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(l(1, 0), -1.0);
  const auto eig = laplacian_spectrum(GraphView{2, edges});
  EXPECT_NEAR(eig[0], 0.0, 1e-15);
  EXPECT_NEAR(eig[1], 2.0, 1e-15);
}

TEST(NormalizedLaplacian, RejectsIsolatedVertex) {
  const auto edges = undirected({{0, 1}});
  EXPECT_THROW(normalized_laplacian(GraphView{3, edges}), InvalidArgument);
}

TEST(NormalizedLaplacian, UnnormalizedRowSumsVanish) {
  const SchreierGraph g = enumerate_cosets(Modulus(5));
  const WeightedAdjacency a = multiplicity_adjacency(view(g));
  for (std::size_t u = 0; u < a.vertex_count; ++u) {
    double row = a.degree[u];
    for (std::size_t k = a.row_ptr[u]; k < a.row_ptr[u + 1]; ++k) row -= a.weight[k];
    EXPECT_EQ(row, 0.0);
    EXPECT_EQ(a.degree[u], 4.0);
  }
}

TEST(NormalizedLaplacian, MatchesOracleAndIsSymmetric) {
  for (std::uint32_t n : {2u, 3u, 4u, 6u, 9u, 12u, 20u}) {
    const SchreierGraph g = enumerate_cosets(Modulus(n));
    const Eigen::MatrixXd l = normalized_laplacian(view(g));
    const auto ref = oracle::laplacian_from_edges(g.vertex_count(), arcs(g));
    EXPECT_LT((l - l.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    for (std::size_t i = 0; i < ref.size(); ++i)
      for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(l(i, j), ref[i][j], 1e-14);
  }
}

TEST(NormalizedLaplacian, SpectrumAgreesWithJacobiOracle) {
  for (std::uint32_t n : {2u, 3u, 5u, 7u, 8u}) {
    const SchreierGraph g = enumerate_cosets(Modulus(n));
    const auto eig = laplacian_spectrum(view(g));
    const auto ref = oracle::jacobi_eigenvalues(oracle::laplacian_from_edges(g.vertex_count(), arcs(g)));
    ASSERT_EQ(eig.size(), ref.size());
    for (std::size_t i = 0; i < eig.size(); ++i) {
      EXPECT_NEAR(eig[i], ref[i], 1e-10) << "n = " << n << " i = " << i;
      EXPECT_GE(eig[i], -1e-9);
      EXPECT_LE(eig[i], 2.0 + 1e-9);
    }
  }
}

TEST(SpectralGap, DisconnectedIsZero) {
  const auto edges = undirected({{0, 1}, {2, 3}});
  EXPECT_NEAR(spectral_gap(GraphView{4, edges}).lambda1, 0.0, 1e-9);
  EXPECT_NEAR(spectral_gap_iterative(GraphView{4, edges}).lambda1, 0.0, 1e-9);
}

TEST(SpectralGap, CompleteGraphClosedForm) {
  for (std::uint32_t k = 2; k <= 8; ++k) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t i = 0; i < k; ++i)
      for (std::uint32_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    const auto edges = undirected(pairs);
    const double expected = static_cast<double>(k) / (k - 1);
    EXPECT_NEAR(spectral_gap(GraphView{k, edges}).lambda1, expected, 1e-12);
    if (k >= 3) {
      EXPECT_NEAR(spectral_gap_iterative(GraphView{k, edges}).lambda1, expected, 1e-9);
    }
  }
}

TEST(SpectralGap, SchreierFiveMatchesOracle) {
  const SchreierGraph g = enumerate_cosets(Modulus(5));
  const auto ref = oracle::jacobi_eigenvalues(oracle::laplacian_from_edges(g.vertex_count(), arcs(g)));
  const SpectralResult dense = spectral_gap(view(g));
  EXPECT_EQ(dense.method, SpectralMethod::dense);
  EXPECT_GT(dense.lambda1, 0.0);
  EXPECT_NEAR(dense.lambda1, ref[1], 1e-8);
  // Closed form for this graph: (3 - sqrt 5) / 4.
  EXPECT_NEAR(dense.lambda1, (3.0 - std::sqrt(5.0)) / 4.0, 1e-12);
  EXPECT_NEAR(spectral_gap_iterative(view(g)).lambda1, ref[1], 1e-8);
}

TEST(SpectralGap, IterativeAgreesWithDense) {
  for (std::uint32_t n : {2u, 3u, 4u, 10u, 16u, 22u, 28u, 31u, 37u}) {
    const SchreierGraph g = enumerate_cosets(Modulus(n));
    const SpectralResult d = spectral_gap_dense(view(g));
    const SpectralResult it = spectral_gap_iterative(view(g));
    EXPECT_EQ(it.method, SpectralMethod::lanczos);
    EXPECT_NEAR(d.lambda1, it.lambda1, 1e-8) << "n = " << n;
  }
}

TEST(SpectralGap, LargeGraphTakesIterativePath) {
  const SchreierGraph g = enumerate_cosets(Modulus(41));
  ASSERT_GT(g.vertex_count(), 1600u);
  SpectralOptions opts;
  opts.dense_threshold = 100;
  const SpectralResult r = spectral_gap(view(g), opts);
  EXPECT_EQ(r.method, SpectralMethod::lanczos);
  EXPECT_GT(r.iterations, 0u);
  EXPECT_NEAR(r.lambda1, spectral_gap_dense(view(g)).lambda1, 1e-8);
}

TEST(SpectralGap, IterationCapIsReported) {
  const SchreierGraph g = enumerate_cosets(Modulus(31));
  SpectralOptions opts;
  opts.krylov_dim = 4;
  opts.max_iterations = 8;
  EXPECT_THROW(spectral_gap_iterative(view(g), opts), NonConvergence);
}

TEST(SpectralGap, Reproducible) {
  const SchreierGraph g = enumerate_cosets(Modulus(29));
  EXPECT_EQ(spectral_gap_iterative(view(g)).lambda1, spectral_gap_iterative(view(g)).lambda1);
}

TEST(Diameter, KnownGraphs) {
  EXPECT_EQ(diameter(view(enumerate_cosets(Modulus(5)))), 5u);
  const auto path = undirected({{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(diameter(GraphView{4, path}), 3u);
  EXPECT_EQ(diameter(GraphView{3, undirected({{0, 1}})}), std::nullopt);
}

TEST(VerifyQuotient, HoldsForSmallModuli) {
  for (std::uint32_t n = 2; n <= 7; ++n) {
    const QuotientCheck q = verify_quotient(build_cayley(Modulus(n)), enumerate_cosets(Modulus(n)));
    EXPECT_TRUE(q.ok) << "n = " << n;
    EXPECT_TRUE(q.violations.empty());
  }
}

TEST(VerifyQuotient, CorruptedLabelIsReported) {
  const CayleyGraph c = build_cayley(Modulus(5));
  SchreierGraph s = enumerate_cosets(Modulus(5));
  // Swap labels 2 and 0 on one edge so it no longer matches its Cayley preimages.
  Edge& victim = s.edges[7];
  const Edge original = victim;
  victim.label = 0;
  const QuotientCheck q = verify_quotient(c, s);
  EXPECT_FALSE(q.ok);
  bool listed = false;
  for (const auto& v : q.violations) {
    if (v.kind == QuotientViolation::Kind::uncovered_schreier_edge && v.edge == victim) listed = true;
    if (v.kind == QuotientViolation::Kind::missing_schreier_edge) {
      EXPECT_EQ(v.edge.label, original.label);
    }
  }
  EXPECT_TRUE(listed);
}

TEST(VerifyQuotient, WrongFiberIsReported) {
  const CayleyGraph c = build_cayley(Modulus(4));
  SchreierGraph s = enumerate_cosets(Modulus(4));
  s.vertices.pop_back();
  s.reindex();
  const QuotientCheck q = verify_quotient(c, s);
  EXPECT_FALSE(q.ok);
}

TEST(Rational, Reduced) {
  EXPECT_EQ(Rational::reduced(120, 30), (Rational{4, 1}));
  EXPECT_EQ(Rational::reduced(6, 4), (Rational{3, 2}));
  EXPECT_THROW(Rational::reduced(1, 0), InvalidArgument);
}

TEST(Analyze, SchreierFive) {
  const GraphReport r = analyze(enumerate_cosets(Modulus(5)));
  EXPECT_EQ(r.n, 5u);
  EXPECT_EQ(r.vertex_count, 30u);
  EXPECT_EQ(r.directed_edge_count, 120u);
  EXPECT_TRUE(r.is_connected);
  EXPECT_EQ(r.component_count, 1u);
  EXPECT_EQ(r.min_degree, 4u);
  EXPECT_EQ(r.max_degree, 4u);
  EXPECT_EQ(r.cayley_vertex_count, 120u);
  EXPECT_EQ(r.compression_ratio, (Rational{4, 1}));
  ASSERT_TRUE(r.lambda1.has_value());
  EXPECT_GT(*r.lambda1, 0.0);
  EXPECT_EQ(r.diameter, 5u);
}

TEST(Analyze, SchreierEleven) {
  const GraphReport r = analyze(enumerate_cosets(Modulus(11)));
  EXPECT_EQ(r.vertex_count, 132u);
  EXPECT_EQ(r.cayley_vertex_count, 1320u);
  EXPECT_EQ(r.compression_ratio, (Rational{10, 1}));
}

TEST(Analyze, CompressionIsTotient) {
  AnalyzeOptions opts;
  opts.spectral = false;
  opts.diameter = false;
  for (std::int64_t n = 2; n <= 50; ++n) {
    const GraphReport r = analyze(enumerate_cosets(Modulus(n)), opts);
    EXPECT_EQ(r.compression_ratio, (Rational{static_cast<std::uint64_t>(oracle::totient(n)), 1})) << n;
  }
}

TEST(Analyze, SingleVertexWithFourLoops) {
  const std::vector<Edge> loops{{0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {0, 3, 0}};
  const GraphReport r = analyze(GraphView{1, loops}, std::nullopt);
  EXPECT_EQ(r.min_degree, 4u);
  EXPECT_EQ(r.max_degree, 4u);
  EXPECT_EQ(r.self_loop_count, 4u);
  EXPECT_EQ(r.parallel_edge_count, 0u);
  EXPECT_FALSE(r.lambda1.has_value());
  EXPECT_EQ(r.diameter, 0u);
  EXPECT_FALSE(r.n.has_value());
}

TEST(Analyze, DisconnectedGapIsExactlyZero) {
  const auto edges = undirected({{0, 1}, {2, 3}});
  const GraphReport r = analyze(GraphView{4, edges}, std::nullopt);
  EXPECT_EQ(r.component_count, 2u);
  EXPECT_EQ(r.lambda1, 0.0);
  EXPECT_FALSE(r.diameter.has_value());
}

TEST(Analyze, CountsLoopsAndParallelEdges) {
  // n = 2: g0 == g1 numerically, so each vertex has paired parallel arcs.
  const SchreierGraph g = enumerate_cosets(Modulus(2));
  const GraphReport r = analyze(g);
  std::size_t loops = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> mult;
  for (const Edge& e : g.edges) {
    if (e.src == e.dst) {
      ++loops;
    } else {
      ++mult[{e.src, e.dst}];
    }
  }
  std::size_t parallel = 0;
  for (const auto& [k, m] : mult) parallel += m - 1;
  EXPECT_EQ(r.self_loop_count, loops);
  EXPECT_EQ(r.parallel_edge_count, parallel);
  EXPECT_GT(r.parallel_edge_count, 0u);
}

TEST(Analyze, DiameterLimit) {
  AnalyzeOptions opts;
  opts.diameter_limit = 10;
  EXPECT_FALSE(analyze(enumerate_cosets(Modulus(5)), opts).diameter.has_value());
}

TEST(ReportJson, FieldNamesAndRoundTrip) {
  const GraphReport r = analyze(enumerate_cosets(Modulus(6)));
  const auto j = to_json(r);
  const std::vector<std::string> keys{"n",          "vertex_count",  "directed_edge_count", "self_loop_count",
                                      "parallel_edge_count", "is_connected", "component_count", "min_degree",
                                      "max_degree", "lambda1",       "diameter",            "cayley_vertex_count",
                                      "compression_ratio"};
  std::vector<std::string> got;
  for (const auto& [k, v] : j.items()) got.push_back(k);
  EXPECT_EQ(got, keys);
  EXPECT_EQ(j["compression_ratio"]["numerator"], 2);
  EXPECT_EQ(j["compression_ratio"]["denominator"], 1);

  const GraphReport back = report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.n, r.n);
  EXPECT_EQ(back.vertex_count, r.vertex_count);
  EXPECT_EQ(back.parallel_edge_count, r.parallel_edge_count);
  EXPECT_EQ(back.lambda1, r.lambda1);
  EXPECT_EQ(back.diameter, r.diameter);
  EXPECT_EQ(back.compression_ratio, r.compression_ratio);
}

TEST(ReportJson, SkippedFieldsAreNull) {
  AnalyzeOptions opts;
  opts.spectral = false;
  opts.diameter = false;
  const auto j = to_json(analyze(enumerate_cosets(Modulus(3)), opts));
  EXPECT_TRUE(j["lambda1"].is_null());
  EXPECT_TRUE(j["diameter"].is_null());
}

}  // namespace
}  // namespace scgp
