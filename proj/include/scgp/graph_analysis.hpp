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

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scgp/coset_enum.hpp"

namespace scgp {

/// Non-owning view of a directed multigraph. Analysis treats the edge list as
/// a multiset; every directed edge u -> v adds 1 to A(u, v).
struct GraphView {
  std::size_t vertex_count = 0;
  std::span<const Edge> edges;
};

inline GraphView view(const LabeledGraph& g) { return {g.vertex_count(), g.edges}; }

/// Multiplicity-weighted adjacency in CSR form (columns ascending per row).
struct WeightedAdjacency {
  std::size_t vertex_count = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> weight;
  std::vector<double> degree;  // row sums of A
};

/// Throws InvalidArgument if the edge multiset is not symmetric or refers to
/// out-of-range vertices.
WeightedAdjacency multiplicity_adjacency(GraphView g);

struct Connectivity {
  bool is_connected = false;
  std::size_t component_count = 0;
};

/// Undirected reachability; direction is ignored.
Connectivity connectivity(GraphView g);

/// L = D^-1/2 (D - A) D^-1/2. Throws InvalidArgument on an isolated vertex.
Eigen::MatrixXd normalized_laplacian(GraphView g);

/// All eigenvalues of the normalized Laplacian, ascending (dense solver).
std::vector<double> laplacian_spectrum(GraphView g);

enum class SpectralMethod { dense, lanczos };

struct SpectralOptions {
  std::size_t dense_threshold = 2000;  // dense solve when vertex_count <= this
  double tolerance = 1e-9;             // residual bound on the converged estimate
  std::size_t krylov_dim = 160;        // basis size before a restart
  std::size_t max_iterations = 200'000;  // operator applications
};

struct SpectralResult {
  double lambda1 = 0.0;
  SpectralMethod method = SpectralMethod::dense;
  std::size_t iterations = 0;  // operator applications (0 for dense)
};

/// Second-smallest eigenvalue of the normalized Laplacian. Requires at least
/// two vertices and no isolated vertex.
SpectralResult spectral_gap(GraphView g, const SpectralOptions& options = {});
SpectralResult spectral_gap_dense(GraphView g);

/// Largest eigenvalue of the shifted operator 2I - L = I + D^-1/2 A D^-1/2
/// restricted to the complement of the lambda_0 eigenvector (proportional to
/// sqrt(deg)), found with restarted Lanczos over the power-iteration Krylov
/// space with full reorthogonalization. Stops when the Ritz residual bound
/// |beta_k * s_k| drops below `tolerance`, which puts an exact eigenvalue
/// within `tolerance` of the estimate. Throws NonConvergence at the
/// iteration cap.
SpectralResult spectral_gap_iterative(GraphView g, const SpectralOptions& options = {});

/// Largest finite BFS eccentricity; nullopt for disconnected graphs.
std::optional<std::uint32_t> diameter(GraphView g);

struct QuotientViolation {
  enum class Kind { unknown_vertex, missing_schreier_edge, uncovered_schreier_edge, fiber_size };
  Kind kind;
  Edge edge{};  // Cayley edge for unknown_vertex / missing; Schreier edge otherwise
  std::string detail;
};

struct QuotientCheck {
  bool ok = true;
  std::vector<QuotientViolation> violations;
};

/// Checks that psi maps every Cayley edge (g, l, g*s_l) onto a Schreier edge
/// with the same label, that every Schreier edge is such an image, and that
/// every fiber has euler_phi(n) elements.
QuotientCheck verify_quotient(const CayleyGraph& cayley, const SchreierGraph& schreier);

struct Rational {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  static Rational reduced(std::uint64_t num, std::uint64_t den);
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct GraphReport {
  std::optional<std::uint32_t> n;
  std::size_t vertex_count = 0;
  std::size_t directed_edge_count = 0;
  std::size_t self_loop_count = 0;
  std::size_t parallel_edge_count = 0;
  bool is_connected = false;
  std::size_t component_count = 0;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  std::optional<double> lambda1;
  std::optional<std::uint32_t> diameter;
  std::optional<std::uint64_t> cayley_vertex_count;
  std::optional<Rational> compression_ratio;
};

struct AnalyzeOptions {
  bool spectral = true;
  bool diameter = true;
  std::size_t diameter_limit = 5000;
  SpectralOptions spectral_options;
};

GraphReport analyze(const LabeledGraph& g, const AnalyzeOptions& options = {});

/// Analysis of an arbitrary multigraph; the modulus-derived fields are only
/// filled when `modulus` is given.
GraphReport analyze(GraphView g, std::optional<Modulus> modulus, const AnalyzeOptions& options = {});

nlohmann::ordered_json to_json(const GraphReport& report);
GraphReport report_from_json(const nlohmann::json& j);

}  // namespace scgp
