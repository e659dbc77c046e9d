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

#include "scgp/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scgp/augment.hpp"
#include "scgp/cache_store.hpp"
#include "scgp/coset_enum.hpp"
#include "scgp/error.hpp"
#include "scgp/formats.hpp"
#include "scgp/graph_analysis.hpp"
#include "scgp/kernels.hpp"

namespace scgp {

namespace {

struct Options {
  std::optional<std::string> cache_dir;
  std::string kernels;

  std::size_t nodes = 0;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> n_override;
  bool cayley = false;
  bool spectral = false;
  bool with_diameter = false;
  std::string graph_file;
  std::string out = "-";
  std::uint32_t dim = 64;
  std::uint32_t layers = 4;
  std::uint32_t hidden = 64;
  std::uint64_t seed = 0;
  std::string activation = "relu";
  bool csv = false;
  bool json = false;
  std::string features;
};

std::unique_ptr<ArtifactCache> open_cache(const Options& o) {
  if (auto root = CacheStore::resolve_root(o.cache_dir)) {
    auto store = std::make_unique<CacheStore>(*root);
    store->set_warning_sink([](const std::string& msg) { std::fprintf(stderr, "scgp: warning: %s\n", msg.c_str()); });
    return store;
  }
  return std::make_unique<InMemoryCache>();
}

PropagationConfig config_from(const Options& o) {
  PropagationConfig c;
  c.layers = o.layers;
  c.hidden_dim = o.hidden;
  c.embed_dim = o.dim;
  c.seed = o.seed;
  c.activation = parse_activation(o.activation);
  c.validate();
  return c;
}

void emit_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
  } else {
    io::write_file_atomic(path, text);
  }
}

int cmd_select_n(const Options& o, std::ostream& out) {
  const Modulus n = select_modulus(o.nodes);
  out << "n=" << n.value() << " cosets=" << coset_count(n) << "\n";
  return kExitOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  const Modulus n(o.n);
  if (o.cayley) {
    emit_text(o.out, io::encode_graph(build_cayley(n)), out);
  } else {
    emit_text(o.out, io::encode_graph(open_cache(o)->get_or_build_graph(n)), out);
  }
  return kExitOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  AnalyzeOptions opts;
  opts.spectral = o.spectral;
  opts.diameter = o.with_diameter;
  GraphReport report;
  if (!o.graph_file.empty()) {
    const std::string text = io::read_text_file(o.graph_file);
    report = io::peek_graph_kind(text) == GraphKind::cayley ? analyze(io::decode_cayley(text), opts)
                                                            : analyze(io::decode_schreier(text), opts);
  } else {
    const Modulus n(o.n);
    report = o.cayley ? analyze(build_cayley(n), opts) : analyze(open_cache(o)->get_or_build_graph(n), opts);
  }
  emit_text(o.out, to_json(report).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_embed(const Options& o, std::ostream& out) {
  const Modulus n(o.n);
  const EmbeddingMatrix z = open_cache(o)->get_or_build_embeddings(n, config_from(o));
  if (o.csv) {
    std::ostringstream ss;
    io::write_feature_csv(ss, z.values, io::column_names("z", z.values.cols));
    emit_text(o.out, ss.str(), out);
  } else {
    if (o.out == "-") throw InvalidArgument("binary embedding output needs --out FILE (or use --csv)");
    io::write_file_atomic(o.out, io::encode_embedding_file(z));
  }
  return kExitOk;
}

int cmd_augment(const Options& o, std::ostream& out) {
  if (o.out == "-") throw InvalidArgument("augment writes provenance to stdout; give --out FILE for the features");
  AugmentRequest req;
  std::vector<std::string> names;
  req.input_features = io::read_feature_csv(std::filesystem::path(o.features), &names);
  req.modulus_override = o.n_override;
  req.config = config_from(o);
  auto cache = open_cache(o);
  const AugmentResult result = augment(req, *cache);

  const auto z_names = io::column_names("z", result.provenance.embed_dim);
  names.insert(names.end(), z_names.begin(), z_names.end());
  std::ostringstream ss;
  io::write_feature_csv(ss, result.features, names);
  io::write_file_atomic(o.out, ss.str());
  out << to_json(result.provenance).dump(2) << "\n";
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const Modulus n(o.n);
  AnalyzeOptions opts;
  opts.diameter = false;
  const GraphReport s = analyze(open_cache(o)->get_or_build_graph(n), opts);
  std::optional<GraphReport> c;
  if (n.value() <= kCayleyGuard) c = analyze(build_cayley(n), opts);

  const std::uint64_t cayley_vertices = group_order(n);
  const auto lambda = [](const std::optional<double>& l) {
    if (!l) return std::string("n/a");
    std::ostringstream ss;
    ss << std::setprecision(10) << *l;
    return ss.str();
  };
  if (o.json) {
    nlohmann::ordered_json j;
    j["n"] = n.value();
    j["schreier"] = to_json(s);
    j["cayley_vertex_count"] = cayley_vertices;
    j["cayley_directed_edge_count"] = cayley_vertices * kGeneratorCount;
    j["cayley"] = c ? to_json(*c) : nlohmann::ordered_json(nullptr);
    j["compression_ratio"] = to_json(s)["compression_ratio"];
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "n = " << n.value() << "\n";
  out << std::left << std::setw(18) << "quantity" << std::setw(16) << "schreier" << "cayley\n";
  out << std::setw(18) << "vertices" << std::setw(16) << s.vertex_count << cayley_vertices << "\n";
  out << std::setw(18) << "directed_edges" << std::setw(16) << s.directed_edge_count
      << cayley_vertices * kGeneratorCount << "\n";
  out << std::setw(18) << "lambda1" << std::setw(16) << lambda(s.lambda1)
      << (c ? lambda(c->lambda1) : std::string("n/a (n > " + std::to_string(kCayleyGuard) + ")")) << "\n";
  out << std::setw(18) << "ratio" << s.compression_ratio->numerator;
  if (s.compression_ratio->denominator != 1) out << "/" << s.compression_ratio->denominator;
  out << " (phi(n) = " << euler_phi(n) << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Schreier-coset graph construction, analysis, and feature augmentation", "scgp"};
  app.require_subcommand(1);
  app.add_option("--cache-dir", o.cache_dir, "Cache root (default: $SCGP_CACHE; no cache if unset)");
  app.add_option("--kernels", o.kernels, "Force a vector kernel backend")->check(CLI::IsMember({"scalar", "avx2", "neon"}));

  auto* select = app.add_subcommand("select-n", "Pick the smallest n whose coset graph has at least K vertices");
  select->add_option("--nodes", o.nodes, "Number of input nodes K")->required()->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "Write a Schreier-coset (or Cayley) graph file");
  gen->add_option("--n", o.n, "Modulus")->required();
  gen->add_flag("--cayley", o.cayley, "Build the full Cayley graph (n <= 12)");
  gen->add_option("--out", o.out, "Output file ('-' for stdout)");

  auto* an = app.add_subcommand("analyze", "Structural and spectral report as JSON");
  auto* an_n = an->add_option("--n", o.n, "Modulus");
  auto* an_graph = an->add_option("--graph", o.graph_file, "Analyze a graph file instead")->check(CLI::ExistingFile);
  an_n->excludes(an_graph);
  an->add_flag("--cayley", o.cayley, "Analyze the Cayley graph (n <= 12)");
  an->add_flag("--spectral", o.spectral, "Compute lambda1 of the normalized Laplacian");
  an->add_flag("--diameter", o.with_diameter, "Compute the diameter (<= 5000 vertices)");
  an->add_option("--out", o.out, "Output file ('-' for stdout)");

  auto add_config = [&o](CLI::App* sub) {
    sub->add_option("--dim", o.dim, "Embedding dimension")->check(CLI::PositiveNumber);
    sub->add_option("--layers", o.layers, "Propagation layers")->check(CLI::PositiveNumber);
    sub->add_option("--hidden", o.hidden, "Hidden dimension")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Weight seed");
    sub->add_option("--activation", o.activation, "relu|tanh|identity")
        ->check(CLI::IsMember({"relu", "tanh", "identity"}));
  };
  auto* embed = app.add_subcommand("embed", "Pre-compute Schreier node embeddings");
  embed->add_option("--n", o.n, "Modulus")->required();
  add_config(embed);
  embed->add_flag("--csv", o.csv, "Write CSV (node_id,z0,...) instead of the binary format");
  embed->add_option("--out", o.out, "Output file")->required();

  auto* aug = app.add_subcommand("augment", "Concatenate Schreier embeddings onto node features");
  aug->add_option("--features", o.features, "Input feature CSV")->required()->check(CLI::ExistingFile);
  aug->add_option("--n", o.n_override, "Override the selected modulus");
  add_config(aug);
  aug->add_option("--out", o.out, "Output feature CSV")->required();

  auto* cmp = app.add_subcommand("compare", "Schreier vs Cayley size and spectral comparison");
  cmp->add_option("--n", o.n, "Modulus")->required();
  cmp->add_flag("--json", o.json, "Emit JSON instead of a table");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "scgp: " << e.what() << " (see --help)\n";
    return kExitUsageError;
  }

  try {
    if (!o.kernels.empty()) kernels::set_active(kernels::parse_backend(o.kernels));
    if (*an && o.graph_file.empty() && an_n->count() == 0) throw InvalidArgument("analyze needs --n N or --graph FILE");
    if (*select) return cmd_select_n(o, out);
    if (*gen) return cmd_gen(o, out);
    if (*an) return cmd_analyze(o, out);
    if (*embed) return cmd_embed(o, out);
    if (*aug) return cmd_augment(o, out);
    if (*cmp) return cmd_compare(o, out);
    return kExitUsageError;
  } catch (const InvalidArgument& e) {
    err << "scgp: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const GuardExceeded& e) {
    err << "scgp: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "scgp: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace scgp
