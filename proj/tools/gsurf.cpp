// Copyright 2026 The gsurf Authors
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


// gsurf command-line tool: atlas, matrices, count, verify, hasse.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsurf/gsurf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerification = 2, kIo = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path cache_dir() {
  if (const char* dir = std::getenv("GSURF_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "gsurf";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "gsurf";
  return ".gsurf-cache";
}

std::string u_tilde_name(const gsurf::Atlas& atlas, int t, gsurf::GraphletMode mode) {
  return std::string("U_tilde-") + gsurf::to_string(mode) + "-t" + std::to_string(t) + "-" +
         atlas.hash_hex() + ".txt";
}

gsurf::MatrixHeader header_for(const gsurf::Atlas& atlas, const gsurf::InterFamily& m,
                               std::string kind) {
  return {std::move(kind), atlas.hash_hex(), m.t, m.mode, m.order};
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  if (!out) throw IoError("write failed for " + path.string());
}

gsurf::InterFamily load_matrix_file(const gsurf::Atlas& atlas, int t, gsurf::GraphletMode mode,
                                    const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file " + path.string());
  auto [header, u_tilde] = gsurf::read_matrix(in);
  if (header.kind != "U_tilde") throw UsageError(path.string() + " does not hold a U_tilde matrix");
  if (header.atlas_hash != atlas.hash_hex()) {
    throw UsageError(path.string() + " was built from a different atlas (" + header.atlas_hash + ")");
  }
  if (header.t != t || header.mode != mode) {
    throw UsageError(path.string() + " holds t=" + std::to_string(header.t) + " " +
                     gsurf::to_string(header.mode) + " matrices");
  }
  return gsurf::inter_family_from_u_tilde(atlas, t, mode, std::move(u_tilde));
}

// Matrices from an explicit file, the on-disk cache, or a fresh build that
// is then cached.
gsurf::InterFamily obtain_matrices(const gsurf::Atlas& atlas, int t, gsurf::GraphletMode mode,
                                   const std::string& explicit_file) {
  if (!explicit_file.empty()) return load_matrix_file(atlas, t, mode, explicit_file);
  const fs::path cached = cache_dir() / u_tilde_name(atlas, t, mode);
  if (fs::exists(cached)) {
    try {
      return load_matrix_file(atlas, t, mode, cached);
    } catch (const std::exception& e) {
      std::cerr << "warning: ignoring cached matrices (" << e.what() << ")\n";
    }
  }
  gsurf::InterFamily m = gsurf::build_inter_family(atlas, t, mode);
  try {
    write_file(cached, [&](std::ostream& out) {
      gsurf::write_matrix(out, header_for(atlas, m, "U_tilde"), m.u_tilde);
    });
  } catch (const std::exception& e) {
    std::cerr << "warning: could not cache matrices: " << e.what() << '\n';
  }
  return m;
}

gsurf::SourceGraph read_graph(const std::string& path, const std::string& format) {
  if (!fs::exists(path)) throw IoError("input not found: " + path);
  try {
    if (format == "mtx") return gsurf::load_matrix_market(path);
    if (format == "edgelist") return gsurf::load_edge_list(path);
    return gsurf::load_graph(path);
  } catch (const gsurf::GraphFormatError& e) {
    throw IoError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

struct AtlasArgs {
  int max = 5;
  std::string out;
};

int cmd_atlas(const AtlasArgs& a) {
  const auto atlas = gsurf::Atlas::build(a.max);
  std::cout << "s\tpatterns\tgraphlets\n";
  for (int s = 1; s <= a.max; ++s)
    std::cout << s << '\t' << atlas.pattern_count(s) << '\t' << atlas.graphlet_count(s) << '\n';
  std::cout << "residual ties: " << atlas.residual_ties().size() << '\n';
  std::cout << "atlas hash: " << atlas.hash_hex() << '\n';
  if (!a.out.empty()) write_file(a.out, [&](std::ostream& out) { atlas.write(out); });
  return kOk;
}

struct MatricesArgs {
  int t = 5;
  std::string mode = "orbit";
  std::string out_dir;
};

int cmd_matrices(const MatricesArgs& a) {
  const auto mode = gsurf::parse_mode(a.mode);
  if (a.t >= 7) std::cerr << "warning: t = " << a.t << " needs every pair of a large family; this is slow\n";
  const auto atlas = gsurf::Atlas::build(a.t);
  gsurf::InterFamily m;
  try {
    m = gsurf::build_inter_family(atlas, a.t, mode);
  } catch (const gsurf::ConversionError& e) {
    throw VerificationFailure(e.what());
  }
  bool ok = true;
  const char* hat = mode == gsurf::GraphletMode::hatted ? "hat" : "";
  for (int s = 1; s <= a.t; ++s) {
    const auto det = gsurf::determinant(m.u[s]);
    const bool same = m.u[s].same_pattern(m.u_inv[s]);
    ok = ok && det == 1 && same;
    std::cout << "U" << hat << "_" << s << ": " << m.u[s].rows() << "x" << m.u[s].cols()
              << " nnz = " << m.u[s].nnz() << ", nnz(inverse) = " << m.u_inv[s].nnz()
              << ", det = " << det << ", involution verified, inverse pattern "
              << (same ? "matches" : "DIFFERS") << '\n';
  }
  std::cout << "U_tilde: " << m.size() << "x" << m.size() << " nnz = " << m.u_tilde.nnz() << '\n';
  std::cout << "W_tilde: " << m.size() << "x" << m.size() << " nnz = " << m.w_tilde.nnz() << '\n';

  const fs::path dir = a.out_dir.empty() ? cache_dir() : fs::path(a.out_dir);
  write_file(dir / u_tilde_name(atlas, a.t, mode), [&](std::ostream& out) {
    gsurf::write_matrix(out, header_for(atlas, m, "U_tilde"), m.u_tilde);
  });
  const std::string suffix = std::string("-") + gsurf::to_string(mode) + "-t" + std::to_string(a.t) + ".txt";
  write_file(dir / ("W_tilde" + suffix), [&](std::ostream& out) {
    gsurf::write_matrix(out, header_for(atlas, m, "W_tilde"), m.w_tilde);
  });
  for (int s = 1; s <= a.t; ++s) {
    auto fam = atlas.graphlets(s, mode);
    gsurf::MatrixHeader h{"U_" + std::to_string(s), atlas.hash_hex(), s, mode, fam};
    write_file(dir / ("U_" + std::to_string(s) + suffix),
               [&](std::ostream& out) { gsurf::write_matrix(out, h, m.u[s]); });
    h.kind = "U_inv_" + std::to_string(s);
    write_file(dir / ("U_inv_" + std::to_string(s) + suffix),
               [&](std::ostream& out) { gsurf::write_matrix(out, h, m.u_inv[s]); });
  }
  std::cout << "written to " << dir.string() << '\n';
  if (!ok) throw VerificationFailure("unimodularity or sparsity check failed");
  return kOk;
}

struct CountArgs {
  std::string input;
  std::string format = "auto";
  int t = 5;
  bool no_filters = false;
  bool no_reduced = false;
  std::string out;
  std::string json_out;
  std::string stats_out;
  unsigned workers = 1;
  std::string matrices;
};

template <class Count>
void emit_count(const CountArgs& a, const gsurf::SourceGraph& g, const gsurf::Engine& engine,
                const gsurf::EngineOptions& options, const gsurf::Provenance& prov) {
  const auto result = engine.run<Count>(g, options);
  if (a.out.empty() || a.out == "-") {
    gsurf::write_csv(std::cout, g, result.net, prov);
  } else {
    write_file(a.out, [&](std::ostream& out) { gsurf::write_csv(out, g, result.net, prov); });
  }
  if (!a.json_out.empty()) {
    write_file(a.json_out, [&](std::ostream& out) {
      out << gsurf::table_json(g, result.net, prov).dump(1) << '\n';
    });
  }
  if (!a.stats_out.empty()) {
    write_file(a.stats_out, [&](std::ostream& out) {
      out << gsurf::stats_json(result.stats, result.net.order(), prov).dump(2) << '\n';
    });
  }
  for (const auto& f : result.stats.families) {
    std::cerr << "family " << f.s << ":";
    for (auto k : gsurf::kSystemKinds) std::cerr << ' ' << gsurf::to_string(k) << '=' << f.percent(k) << '%';
    std::cerr << '\n';
  }
}

int cmd_count(const CountArgs& a) {
  const auto g = read_graph(a.input, a.format);
  const auto atlas = gsurf::Atlas::build(a.t);
  const gsurf::Engine engine(atlas, obtain_matrices(atlas, a.t, gsurf::GraphletMode::orbit, a.matrices));
  gsurf::EngineOptions options;
  options.filters = !a.no_filters;
  options.reduced = !a.no_reduced;
  options.workers = a.workers;

  gsurf::Provenance prov;
  prov.atlas_hash = atlas.hash_hex();
  prov.config = {{"command", "count"},  {"input", a.input},         {"t", a.t},
                 {"filters", options.filters}, {"reduced", options.reduced}, {"workers", a.workers},
                 {"vertices", g.vertex_count()}, {"edges", g.edge_count()}};
  std::cerr << "graph: n = " << g.vertex_count() << ", m = " << g.edge_count() << '\n';
  try {
    emit_count<std::int64_t>(a, g, engine, options, prov);
  } catch (const gsurf::CountOverflow& e) {
    std::cerr << "note: " << e.what() << "; recounting with arbitrary precision\n";
    prov.config["precision"] = "arbitrary";
    emit_count<gsurf::BigCount>(a, g, engine, options, prov);
  }
  return kOk;
}

struct VerifyArgs {
  std::string input;
  std::string format = "auto";
  int t = 5;
  std::string matrices;
  double budget = gsurf::kDefaultOracleBudget;
};

int cmd_verify(const VerifyArgs& a) {
  const auto g = read_graph(a.input, a.format);
  const auto atlas = gsurf::Atlas::build(a.t);
  gsurf::RunResult<std::int64_t> result;
  try {
    const gsurf::Engine engine(atlas, obtain_matrices(atlas, a.t, gsurf::GraphletMode::orbit, a.matrices));
    gsurf::EngineOptions options;
    options.record_proofs = true;
    result = engine.run(g, options);
  } catch (const gsurf::ConversionError& e) {
    throw VerificationFailure(std::string("matrices rejected: ") + e.what());
  } catch (const std::logic_error& e) {
    throw VerificationFailure(std::string("engine failed: ") + e.what());
  }
  gsurf::OracleResult oracle;
  try {
    oracle = gsurf::brute_net(atlas, g, a.t, a.budget);
  } catch (const gsurf::OracleBudgetExceeded& e) {
    throw UsageError(e.what());
  }

  const auto& order = result.net.order();
  std::optional<std::string> first_diff;
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::set<std::int64_t> values;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      const auto e = result.net.at(v, i), o = oracle.per_vertex.at(v, i);
      values.insert(o);
      if (e != o) {
        ++mismatches;
        if (!first_diff) {
          first_diff = "vertex " + g.label(static_cast<gsurf::VertexId>(v)) + ", " +
                       gsurf::to_string(order[i]) + ": engine " + std::to_string(e) + ", oracle " +
                       std::to_string(o);
        }
      }
    }
    if (values.empty()) continue;
    std::cout << "f(" << gsurf::to_string(order[i]) << ")(v)";
    if (values.size() == 1) {
      std::cout << " = " << *values.begin() << " at every vertex\n";
    } else {
      std::cout << " in [" << *values.begin() << ", " << *values.rbegin() << "]\n";
    }
  }
  for (const auto& p : result.mask.proofs) {
    if (oracle.per_vertex.at(p.vertex, p.graphlet) != 0) {
      ++mismatches;
      if (!first_diff) first_diff = "filter flagged nonzero " + gsurf::to_string(order[p.graphlet]);
    }
  }
  if (mismatches > 0) {
    std::cout << "FAIL: " << mismatches << " mismatches; first at " << *first_diff << '\n';
    return kVerification;
  }
  std::cout << "PASS: engine equals oracle on " << g.vertex_count() << " vertices x " << order.size()
            << " graphlets; " << result.mask.proofs.size() << " filter zeros confirmed\n";
  return kOk;
}

struct HasseArgs {
  int t = 5;
  std::string mode = "orbit";
  std::string out;
};

int cmd_hasse(const HasseArgs& a) {
  const auto atlas = gsurf::Atlas::build(a.t);
  const auto lattice = gsurf::build_lattice(atlas, a.t, gsurf::parse_mode(a.mode));
  if (a.out.empty() || a.out == "-") {
    gsurf::export_hasse(lattice, std::cout);
  } else {
    write_file(a.out, [&](std::ostream& out) { gsurf::export_hasse(lattice, out); });
  }
  std::cerr << "nodes " << lattice.size() << ", covering edges " << lattice.covers().size()
            << ", height " << lattice.height() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gsurf: per-vertex graphlet frequency maps"};
  app.require_subcommand(1);

  AtlasArgs atlas_args;
  auto* atlas = app.add_subcommand("atlas", "enumerate graphlet families and report their sizes");
  atlas->add_option("--max", atlas_args.max, "largest family")->required()->check(CLI::Range(1, 8));
  atlas->add_option("--out", atlas_args.out, "write the atlas export here");

  MatricesArgs matrices_args;
  auto* matrices = app.add_subcommand("matrices", "build and verify conversion matrices");
  matrices->add_option("--t", matrices_args.t, "largest family")->required()->check(CLI::Range(1, 7));
  matrices->add_option("--mode", matrices_args.mode, "orbit or hatted")
      ->check(CLI::IsMember({"orbit", "hatted"}));
  matrices->add_option("--out-dir", matrices_args.out_dir, "output directory (default: cache)");

  CountArgs count_args;
  auto* count = app.add_subcommand("count", "net graphlet frequency maps of a graph");
  count->add_option("--input", count_args.input, "edge list or .mtx file")->required();
  count->add_option("--format", count_args.format, "auto, edgelist or mtx")
      ->check(CLI::IsMember({"auto", "edgelist", "mtx"}));
  count->add_option("--t", count_args.t, "largest family")->check(CLI::Range(2, 5));
  count->add_flag("--no-filters", count_args.no_filters, "disable zero filters");
  count->add_flag("--no-reduced", count_args.no_reduced, "disable reduced systems");
  count->add_option("--out", count_args.out, "CSV output (default stdout)");
  count->add_option("--json", count_args.json_out, "columnar JSON output");
  count->add_option("--stats", count_args.stats_out, "stats JSON output")
      ->expected(0, 1)
      ->default_str("gsurf_stats.json");
  count->add_option("--workers", count_args.workers, "worker threads")->check(CLI::Range(1u, 1024u));
  count->add_option("--matrices", count_args.matrices, "U_tilde matrix file");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "compare the engine with the brute-force oracle");
  verify->add_option("--input", verify_args.input, "edge list or .mtx file")->required();
  verify->add_option("--format", verify_args.format, "auto, edgelist or mtx")
      ->check(CLI::IsMember({"auto", "edgelist", "mtx"}));
  verify->add_option("--t", verify_args.t, "largest family")->check(CLI::Range(2, 5));
  verify->add_option("--matrices", verify_args.matrices, "U_tilde matrix file");
  verify->add_option("--budget", verify_args.budget, "oracle limit on sum of C(n,s)");

  HasseArgs hasse_args;
  auto* hasse = app.add_subcommand("hasse", "export the lattice Hasse diagram as DOT");
  hasse->add_option("--t", hasse_args.t, "largest family")->check(CLI::Range(1, 7));
  hasse->add_option("--mode", hasse_args.mode, "orbit or hatted")->check(CLI::IsMember({"orbit", "hatted"}));
  hasse->add_option("--out", hasse_args.out, "DOT output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (count->count("--stats") && count_args.stats_out.empty()) count_args.stats_out = "gsurf_stats.json";

  try {
    if (*atlas) return cmd_atlas(atlas_args);
    if (*matrices) return cmd_matrices(matrices_args);
    if (*count) return cmd_count(count_args);
    if (*verify) return cmd_verify(verify_args);
    if (*hasse) return cmd_hasse(hasse_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerification;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerification;
  }
  return kUsage;
}
