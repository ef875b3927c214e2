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

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gsurf {

using VertexId = std::uint32_t;

/// Malformed input; carries the 1-based line number when known.
class GraphFormatError : public std::runtime_error {
 public:
  GraphFormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Simple undirected graph in compressed adjacency form. Immutable once
/// built; neighbor lists are strictly increasing.
class SourceGraph {
 public:
  SourceGraph() : offsets_(1, 0) {}

  /// Builds from an arbitrary edge list: symmetrizes, drops self-loops and
  /// collapses duplicates. Labels default to the decimal internal ids.
  static SourceGraph from_edges(std::size_t n,
                                std::span<const std::pair<VertexId, VertexId>> edges,
                                std::vector<std::string> labels = {}) {
    SourceGraph g;
    std::vector<std::pair<VertexId, VertexId>> arcs;
    arcs.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
      if (u == v) continue;
      arcs.emplace_back(u, v);
      arcs.emplace_back(v, u);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    g.offsets_.assign(n + 1, 0);
    for (auto [u, v] : arcs) ++g.offsets_[u + 1];
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.neighbors_.reserve(arcs.size());
    for (auto [u, v] : arcs) g.neighbors_.push_back(v);
    if (labels.empty()) {
      labels.reserve(n);
      for (std::size_t v = 0; v < n; ++v) labels.push_back(std::to_string(v));
    } else if (labels.size() != n) {
      throw std::invalid_argument("label count differs from vertex count");
    }
    g.labels_ = std::move(labels);
    return g;
  }

  static SourceGraph from_edges(
      std::size_t n, std::initializer_list<std::pair<VertexId, VertexId>> edges) {
    return from_edges(n, std::span(edges.begin(), edges.size()));
  }

  std::size_t vertex_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }

  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  bool adjacent(VertexId u, VertexId v) const {
    auto nb = neighbors(degree(u) <= degree(v) ? u : v);
    return std::binary_search(nb.begin(), nb.end(), degree(u) <= degree(v) ? v : u);
  }

  const std::string& label(VertexId v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (std::size_t v = 0; v < vertex_count(); ++v)
      d = std::max(d, degree(static_cast<VertexId>(v)));
    return d;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> neighbors_;
  std::vector<std::string> labels_;
};

/// What to do with input the graph model cannot hold. With a flag off the
/// loader rejects such input instead of normalizing it.
struct LoadOptions {
  bool drop_self_loops = true;
  bool collapse_duplicates = true;
};

namespace detail {

class EdgeCollector {
 public:
  explicit EdgeCollector(LoadOptions options) : options_(options) {}

  void add(VertexId u, VertexId v, std::size_t line) {
    if (u == v) {
      if (!options_.drop_self_loops) throw GraphFormatError("self-loop", line);
      return;
    }
    edges_.push_back({std::min(u, v), std::max(u, v), line});
  }

  SourceGraph finish(std::size_t n, std::vector<std::string> labels) {
    if (!options_.collapse_duplicates) {
      auto sorted = edges_;
      std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v, a.line) < std::tie(b.u, b.v, b.line);
      });
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].u == sorted[i - 1].u && sorted[i].v == sorted[i - 1].v) {
          throw GraphFormatError("duplicate edge", sorted[i].line);
        }
      }
    }
    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(edges_.size());
    for (const Edge& e : edges_) pairs.emplace_back(e.u, e.v);
    return SourceGraph::from_edges(n, pairs, std::move(labels));
  }

 private:
  struct Edge {
    VertexId u, v;
    std::size_t line;
  };
  LoadOptions options_;
  std::vector<Edge> edges_;
};

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return in;
}

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// Edge list: one edge per line as two whitespace-separated tokens, '#'
/// comments. Tokens are arbitrary labels mapped to dense ids in order of
/// first appearance. Extra columns (weights) are ignored.
inline SourceGraph read_edge_list(std::istream& in, LoadOptions options = {}) {
  std::unordered_map<std::string, VertexId> ids;
  std::vector<std::string> labels;
  detail::EdgeCollector edges(options);
  auto intern = [&](const std::string& token) {
    auto [it, fresh] = ids.emplace(token, static_cast<VertexId>(labels.size()));
    if (fresh) labels.push_back(token);
    return it->second;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a) || a[0] == '#') continue;
    if (!(ls >> b) || b[0] == '#') {
      throw GraphFormatError("expected two vertex tokens", line_no);
    }
    const VertexId u = intern(a);
    const VertexId v = intern(b);
    edges.add(u, v, line_no);
  }
  const std::size_t n = labels.size();
  return edges.finish(n, std::move(labels));
}

inline SourceGraph load_edge_list(const std::filesystem::path& path,
                                  LoadOptions options = {}) {
  auto in = detail::open_input(path);
  return read_edge_list(in, options);
}

/// Matrix Market coordinate matrix read as a graph on its n = rows = cols
/// indices. Values are ignored, directed entries are symmetrized and the
/// diagonal is dropped. Labels are the 1-based indices.
inline SourceGraph read_matrix_market(std::istream& in, LoadOptions options = {}) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw GraphFormatError("empty Matrix Market input");
  ++line_no;
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || detail::lowercase(object) != "matrix") {
    throw GraphFormatError("missing %%MatrixMarket matrix header", line_no);
  }
  format = detail::lowercase(format);
  field = detail::lowercase(field);
  symmetry = detail::lowercase(symmetry);
  if (format != "coordinate") throw GraphFormatError("only coordinate format is supported", line_no);
  if (field != "pattern" && field != "real" && field != "integer") {
    throw GraphFormatError("unsupported field '" + field + "'", line_no);
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw GraphFormatError("unsupported symmetry '" + symmetry + "'", line_no);
  }
  std::size_t rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) throw GraphFormatError("missing size line", line_no);
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz)) throw GraphFormatError("malformed size line", line_no);
    break;
  }
  if (rows != cols) {
    throw GraphFormatError("matrix is " + std::to_string(rows) + "x" +
                               std::to_string(cols) + ", expected square",
                           line_no);
  }
  detail::EdgeCollector edges(options);
  std::size_t seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    std::size_t i = 0, j = 0;
    if (!(es >> i >> j)) throw GraphFormatError("malformed entry", line_no);
    if (i < 1 || j < 1 || i > rows || j > cols) {
      throw GraphFormatError("index out of declared bounds", line_no);
    }
    edges.add(static_cast<VertexId>(i - 1), static_cast<VertexId>(j - 1), line_no);
    ++seen;
  }
  if (seen != nnz) {
    throw GraphFormatError("expected " + std::to_string(nnz) + " entries, found " +
                           std::to_string(seen));
  }
  std::vector<std::string> labels;
  labels.reserve(rows);
  for (std::size_t v = 1; v <= rows; ++v) labels.push_back(std::to_string(v));
  return edges.finish(rows, std::move(labels));
}

inline SourceGraph load_matrix_market(const std::filesystem::path& path,
                                      LoadOptions options = {}) {
  auto in = detail::open_input(path);
  return read_matrix_market(in, options);
}

/// Picks the reader by extension: .mtx is Matrix Market, anything else an
/// edge list.
inline SourceGraph load_graph(const std::filesystem::path& path,
                              LoadOptions options = {}) {
  if (detail::lowercase(path.extension().string()) == ".mtx") {
    return load_matrix_market(path, options);
  }
  return load_edge_list(path, options);
}

/// Writes each edge once, by label. Isolated vertices are not representable.
inline void write_edge_list(std::ostream& out, const SourceGraph& g) {
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v : g.neighbors(u)) {
      if (u < v) out << g.label(u) << ' ' << g.label(v) << '\n';
    }
  }
}

/// f(K_2 | G)(v) for every v.
inline std::vector<std::size_t> degree_map(const SourceGraph& g) {
  std::vector<std::size_t> d(g.vertex_count());
  for (VertexId v = 0; v < d.size(); ++v) d[v] = g.degree(v);
  return d;
}

}  // namespace gsurf
