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

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gsurf/atlas.hpp"

namespace gsurf {

/// Proper subgraph relation between (graph, orbit-mask) pairs: some node
/// of `orbit_i` in `hi` maps onto a node of `orbit_j` in `hj`, and hi is
/// strictly smaller in nodes or edges. Masks covering every node give the
/// hatted relation.
inline bool is_subgraph(const SmallGraph& hi, unsigned orbit_i, const SmallGraph& hj,
                        unsigned orbit_j) {
  if (hi.order() > hj.order() || hi.edge_count() > hj.edge_count()) return false;
  if (hi.order() == hj.order() && hi.edge_count() == hj.edge_count()) return false;
  if (orbit_j == 0 || orbit_i == 0) return false;
  // orbit_j is a single automorphism orbit, so one node of it suffices.
  const int v = std::countr_zero(orbit_j);
  for (unsigned m = orbit_i; m; m &= m - 1) {
    if (embeds(hi, hj, std::countr_zero(m), v)) return true;
  }
  return false;
}

inline bool is_subgraph(const Atlas& atlas, const GraphletId& a, const GraphletId& b) {
  if ((a.sigma == 0) != (b.sigma == 0)) {
    throw std::invalid_argument("is_subgraph: mixed orbit and hatted ids");
  }
  const auto va = atlas.lookup(a);
  const auto vb = atlas.lookup(b);
  if (a.sigma == 0) {
    if (a.s > b.s || va.pattern->edge_count() > vb.pattern->edge_count()) return false;
    if (a.s == b.s && va.pattern->edge_count() == vb.pattern->edge_count()) return false;
    return embeds(va.graph(), vb.graph());
  }
  return is_subgraph(va.graph(), va.designated(), vb.graph(), vb.designated());
}

/// Graphlet lattice: the graphlets of families 1..t plus a null bottom.
class GraphletLattice {
 public:
  struct Element {
    std::optional<GraphletId> id;  // empty for the null element
    int layer = 0;
    bool clique = false;
  };

  GraphletMode mode() const { return mode_; }
  int t() const { return t_; }
  std::size_t size() const { return elements_.size(); }
  const Element& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<Element>& elements() const { return elements_; }

  bool precedes(std::size_t i, std::size_t j) const {
    return (below_[i][j / 64] >> (j % 64)) & 1u;
  }

  /// Hasse diagram edges (i, j): i is covered by j.
  const std::vector<std::pair<std::size_t, std::size_t>>& covers() const { return covers_; }

  int height() const {
    int h = 0;
    for (const auto& e : elements_) h = std::max(h, e.layer);
    return h;
  }

  std::size_t index_of(const GraphletId& id) const {
    for (std::size_t i = 1; i < elements_.size(); ++i)
      if (elements_[i].id == id) return i;
    throw std::out_of_range("graphlet not in lattice: " + to_string(id));
  }

 private:
  friend GraphletLattice build_lattice(const Atlas&, int, GraphletMode);
  void set(std::size_t i, std::size_t j) { below_[i][j / 64] |= std::uint64_t{1} << (j % 64); }

  GraphletMode mode_ = GraphletMode::orbit;
  int t_ = 0;
  std::vector<Element> elements_;
  std::vector<std::vector<std::uint64_t>> below_;  // below_[i] = {j : i < j}
  std::vector<std::pair<std::size_t, std::size_t>> covers_;
};

inline GraphletLattice build_lattice(const Atlas& atlas, int t, GraphletMode mode) {
  if (t < 1 || t > atlas.max_order()) throw std::out_of_range("build_lattice: bad t");
  GraphletLattice lat;
  lat.mode_ = mode;
  lat.t_ = t;
  lat.elements_.push_back({std::nullopt, 0, false});
  for (const auto& id : atlas.graphlets_up_to(t, mode)) {
    const Pattern& pat = atlas.pattern(id.s, id.p);
    lat.elements_.push_back({id, pat.edge_count() + 1, pat.is_clique()});
  }
  const std::size_t n = lat.elements_.size();
  const std::size_t words = (n + 63) / 64;
  lat.below_.assign(n, std::vector<std::uint64_t>(words, 0));
  for (std::size_t j = 1; j < n; ++j) lat.set(0, j);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j)
      if (i != j && is_subgraph(atlas, *lat.elements_[i].id, *lat.elements_[j].id)) lat.set(i, j);

  // i -< j iff i < j and no k with i < k < j.
  std::vector<std::vector<std::uint64_t>> above(n, std::vector<std::uint64_t>(words, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (lat.precedes(i, j)) above[j][i / 64] |= std::uint64_t{1} << (i % 64);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!lat.precedes(i, j)) continue;
      bool direct = true;
      for (std::size_t w = 0; w < words && direct; ++w) direct = (lat.below_[i][w] & above[j][w]) == 0;
      if (direct) lat.covers_.emplace_back(i, j);
    }
  }
  return lat;
}

namespace detail {
inline std::string dot_name(const GraphletLattice::Element& e) {
  if (!e.id) return "null";
  return "H_" + std::to_string(e.id->s) + "_" + std::to_string(e.id->p) + "_" +
         std::to_string(e.id->sigma);
}

inline const char* family_color(int s) {
  static const char* colors[] = {"gray", "cyan", "red", "green", "blue", "yellow", "orange", "violet"};
  return s >= 1 && s <= 7 ? colors[s] : colors[0];
}
}  // namespace detail

/// Hasse diagram in Graphviz DOT: one rank per layer, cliques drawn as
/// squares, colour by family, unfilled null element.
inline void export_hasse(const GraphletLattice& lat, std::ostream& out) {
  out << "digraph hasse {\n  rankdir=BT;\n  node [style=filled, shape=circle];\n";
  for (const auto& e : lat.elements()) {
    out << "  " << detail::dot_name(e);
    if (!e.id) {
      out << " [label=\"null\", style=solid];\n";
      continue;
    }
    out << " [label=\"" << to_string(*e.id) << "\", fillcolor=" << detail::family_color(e.id->s);
    if (e.clique) out << ", shape=square";
    out << "];\n";
  }
  for (int layer = 0; layer <= lat.height(); ++layer) {
    out << "  { rank=same;";
    for (const auto& e : lat.elements())
      if (e.layer == layer) out << ' ' << detail::dot_name(e) << ';';
    out << " }\n";
  }
  for (auto [i, j] : lat.covers()) {
    out << "  " << detail::dot_name(lat.element(i)) << " -> " << detail::dot_name(lat.element(j))
        << ";\n";
  }
  out << "}\n";
}

inline void export_hasse(const GraphletLattice& lat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  export_hasse(lat, out);
}

}  // namespace gsurf
