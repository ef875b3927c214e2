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


// Acceptance runner. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails. Tolerances are exact unless noted.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "test_support.hpp"

namespace {

using namespace gsurf;
using gsurf::testing::atlas5;
using gsurf::testing::engine5;

struct Outcome {
  enum Status { pass, fail, skip } status;
  std::string detail;
};

Outcome ok(std::string d = {}) { return {Outcome::pass, std::move(d)}; }
Outcome bad(std::string d) { return {Outcome::fail, std::move(d)}; }

IntMatrix from_rows(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (auto x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

template <class T>
std::string str(const T& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

const std::vector<testing::NamedGraph>& corpus() {
  static const auto c = testing::oracle_corpus(120);
  return c;
}

Outcome family_sizes() {
  static constexpr std::size_t hatted[] = {0, 1, 1, 2, 6, 21, 112, 853, 11117};
  static constexpr std::size_t orbit[] = {0, 1, 1, 3, 11, 58, 407, 4306, 72489};
  constexpr int max = 8;
  const auto atlas = Atlas::build(max);
  for (int s = 1; s <= max; ++s) {
    if (atlas.pattern_count(s) != hatted[s] || atlas.graphlet_count(s) != orbit[s])
      return bad("s=" + std::to_string(s) + ": " + std::to_string(atlas.pattern_count(s)) + "/" +
                 std::to_string(atlas.graphlet_count(s)));
  }
  return ok("s=1..8");
}

Outcome tetra_golden() {
  const IntMatrix golden = from_rows({{1, 0, 1, 0, 2, 4},
                                      {0, 1, 2, 4, 6, 12},
                                      {0, 0, 1, 0, 4, 12},
                                      {0, 0, 0, 1, 1, 3},
                                      {0, 0, 0, 0, 1, 6},
                                      {0, 0, 0, 0, 0, 1}});
  const auto u = build_U(atlas5(), 4, GraphletMode::hatted);
  if (u != golden) return bad("hatted U_4 differs");
  return ok("36 cells");
}

Outcome sparsity() {
  const auto u = build_U(atlas5(), 5, GraphletMode::orbit);
  const auto h = build_U(atlas5(), 5, GraphletMode::hatted);
  const auto ui = inverse_U(atlas5(), 5, GraphletMode::orbit);
  const auto hi = inverse_U(atlas5(), 5, GraphletMode::hatted);
  const std::string d = "nnz(U_5)=" + std::to_string(u.nnz()) + " on " + std::to_string(u.rows()) +
                        ", nnz(hatted U_5)=" + std::to_string(h.nnz()) + " on " + std::to_string(h.rows());
  if (u.nnz() != 744 || u.rows() != 58 || h.nnz() != 164 || h.rows() != 21) return bad(d);
  if (!ui.same_pattern(u) || !hi.same_pattern(h)) return bad("inverse pattern differs; " + d);
  return ok(d);
}

Outcome involution() {
  const auto atlas = Atlas::build(6);
  auto check = [&](int s, GraphletMode mode) {
    const auto u = build_U(atlas, s, mode);
    const auto lambda = sign_diagonal(atlas, atlas.graphlets(s, mode));
    IntMatrix lul = u;
    for (std::size_t i = 0; i < u.rows(); ++i)
      for (std::size_t j = 0; j < u.cols(); ++j) lul(i, j) *= lambda[i] * lambda[j];
    return lul * u == IntMatrix::identity(u.rows());
  };
  for (int s = 2; s <= 6; ++s)
    if (!check(s, GraphletMode::hatted)) return bad("hatted s=" + std::to_string(s));
  for (int s = 2; s <= 5; ++s)
    if (!check(s, GraphletMode::orbit)) return bad("orbit s=" + std::to_string(s));
  return ok("hatted s=2..6, orbit s=2..5");
}

Outcome table_two() {
  const auto m = build_inter_family(atlas5(), 4, GraphletMode::orbit);
  const IntMatrix w24 = from_rows({{1, 3, 1, 2, 1, 2, 3, 2, 2, 3, 3}});
  const IntMatrix w34 = from_rows({{2, 0, 1, 1, 2, 1, 0, 2, 2, 0, 0},
                                   {0, 3, 0, 1, 0, 0, 2, 1, 0, 1, 0},
                                   {0, 0, 0, 0, 0, 1, 1, 0, 1, 2, 3}});
  int mismatches = 0;
  const auto a = m.w_block(2, 4);
  const auto b = m.w_block(3, 4);
  for (std::size_t j = 0; j < 11; ++j) {
    mismatches += a(0, j) != w24(0, j);
    for (std::size_t i = 0; i < 3; ++i) mismatches += b(i, j) != w34(i, j);
  }
  if (mismatches) return bad(std::to_string(mismatches) + " of 44 entries differ");
  return ok("44 entries");
}

Outcome oracle_equivalence() {
  std::size_t vertices = 0;
  for (const auto& [name, g] : corpus()) {
    const auto r = engine5().run(g);
    const auto o = brute_net(atlas5(), g, 5);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      ++vertices;
      for (std::size_t i = 0; i < r.net.width(); ++i)
        if (r.net.at(v, i) != o.per_vertex.at(v, i))
          return bad(name + " v=" + std::to_string(v) + " " + str(r.net.order()[i]));
    }
  }
  return ok(std::to_string(corpus().size()) + " graphs, " + std::to_string(vertices) + " vertices, 75 graphlets");
}

Outcome option_invariance() {
  auto graphs = corpus();
  graphs.push_back({"zachary", testing::zachary()});
  for (const auto& [name, g] : graphs) {
    const auto base = engine5().run(g, {.filters = false, .reduced = false});
    for (bool f : {false, true})
      for (bool r : {false, true}) {
        const auto out = engine5().run(g, {.filters = f, .reduced = r});
        if (!(out.net == base.net)) return bad(name + " filters=" + str(f) + " reduced=" + str(r));
      }
  }
  return ok(std::to_string(graphs.size()) + " graphs, 4 option settings");
}

// Counts connected induced s-subsets through v by pattern, without orbits.
std::vector<std::int64_t> hatted_through(const SourceGraph& g, VertexId v, int s) {
  std::vector<std::int64_t> out(atlas5().pattern_count(s), 0);
  std::vector<VertexId> others;
  for (VertexId w = 0; w < g.vertex_count(); ++w)
    if (w != v) others.push_back(w);
  if (others.size() + 1 < static_cast<std::size_t>(s)) return out;
  std::vector<bool> pick(others.size(), false);
  std::fill(pick.end() - (s - 1), pick.end(), true);
  do {
    std::vector<VertexId> nodes{v};
    for (std::size_t k = 0; k < others.size(); ++k)
      if (pick[k]) nodes.push_back(others[k]);
    SmallGraph h(s);
    for (int a = 0; a < s; ++a)
      for (int b = a + 1; b < s; ++b)
        if (g.adjacent(nodes[a], nodes[b])) h.add_edge(a, b);
    if (h.connected()) ++out[atlas5().classify(h).p - 1];
  } while (std::next_permutation(pick.begin(), pick.end()));
  return out;
}

Outcome orbit_decomposition() {
  for (const auto& [name, g] : corpus()) {
    const auto hat = aggregate_orbits(atlas5(), engine5().run(g).net);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      for (int s = 1; s <= 5; ++s) {
        const auto direct = hatted_through(g, v, s);
        for (std::size_t p = 0; p < direct.size(); ++p)
          if (hat.at(v, GraphletId{s, static_cast<int>(p + 1), 0}) != direct[p])
            return bad(name + " v=" + std::to_string(v) + " H(" + std::to_string(s) + "," + std::to_string(p + 1) + ")");
      }
  }
  return ok("orbit sums equal per-vertex pattern counts, s=1..5");
}

Outcome example_one() {
  const auto& m = engine5().matrices();
  std::size_t checked = 0;
  for (const auto& [name, g] : corpus()) {
    const auto gross = brute_gross(atlas5(), g, 4);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const std::int64_t d = g.degree(v);
      const std::int64_t leaf = gross.per_vertex.at(v, m.family_offset[3]);
      const std::int64_t tri = gross.per_vertex.at(v, m.family_offset[3] + 2);
      const std::int64_t lhs = gross.per_vertex.at(v, GraphletId{4, 2, 2});
      if (lhs != d * leaf - leaf - 2 * tri) return bad(name + " v=" + std::to_string(v));
      if (engine5().up_rec(4, g, v)[3] != lhs) return bad("engine gross, " + name);
      ++checked;
    }
  }
  return ok(std::to_string(checked) + " vertices");
}

Outcome zachary() {
  const auto g = testing::zachary();
  if (g.vertex_count() != 34 || g.edge_count() != 78)
    return bad("n=" + std::to_string(g.vertex_count()) + " m=" + std::to_string(g.edge_count()));
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = engine5().run(g);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto o = brute_net(atlas5(), g, 5);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    for (std::size_t i = 0; i < r.net.width(); ++i)
      if (r.net.at(v, i) != o.per_vertex.at(v, i)) return bad("oracle mismatch at label " + g.label(v));
  const auto col = r.net.index_of({3, 2, 1});
  std::vector<VertexId> by_degree(g.vertex_count());
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(), [&](VertexId a, VertexId b) { return g.degree(a) > g.degree(b); });
  std::vector<std::int64_t> tri(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) tri[v] = r.net.at(v, col);
  std::vector<std::int64_t> ranked = tri;
  std::sort(ranked.rbegin(), ranked.rend());
  const auto h0 = tri[by_degree[0]], h1 = tri[by_degree[1]];
  const std::string d = "hubs " + g.label(by_degree[0]) + "," + g.label(by_degree[1]) + " triangles " +
                        std::to_string(h0) + "," + std::to_string(h1) + "; engine " + std::to_string(secs) + " s";
  if (std::min(h0, h1) != ranked[1] || std::max(h0, h1) != ranked[0] || ranked[1] == ranked[2]) return bad(d);
  if (secs >= 1.0) return bad("too slow: " + d);
  return ok(d);
}

Outcome notredame() {
  if (!std::getenv("GSURF_NOTREDAME"))
    return {Outcome::skip, "BLOCKED: dataset not available offline; run notredame_case_study with GSURF_NOTREDAME=<path.mtx>"};
  return {Outcome::skip, "covered by the notredame_case_study test"};
}

Outcome filter_soundness() {
  std::size_t flagged = 0;
  for (const auto& [name, g] : corpus()) {
    const auto r = engine5().run(g, {.record_proofs = true});
    const auto o = brute_net(atlas5(), g, 5);
    std::size_t recorded = 0;
    for (const auto& fam : r.stats.families)
      for (auto z : fam.zero_flags) recorded += z;
    if (recorded != r.mask.proofs.size()) return bad(name + ": proof log incomplete");
    for (const auto& p : r.mask.proofs) {
      ++flagged;
      if (o.per_vertex.at(p.vertex, p.graphlet) != 0)
        return bad(name + " v=" + std::to_string(p.vertex) + " " + str(r.net.order()[p.graphlet]));
    }
  }
  return ok(std::to_string(flagged) + " flagged entries, 0 false zeros");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"family sizes", family_sizes},
      {"hatted U_4 golden", tetra_golden},
      {"sparsity counts", sparsity},
      {"involution", involution},
      {"W_{2,4}/W_{3,4} golden block", table_two},
      {"oracle equivalence", oracle_equivalence},
      {"option invariance", option_invariance},
      {"orbit decomposition", orbit_decomposition},
      {"interior path identity", example_one},
      {"zachary karate club", zachary},
      {"notredame case study", notredame},
      {"filter soundness", filter_soundness},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = bad(std::string("exception: ") + e.what());
    }
    const char* tag = out.status == Outcome::pass ? "PASS" : out.status == Outcome::fail ? "FAIL" : "SKIP";
    failures += out.status == Outcome::fail;
    std::cout << tag << "  " << name;
    if (!out.detail.empty()) std::cout << "  (" << out.detail << ")";
    std::cout << '\n';
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " failing\n" : "acceptance: all passing\n");
  return failures ? 1 : 0;
}
