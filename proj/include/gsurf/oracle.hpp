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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsurf/atlas.hpp"
#include "gsurf/frequency.hpp"
#include "gsurf/graph.hpp"

namespace gsurf {

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brute-force counts. Shares only the atlas and canonical labelling with
/// the engine.
struct OracleResult {
  FrequencyTable<std::int64_t> per_vertex;  // orbit-specific order, families 1..t
  std::vector<GraphletId> patterns;         // hatted ids, families 1..t
  std::vector<std::int64_t> global;         // one count per pattern

  std::int64_t global_of(const GraphletId& id) const {
    for (std::size_t i = 0; i < patterns.size(); ++i)
      if (patterns[i].s == id.s && patterns[i].p == id.p) return global[i];
    throw std::out_of_range("pattern not in oracle result: " + to_string(id));
  }
};

inline constexpr double kDefaultOracleBudget = 5e7;

namespace detail {

inline void check_oracle_budget(const SourceGraph& g, int t, double budget) {
  double total = 0, binom = 1;
  const double n = static_cast<double>(g.vertex_count());
  for (int s = 1; s <= t; ++s) {
    binom = binom * (n - s + 1) / s;
    total += std::max(binom, 0.0);
  }
  if (total > budget) {
    throw OracleBudgetExceeded("oracle budget exceeded: sum of C(n,s) = " + std::to_string(total) +
                               " > " + std::to_string(budget));
  }
}

inline OracleResult empty_oracle_result(const Atlas& atlas, const SourceGraph& g, int t) {
  if (t < 1 || t > atlas.max_order()) throw std::out_of_range("oracle: t outside atlas");
  OracleResult r;
  r.per_vertex = FrequencyTable<std::int64_t>(atlas.graphlets_up_to(t, GraphletMode::orbit),
                                              g.vertex_count());
  r.patterns = atlas.graphlets_up_to(t, GraphletMode::hatted);
  r.global.assign(r.patterns.size(), 0);
  return r;
}

}  // namespace detail

/// Net (induced) counts by definition: every connected vertex subset
/// of size <= t is visited exactly once (ESU), its induced graph classified,
/// and each member credited with its orbit.
inline OracleResult brute_net(const Atlas& atlas, const SourceGraph& g, int t,
                              double budget = kDefaultOracleBudget) {
  detail::check_oracle_budget(g, t, budget);
  OracleResult r = detail::empty_oracle_result(atlas, g, t);
  const auto& order = r.per_vertex.order();
  auto column = [&](int s, int p, int sigma) {
    return static_cast<std::size_t>(std::lower_bound(order.begin(), order.end(), GraphletId{s, p, sigma}) -
                                    order.begin());
  };
  auto pattern_slot = [&](int s, int p) {
    return static_cast<std::size_t>(
        std::lower_bound(r.patterns.begin(), r.patterns.end(), GraphletId{s, p, 0}) - r.patterns.begin());
  };

  std::vector<VertexId> subset;
  auto record = [&]() {
    const int k = static_cast<int>(subset.size());
    SmallGraph h(k);
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        if (g.adjacent(subset[a], subset[b])) h.add_edge(a, b);
    const Classification c = atlas.classify(h);
    ++r.global[pattern_slot(k, c.p)];
    for (int a = 0; a < k; ++a) ++r.per_vertex.at(subset[a], column(k, c.p, c.orbit_of[a]));
  };

  auto in_subset_or_near = [&](VertexId u) {
    for (VertexId x : subset)
      if (x == u || g.adjacent(x, u)) return true;
    return false;
  };

  auto extend = [&](auto& self, std::vector<VertexId> ext, VertexId root) -> void {
    record();
    if (static_cast<int>(subset.size()) == t) return;
    while (!ext.empty()) {
      const VertexId w = ext.back();
      ext.pop_back();
      std::vector<VertexId> next = ext;
      for (VertexId u : g.neighbors(w)) {
        if (u > root && !in_subset_or_near(u) &&
            std::find(next.begin(), next.end(), u) == next.end())
          next.push_back(u);
      }
      subset.push_back(w);
      self(self, std::move(next), root);
      subset.pop_back();
    }
  };

  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::vector<VertexId> ext;
    for (VertexId u : g.neighbors(v))
      if (u > v) ext.push_back(u);
    subset.assign(1, v);
    extend(extend, std::move(ext), v);
  }
  return r;
}

/// Gross (not necessarily induced) counts: enumerate labelled embeddings of
/// each graphlet and divide by its automorphism count.
inline OracleResult brute_gross(const Atlas& atlas, const SourceGraph& g, int t,
                                double budget = kDefaultOracleBudget) {
  detail::check_oracle_budget(g, t, budget);
  OracleResult r = detail::empty_oracle_result(atlas, g, t);
  const std::size_t n = g.vertex_count();

  for (std::size_t pi = 0; pi < r.patterns.size(); ++pi) {
    const Pattern& pat = atlas.pattern(r.patterns[pi].s, r.patterns[pi].p);
    const SmallGraph& h = pat.graph;
    const int k = h.order();
    // embeddings_at[u][v]: embeddings sending pattern node u to host vertex v.
    std::vector<std::vector<std::int64_t>> embeddings_at(k, std::vector<std::int64_t>(n, 0));
    std::int64_t total = 0;
    std::vector<VertexId> image(k);
    auto place = [&](auto& self, int x) -> void {
      if (x == k) {
        ++total;
        for (int u = 0; u < k; ++u) ++embeddings_at[u][image[u]];
        return;
      }
      for (VertexId c = 0; c < n; ++c) {
        bool ok = true;
        for (int y = 0; y < x && ok; ++y) {
          if (image[y] == c) ok = false;
          else if (h.adjacent(x, y) && !g.adjacent(image[y], c)) ok = false;
        }
        if (!ok) continue;
        image[x] = c;
        self(self, x + 1);
      }
    };
    place(place, 0);
    r.global[pi] = total / pat.automorphism_count;
    for (int sigma = 1; sigma <= pat.orbit_count; ++sigma) {
      const std::size_t col = r.per_vertex.index_of(pat.id(sigma));
      for (std::size_t v = 0; v < n; ++v) {
        std::int64_t sum = 0;
        for (unsigned m = pat.orbit_mask(sigma); m; m &= m - 1) sum += embeddings_at[std::countr_zero(m)][v];
        r.per_vertex.at(v, col) = sum / pat.automorphism_count;
      }
    }
  }
  return r;
}

}  // namespace gsurf
