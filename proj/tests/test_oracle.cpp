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


#include <gtest/gtest.h>

#include "test_support.hpp"

namespace gsurf {
namespace {

using testing::atlas5;

TEST(Oracle, TriangleAndStar) {
  const auto k3 = brute_net(atlas5(), testing::complete_graph(3), 3);
  for (VertexId v = 0; v < 3; ++v) {
    EXPECT_EQ(k3.per_vertex.at(v, GraphletId{3, 2, 1}), 1);
    EXPECT_EQ(k3.per_vertex.at(v, GraphletId{3, 1, 1}), 0);
    EXPECT_EQ(k3.per_vertex.at(v, GraphletId{3, 1, 2}), 0);
  }
  const auto star = brute_net(atlas5(), testing::star_graph(3), 3);
  EXPECT_EQ(star.per_vertex.at(0, GraphletId{3, 1, 2}), 3);
  for (VertexId v = 1; v <= 3; ++v) EXPECT_EQ(star.per_vertex.at(v, GraphletId{3, 1, 1}), 2);
  EXPECT_EQ(star.global_of({3, 1, 0}), 3);
}

TEST(Oracle, ZacharyHubsCarryTheMostTriangles) {
  const auto g = testing::zachary();
  const auto r = brute_net(atlas5(), g, 3);
  const auto col = r.per_vertex.index_of({3, 2, 1});
  std::vector<VertexId> by_degree(g.vertex_count());
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::sort(by_degree.begin(), by_degree.end(), [&](VertexId a, VertexId b) { return g.degree(a) > g.degree(b); });
  std::int64_t others = 0;
  for (std::size_t k = 2; k < by_degree.size(); ++k) others = std::max(others, r.per_vertex.at(by_degree[k], col));
  EXPECT_EQ(g.label(by_degree[0]), "34");
  EXPECT_EQ(g.label(by_degree[1]), "1");
  EXPECT_EQ(r.per_vertex.at(by_degree[0], col), 15);
  EXPECT_EQ(r.per_vertex.at(by_degree[1], col), 18);
  EXPECT_EQ(others, 13);
  EXPECT_EQ(r.global_of({3, 2, 0}), 45);
}

TEST(Oracle, GrossCountsOnSquare) {
  const auto r = brute_gross(atlas5(), testing::cycle_graph(4), 4);
  EXPECT_EQ(r.global_of({4, 2, 0}), 4);
  EXPECT_EQ(r.global_of({4, 4, 0}), 1);
  EXPECT_EQ(r.global_of({3, 1, 0}), 4);
}

TEST(Oracle, CliqueGrossEqualsNet) {
  for (const auto& [name, g] : testing::oracle_corpus(30)) {
    const auto net = brute_net(atlas5(), g, 5);
    const auto gross = brute_gross(atlas5(), g, 5);
    for (int s = 1; s <= 5; ++s) {
      const GraphletId k{s, static_cast<int>(atlas5().pattern_count(s)), 1};
      for (VertexId v = 0; v < g.vertex_count(); ++v)
        EXPECT_EQ(net.per_vertex.at(v, k), gross.per_vertex.at(v, k)) << name;
      EXPECT_EQ(net.global_of(k), gross.global_of(k));
    }
  }
}

TEST(Oracle, GrossIsUTimesNetAndNetIsSignedInverse) {
  const auto m = build_inter_family(atlas5(), 5, GraphletMode::orbit);
  for (const auto& [name, g] : testing::oracle_corpus(40)) {
    const auto net = brute_net(atlas5(), g, 5);
    const auto gross = brute_gross(atlas5(), g, 5);
    for (int s = 1; s <= 5; ++s) {
      const auto base = m.family_offset[s];
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        for (std::size_t i = 0; i < m.family_size(s); ++i) {
          std::int64_t ug = 0, inv = 0;
          for (std::size_t j = 0; j < m.family_size(s); ++j) {
            ug += m.u[s](i, j) * net.per_vertex.at(v, base + j);
            inv += m.u_inv[s](i, j) * gross.per_vertex.at(v, base + j);
          }
          EXPECT_EQ(ug, gross.per_vertex.at(v, base + i)) << name;
          EXPECT_EQ(inv, net.per_vertex.at(v, base + i)) << name;
          EXPECT_LE(net.per_vertex.at(v, base + i), gross.per_vertex.at(v, base + i));
        }
      }
    }
  }
}

TEST(Oracle, VertexSumsCountEachCopyOncePerNode) {
  for (const auto& [name, g] : testing::oracle_corpus(30)) {
    const auto r = brute_net(atlas5(), g, 5);
    for (const auto& id : r.patterns) {
      const auto& pat = atlas5().pattern(id.s, id.p);
      std::int64_t total = 0;
      for (int sigma = 1; sigma <= pat.orbit_count; ++sigma)
        total += r.per_vertex.column_sum(r.per_vertex.index_of(pat.id(sigma)));
      EXPECT_EQ(total, id.s * r.global_of(id)) << name << " " << id;
    }
  }
}

TEST(Oracle, SingletonsAndBudget) {
  const auto g = testing::petersen_graph();
  const auto r = brute_net(atlas5(), g, 5);
  for (VertexId v = 0; v < 10; ++v) {
    EXPECT_EQ(r.per_vertex.at(v, 0), 1);
    EXPECT_EQ(r.per_vertex.at(v, 1), 3);
  }
  EXPECT_THROW(brute_net(atlas5(), g, 5, 100.0), OracleBudgetExceeded);
  EXPECT_THROW(brute_gross(atlas5(), g, 5, 100.0), OracleBudgetExceeded);
  EXPECT_THROW(brute_net(atlas5(), g, 6), std::out_of_range);
}

}  // namespace
}  // namespace gsurf
