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
#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gsurf {

inline constexpr int kMaxSmallOrder = 8;

/// Edge set of a small graph, one bit per unordered node pair.
/// Pair (i, j) with i < j lives at bit j*(j-1)/2 + i (colex order).
using EdgeBits = std::uint32_t;

constexpr int pair_bit(int i, int j) {
  if (i > j) std::swap(i, j);
  return j * (j - 1) / 2 + i;
}

/// Simple undirected graph on at most eight nodes, stored as per-node
/// neighbor masks.
class SmallGraph {
 public:
  SmallGraph() = default;

  explicit SmallGraph(int order) : order_(order) {
    if (order < 0 || order > kMaxSmallOrder) {
      throw std::invalid_argument("SmallGraph order must be in [0, 8]");
    }
  }

  static SmallGraph from_bits(int order, EdgeBits bits) {
    SmallGraph g(order);
    for (int j = 1; j < order; ++j) {
      for (int i = 0; i < j; ++i) {
        if (bits >> pair_bit(i, j) & 1u) g.add_edge(i, j);
      }
    }
    return g;
  }

  static SmallGraph from_edges(int order,
                               std::span<const std::pair<int, int>> edges) {
    SmallGraph g(order);
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
  }

  static SmallGraph from_edges(
      int order, std::initializer_list<std::pair<int, int>> edges) {
    return from_edges(order, std::span(edges.begin(), edges.size()));
  }

  static SmallGraph complete(int order) {
    SmallGraph g(order);
    for (int j = 1; j < order; ++j)
      for (int i = 0; i < j; ++i) g.add_edge(i, j);
    return g;
  }

  static SmallGraph path(int order) {
    SmallGraph g(order);
    for (int i = 0; i + 1 < order; ++i) g.add_edge(i, i + 1);
    return g;
  }

  static SmallGraph cycle(int order) {
    SmallGraph g = path(order);
    if (order >= 3) g.add_edge(0, order - 1);
    return g;
  }

  /// Star with node 0 as the center.
  static SmallGraph star(int leaves) {
    SmallGraph g(leaves + 1);
    for (int i = 1; i <= leaves; ++i) g.add_edge(0, i);
    return g;
  }

  int order() const { return order_; }

  int edge_count() const {
    int twice = 0;
    for (int i = 0; i < order_; ++i) twice += std::popcount(adj_[i]);
    return twice / 2;
  }

  bool adjacent(int i, int j) const { return (adj_[i] >> j) & 1u; }
  unsigned neighbors(int i) const { return adj_[i]; }
  int degree(int i) const { return std::popcount(adj_[i]); }

  void add_edge(int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= order_ || j >= order_) {
      throw std::invalid_argument("SmallGraph edge out of range or loop");
    }
    adj_[i] |= static_cast<std::uint8_t>(1u << j);
    adj_[j] |= static_cast<std::uint8_t>(1u << i);
  }

  EdgeBits bits() const {
    EdgeBits b = 0;
    for (int j = 1; j < order_; ++j) {
      unsigned lower = adj_[j] & ((1u << j) - 1u);
      while (lower) {
        int i = std::countr_zero(lower);
        lower &= lower - 1;
        b |= EdgeBits{1} << pair_bit(i, j);
      }
    }
    return b;
  }

  unsigned all_nodes() const { return (1u << order_) - 1u; }

  /// True when the subgraph induced on `mask` is connected (and non-empty).
  bool connected(unsigned mask) const {
    if (mask == 0) return false;
    unsigned seen = mask & (~mask + 1u);
    unsigned frontier = seen;
    while (frontier) {
      unsigned next = 0;
      for (unsigned f = frontier; f; f &= f - 1) {
        next |= adj_[std::countr_zero(f)];
      }
      next &= mask & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen == mask;
  }

  bool connected() const { return order_ > 0 && connected(all_nodes()); }

  /// Node v moves to position[v].
  SmallGraph relabeled(std::span<const int> position) const {
    SmallGraph g(order_);
    for (int j = 1; j < order_; ++j)
      for (int i = 0; i < j; ++i)
        if (adjacent(i, j)) g.add_edge(position[i], position[j]);
    return g;
  }

  /// Subgraph induced on `mask`, nodes renumbered in increasing order.
  SmallGraph induced(unsigned mask) const {
    std::array<int, kMaxSmallOrder> local{};
    int k = 0;
    for (int v = 0; v < order_; ++v)
      if (mask >> v & 1u) local[v] = k++;
    SmallGraph g(k);
    for (int v = 0; v < order_; ++v) {
      if (!(mask >> v & 1u)) continue;
      for (unsigned nb = adj_[v] & mask; nb; nb &= nb - 1) {
        int u = std::countr_zero(nb);
        if (u > v) g.add_edge(local[v], local[u]);
      }
    }
    return g;
  }

  bool is_complete() const {
    return edge_count() == order_ * (order_ - 1) / 2;
  }

  friend bool operator==(const SmallGraph&, const SmallGraph&) = default;

 private:
  int order_ = 0;
  std::array<std::uint8_t, kMaxSmallOrder> adj_{};
};

namespace detail {

// Pattern nodes in BFS order from `start`, each with the earlier-placed
// neighbors it must stay adjacent to.
struct EmbeddingPlan {
  std::vector<int> order;
  std::vector<unsigned> earlier;  // mask over positions in `order`
};

inline EmbeddingPlan make_embedding_plan(const SmallGraph& pattern,
                                         int start) {
  EmbeddingPlan plan;
  std::array<int, kMaxSmallOrder> position{};
  position.fill(-1);
  unsigned placed = 1u << start;
  plan.order.push_back(start);
  position[start] = 0;
  for (std::size_t head = 0; head < plan.order.size(); ++head) {
    unsigned nb = pattern.neighbors(plan.order[head]) & ~placed;
    for (; nb; nb &= nb - 1) {
      int u = std::countr_zero(nb);
      position[u] = static_cast<int>(plan.order.size());
      plan.order.push_back(u);
      placed |= 1u << u;
    }
  }
  for (int u : plan.order) {
    unsigned mask = 0;
    for (unsigned nb = pattern.neighbors(u); nb; nb &= nb - 1) {
      int w = std::countr_zero(nb);
      if (position[w] < position[u]) mask |= 1u << position[w];
    }
    plan.earlier.push_back(mask);
  }
  return plan;
}

// Calls visit(image) for every injective edge-preserving map of `pattern`
// into `host`, optionally pinning pattern node `pin_from` to host node
// `pin_to`. `image` is indexed by pattern node. Stops when visit returns
// false.
template <class Visit>
bool for_each_embedding(const SmallGraph& pattern, const SmallGraph& host,
                        int pin_from, int pin_to, Visit&& visit) {
  if (pattern.order() == 0) return visit(std::array<int, kMaxSmallOrder>{});
  if (pattern.order() > host.order()) return true;
  const int start = pin_from >= 0 ? pin_from : 0;
  const EmbeddingPlan plan = make_embedding_plan(pattern, start);
  if (static_cast<int>(plan.order.size()) != pattern.order()) {
    throw std::invalid_argument("embedding pattern must be connected");
  }
  std::array<int, kMaxSmallOrder> image{};
  std::array<int, kMaxSmallOrder> by_position{};
  unsigned used = 0;
  bool keep_going = true;

  auto extend = [&](auto&& self, std::size_t k) -> void {
    if (!keep_going) return;
    if (k == plan.order.size()) {
      keep_going = visit(image);
      return;
    }
    unsigned candidates = host.all_nodes() & ~used;
    if (k == 0 && pin_from >= 0) candidates &= 1u << pin_to;
    for (unsigned e = plan.earlier[k]; e; e &= e - 1) {
      candidates &= host.neighbors(by_position[std::countr_zero(e)]);
    }
    for (; candidates && keep_going; candidates &= candidates - 1) {
      int c = std::countr_zero(candidates);
      image[plan.order[k]] = c;
      by_position[k] = c;
      used |= 1u << c;
      self(self, k + 1);
      used &= ~(1u << c);
    }
  };
  extend(extend, 0);
  return keep_going;
}

}  // namespace detail

/// Number of injective edge-preserving maps pattern -> host. With a pin,
/// only maps sending `pattern_node` to `host_node` are counted.
inline std::uint64_t count_embeddings(const SmallGraph& pattern,
                                      const SmallGraph& host,
                                      int pattern_node = -1,
                                      int host_node = -1) {
  std::uint64_t count = 0;
  detail::for_each_embedding(pattern, host, pattern_node, host_node,
                             [&](const auto&) {
                               ++count;
                               return true;
                             });
  return count;
}

inline bool embeds(const SmallGraph& pattern, const SmallGraph& host,
                   int pattern_node = -1, int host_node = -1) {
  bool found = false;
  detail::for_each_embedding(pattern, host, pattern_node, host_node,
                             [&](const auto&) {
                               found = true;
                               return false;
                             });
  return found;
}

}  // namespace gsurf
