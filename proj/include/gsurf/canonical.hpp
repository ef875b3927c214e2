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
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "gsurf/small_graph.hpp"

namespace gsurf {

/// Canonical representative of an isomorphism class: `bits` is the edge
/// set after moving node v to `position[v]`.
struct CanonicalForm {
  EdgeBits bits = 0;
  std::array<int, kMaxSmallOrder> position{};

  SmallGraph graph(int order) const { return SmallGraph::from_bits(order, bits); }
};

/// Stable color refinement starting from degrees. Colors are ranks of
/// (color, sorted neighbor colors) signatures, so they are invariant
/// under relabeling.
inline std::array<int, kMaxSmallOrder> refine_colors(const SmallGraph& h) {
  const int s = h.order();
  std::array<int, kMaxSmallOrder> color{};
  for (int v = 0; v < s; ++v) color[v] = h.degree(v);

  int classes = -1;
  for (;;) {
    std::vector<std::vector<int>> signature(s);
    for (int v = 0; v < s; ++v) {
      auto& sig = signature[v];
      for (unsigned nb = h.neighbors(v); nb; nb &= nb - 1) {
        sig.push_back(color[std::countr_zero(nb)]);
      }
      std::sort(sig.begin(), sig.end());
      sig.insert(sig.begin(), color[v]);
    }
    std::vector<std::vector<int>> distinct(signature);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    for (int v = 0; v < s; ++v) {
      color[v] = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), signature[v]) -
          distinct.begin());
    }
    const int now = static_cast<int>(distinct.size());
    if (now == classes) break;
    classes = now;
  }
  return color;
}

namespace detail {

// Visits every labeling that places the color classes in consecutive
// blocks of positions, ordered by color.
template <class Visit>
void for_each_cell_labeling(const SmallGraph& h,
                            const std::array<int, kMaxSmallOrder>& color,
                            Visit&& visit) {
  const int s = h.order();
  std::array<int, kMaxSmallOrder> by_rank{};
  std::iota(by_rank.begin(), by_rank.begin() + s, 0);
  std::sort(by_rank.begin(), by_rank.begin() + s,
            [&](int a, int b) { return color[a] < color[b]; });
  std::array<int, kMaxSmallOrder> slot_color{};
  for (int p = 0; p < s; ++p) slot_color[p] = color[by_rank[p]];

  std::array<int, kMaxSmallOrder> position{};
  unsigned used = 0;
  auto place = [&](auto&& self, int p) -> void {
    if (p == s) {
      visit(position);
      return;
    }
    for (int v = 0; v < s; ++v) {
      if ((used >> v & 1u) || color[v] != slot_color[p]) continue;
      used |= 1u << v;
      position[v] = p;
      self(self, p + 1);
      used &= ~(1u << v);
    }
  };
  place(place, 0);
}

inline EdgeBits relabeled_bits(const SmallGraph& h,
                               const std::array<int, kMaxSmallOrder>& position) {
  EdgeBits b = 0;
  for (int j = 1; j < h.order(); ++j) {
    unsigned lower = h.neighbors(j) & ((1u << j) - 1u);
    for (; lower; lower &= lower - 1) {
      b |= EdgeBits{1} << pair_bit(position[std::countr_zero(lower)],
                                   position[j]);
    }
  }
  return b;
}

}  // namespace detail

/// Maximum relabeled edge set over the labelings compatible with the
/// refined coloring. Isomorphic inputs get identical bits.
inline CanonicalForm canonical_form(const SmallGraph& h) {
  const auto color = refine_colors(h);
  CanonicalForm best;
  bool have = false;
  detail::for_each_cell_labeling(h, color, [&](const auto& position) {
    EdgeBits b = detail::relabeled_bits(h, position);
    if (!have || b > best.bits) {
      best.bits = b;
      best.position = position;
      have = true;
    }
  });
  return best;
}

/// Minimum relabeled edge set over all s! labelings. Slow reference used
/// to cross-check canonical_form on small orders.
inline CanonicalForm exhaustive_canonical_form(const SmallGraph& h) {
  const int s = h.order();
  std::array<int, kMaxSmallOrder> position{};
  std::iota(position.begin(), position.begin() + s, 0);
  CanonicalForm best;
  bool have = false;
  do {
    EdgeBits b = detail::relabeled_bits(h, position);
    if (!have || b < best.bits) {
      best.bits = b;
      best.position = position;
      have = true;
    }
  } while (std::next_permutation(position.begin(), position.begin() + s));
  return best;
}

inline bool isomorphic(const SmallGraph& a, const SmallGraph& b) {
  return a.order() == b.order() && a.edge_count() == b.edge_count() &&
         canonical_form(a).bits == canonical_form(b).bits;
}

struct AutomorphismInfo {
  std::uint64_t group_size = 0;
  /// Raw orbit id per node: the smallest node in its orbit.
  std::array<int, kMaxSmallOrder> orbit_root{};
};

namespace detail {

// Visits every automorphism as an image array; stops when visit returns
// false.
template <class Visit>
void for_each_automorphism(const SmallGraph& h, Visit&& visit) {
  const int s = h.order();
  const auto color = refine_colors(h);
  std::array<int, kMaxSmallOrder> image{};
  unsigned used = 0;
  bool keep_going = true;
  auto assign = [&](auto&& self, int v) -> void {
    if (!keep_going) return;
    if (v == s) {
      keep_going = visit(image);
      return;
    }
    for (int c = 0; c < s && keep_going; ++c) {
      if ((used >> c & 1u) || color[c] != color[v]) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) {
        ok = h.adjacent(u, v) == h.adjacent(image[u], c);
      }
      if (!ok) continue;
      image[v] = c;
      used |= 1u << c;
      self(self, v + 1);
      used &= ~(1u << c);
    }
  };
  assign(assign, 0);
}

}  // namespace detail

inline AutomorphismInfo automorphisms(const SmallGraph& h) {
  const int s = h.order();
  AutomorphismInfo info;
  std::iota(info.orbit_root.begin(), info.orbit_root.begin() + s, 0);
  auto find = [&](int v) {
    while (info.orbit_root[v] != v) v = info.orbit_root[v];
    return v;
  };
  detail::for_each_automorphism(h, [&](const auto& image) {
    ++info.group_size;
    for (int v = 0; v < s; ++v) {
      int a = find(v), b = find(image[v]);
      if (a != b) info.orbit_root[std::max(a, b)] = std::min(a, b);
    }
    return true;
  });
  for (int v = 0; v < s; ++v) info.orbit_root[v] = find(v);
  return info;
}

/// An automorphism sending `from` to `to`, if one exists.
inline std::optional<std::array<int, kMaxSmallOrder>> find_automorphism(
    const SmallGraph& h, int from, int to) {
  std::optional<std::array<int, kMaxSmallOrder>> witness;
  detail::for_each_automorphism(h, [&](const auto& image) {
    if (image[from] != to) return true;
    witness = image;
    return false;
  });
  return witness;
}

}  // namespace gsurf
