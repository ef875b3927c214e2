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
#include <chrono>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gsurf/atlas.hpp"
#include "gsurf/conversion.hpp"
#include "gsurf/count.hpp"
#include "gsurf/frequency.hpp"
#include "gsurf/graph.hpp"

namespace gsurf {

struct EngineOptions {
  bool filters = true;
  bool reduced = true;
  unsigned workers = 1;
  /// Keep one ZeroProof per flagged (vertex, graphlet). Costs memory on
  /// large graphs, so off unless asked.
  bool record_proofs = false;
};

/// How the family-s system at one vertex was settled.
enum class SystemKind : std::uint8_t {
  zero_by_filter,       // every graphlet of the family was flagged zero
  reduced_system,       // the clique gross was never computed
  zero_by_full_system,  // full solve, every net count came out zero
  full_system,
};

inline const char* to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::zero_by_filter: return "zero_by_filter";
    case SystemKind::reduced_system: return "reduced_system";
    case SystemKind::zero_by_full_system: return "zero_by_full_system";
    case SystemKind::full_system: return "full_system";
  }
  return "?";
}

inline constexpr std::array<SystemKind, 4> kSystemKinds = {
    SystemKind::zero_by_filter, SystemKind::reduced_system,
    SystemKind::zero_by_full_system, SystemKind::full_system};

/// Evidence that f(H_j|G)(v) = 0.
struct ZeroProof {
  enum class Rule : std::uint8_t {
    inter_family,  // f(H_i)(v) < W(i, j)
    intra_family,  // g(H_i)(v) < U(i, j)
  };
  VertexId vertex = 0;
  std::uint32_t graphlet = 0;  // index into the table order
  Rule rule = Rule::inter_family;
  std::uint32_t witness = 0;   // index of H_i
  std::int64_t bound = 0;      // W(i, j) or U(i, j)
};

inline const char* to_string(ZeroProof::Rule rule) {
  return rule == ZeroProof::Rule::inter_family ? "inter_family" : "intra_family";
}

struct FilterMask {
  /// masked[s][v]: some graphlet of family s was proven zero at v.
  std::vector<std::vector<std::uint8_t>> masked;
  /// kind[s][v] for s >= 3.
  std::vector<std::vector<SystemKind>> kind;
  /// Filled only with EngineOptions::record_proofs, ordered by vertex.
  std::vector<ZeroProof> proofs;
};

struct FamilyStats {
  int s = 0;
  std::size_t vertices = 0;
  std::array<std::size_t, 4> systems{};  // indexed by SystemKind
  std::size_t reduced_fallbacks = 0;
  /// zero_flags[k]: vertices at which the k-th graphlet of the family was flagged.
  std::vector<std::size_t> zero_flags;

  std::size_t count(SystemKind k) const { return systems[static_cast<std::size_t>(k)]; }
  double percent(SystemKind k) const {
    return vertices == 0 ? 0.0 : 100.0 * static_cast<double>(count(k)) / vertices;
  }
};

struct RunStats {
  int t = 0;
  bool filters = true;
  bool reduced = true;
  unsigned workers = 1;
  double seconds = 0.0;
  std::vector<FamilyStats> families;  // s = 3..t

  const FamilyStats& family(int s) const {
    for (const auto& f : families)
      if (f.s == s) return f;
    throw std::out_of_range("no stats for family " + std::to_string(s));
  }
};

template <class Count>
struct RunResult {
  FrequencyTable<Count> net;
  FilterMask mask;
  RunStats stats;
};

namespace detail {

struct PartitionTerm {
  std::vector<unsigned> blocks;  // bitmasks over pendant slots
  std::int64_t mu = 1;
};

// Set partitions of {0..k-1} with Moebius weights prod (-1)^{|B|-1}(|B|-1)!.
inline std::vector<PartitionTerm> set_partitions(int k) {
  std::vector<PartitionTerm> out;
  std::vector<int> block_of(k, 0);
  auto rec = [&](auto& self, int i, int used) -> void {
    if (i == k) {
      PartitionTerm term;
      term.blocks.assign(used, 0u);
      for (int x = 0; x < k; ++x) term.blocks[block_of[x]] |= 1u << x;
      for (unsigned b : term.blocks) {
        const int size = std::popcount(b);
        std::int64_t factorial = 1;
        for (int f = 2; f < size; ++f) factorial *= f;
        term.mu *= (size % 2 == 1 ? 1 : -1) * factorial;
      }
      out.push_back(std::move(term));
      return;
    }
    for (int b = 0; b <= used; ++b) {
      block_of[i] = b;
      self(self, i + 1, std::max(used, b + 1));
    }
  };
  rec(rec, 0, 0);
  return out;
}

// Rooted counting plan for one orbit-specific graphlet. Non-root leaves are
// "pendants"; everything else is the "core", matched by backtracking from the
// root. Pendants are then counted in closed form by
// inclusion-exclusion over which of them collide.
struct RootedPlan {
  int core_size = 0;
  std::array<unsigned, kMaxSmallOrder> earlier{};  // earlier core positions adjacent to position k
  int pendant_count = 0;
  std::array<int, kMaxSmallOrder> pendant_anchor{};  // core position
  std::vector<PartitionTerm> partitions;
  std::int64_t stabilizer = 1;  // |Aut| / |orbit|
};

inline RootedPlan make_rooted_plan(const Pattern& pat, int sigma) {
  const SmallGraph& h = pat.graph;
  const int root = pat.representative(sigma);
  unsigned pendants = 0;
  if (h.order() > 2) {
    for (int x = 0; x < h.order(); ++x)
      if (x != root && h.degree(x) == 1) pendants |= 1u << x;
  }
  RootedPlan plan;
  std::array<int, kMaxSmallOrder> position{};
  position.fill(-1);
  // Most constrained first: each next core node has the most already placed
  // neighbours, so shared neighbours are matched before independent branches.
  const unsigned core = ((1u << h.order()) - 1) & ~pendants;
  std::vector<int> order{root};
  position[root] = 0;
  unsigned placed = 1u << root;
  while (placed != core) {
    int best = -1, best_links = -1;
    for (unsigned m = core & ~placed; m; m &= m - 1) {
      const int x = std::countr_zero(m);
      const int links = std::popcount(h.neighbors(x) & placed);
      if (links > 0 && (links > best_links || (links == best_links && h.degree(x) > h.degree(best)))) {
        best = x;
        best_links = links;
      }
    }
    position[best] = static_cast<int>(order.size());
    order.push_back(best);
    placed |= 1u << best;
  }
  plan.core_size = static_cast<int>(order.size());
  for (int k = 0; k < plan.core_size; ++k)
    for (int e = 0; e < k; ++e)
      if (h.adjacent(order[k], order[e])) plan.earlier[k] |= 1u << e;
  for (unsigned m = pendants; m; m &= m - 1) {
    const int x = std::countr_zero(m);
    plan.pendant_anchor[plan.pendant_count++] = position[std::countr_zero(h.neighbors(x))];
  }
  plan.partitions = set_partitions(plan.pendant_count);
  plan.stabilizer = pat.automorphism_count / pat.orbit_size(sigma);
  return plan;
}

// Size of the intersection of the neighbourhoods of `anchors`.
inline std::size_t common_neighbors(const SourceGraph& g, const VertexId* anchors, int count) {
  if (count == 1) return g.degree(anchors[0]);
  int smallest = 0;
  for (int a = 1; a < count; ++a)
    if (g.degree(anchors[a]) < g.degree(anchors[smallest])) smallest = a;
  std::size_t n = 0;
  for (VertexId w : g.neighbors(anchors[smallest])) {
    bool all = true;
    for (int a = 0; a < count && all; ++a)
      if (a != smallest) all = g.adjacent(anchors[a], w);
    n += all;
  }
  return n;
}

template <class Count>
Count pendant_extensions(const RootedPlan& plan, const SourceGraph& g,
                         const std::array<VertexId, kMaxSmallOrder>& image) {
  if (plan.pendant_count == 0) return Count(1);
  // Free slots per anchor set, keyed by the bitmask of core positions.
  std::array<std::int64_t, 1u << kMaxSmallOrder> slots;
  std::array<bool, 1u << kMaxSmallOrder> known{};
  auto free_slots = [&](unsigned anchors) {
    if (known[anchors]) return slots[anchors];
    std::array<VertexId, kMaxSmallOrder> a{};
    int na = 0;
    for (unsigned m = anchors; m; m &= m - 1) a[na++] = image[std::countr_zero(m)];
    std::int64_t n = static_cast<std::int64_t>(common_neighbors(g, a.data(), na));
    for (int k = 0; k < plan.core_size; ++k) {
      bool inside = true;
      for (int x = 0; x < na && inside; ++x) inside = g.adjacent(a[x], image[k]);
      n -= inside;
    }
    known[anchors] = true;
    return slots[anchors] = n;
  };
  Count total = 0;
  for (const auto& term : plan.partitions) {
    Count product = Count(term.mu);
    for (unsigned block : term.blocks) {
      unsigned anchors = 0;
      for (unsigned m = block; m; m &= m - 1) anchors |= 1u << plan.pendant_anchor[std::countr_zero(m)];
      const std::int64_t n = free_slots(anchors);
      if (n == 0) {
        product = 0;
        break;
      }
      product = checked_mul(product, Count(n));
    }
    total = checked_add(total, product);
  }
  return total;
}

/// Gross count of the planned graphlet at v: rooted embeddings / stabilizer.
template <class Count>
Count rooted_gross(const RootedPlan& plan, const SourceGraph& g, VertexId v) {
  std::array<VertexId, kMaxSmallOrder> image{};
  image[0] = v;
  Count total = 0;
  auto extend = [&](auto& self, int k) -> void {
    if (k == plan.core_size) {
      total = checked_add(total, pendant_extensions<Count>(plan, g, image));
      return;
    }
    int pivot = -1;
    for (unsigned m = plan.earlier[k]; m; m &= m - 1) {
      const int e = std::countr_zero(m);
      if (pivot < 0 || g.degree(image[e]) < g.degree(image[pivot])) pivot = e;
    }
    for (VertexId c : g.neighbors(image[pivot])) {
      bool ok = true;
      for (int e = 0; e < k && ok; ++e) ok = image[e] != c;
      for (unsigned m = plan.earlier[k] & ~(1u << pivot); m && ok; m &= m - 1)
        ok = g.adjacent(image[std::countr_zero(m)], c);
      if (!ok) continue;
      image[k] = c;
      self(self, k + 1);
    }
  };
  extend(extend, 1);
  return exact_div(total, Count(plan.stabilizer));
}

struct SparseEntry {
  std::uint32_t index;
  std::int64_t value;
};

// A graphlet whose root r is a leaf hanging off node a. With H' = H - r,
//   emb_H(v) = sum_{u in N(v)} emb_{H',a}(u) - sum_{x != a} emb_{H'+xa, x}(v),
// where the second sum removes the H' copies that already use v. Every term
// is a rooted count of family s-1, so one gross entry costs O(deg v) given the
// family s-1 gross counts of all vertices. Indices are local to family s-1.
struct LeafRecursion {
  std::uint32_t attach = 0;
  std::int64_t attach_weight = 1;    // stabilizer of the attach orbit
  std::vector<SparseEntry> at_root;  // (index, stabilizer x multiplicity)
  std::int64_t stabilizer = 1;       // of the graphlet itself
};

}  // namespace detail

/// Counting engine: per-vertex net counts of every orbit-specific graphlet with at
/// most t nodes, for 2 <= t <= 5.
class Engine {
 public:
  static constexpr int kMinOrder = 2;
  static constexpr int kMaxOrder = 5;

  Engine(const Atlas& atlas, InterFamily matrices) : atlas_(&atlas), m_(std::move(matrices)) {
    if (m_.mode != GraphletMode::orbit) throw std::invalid_argument("engine needs orbit-mode matrices");
    if (m_.t < kMinOrder || m_.t > kMaxOrder) {
      throw std::out_of_range("engine supports 2 <= t <= 5, got t = " + std::to_string(m_.t));
    }
    if (m_.order != atlas.graphlets_up_to(m_.t, GraphletMode::orbit)) {
      throw std::invalid_argument("conversion matrices do not match the atlas order");
    }
    prepare();
  }

  int t() const { return m_.t; }
  const InterFamily& matrices() const { return m_; }
  const std::vector<GraphletId>& order() const { return m_.order; }

  /// Full gross vector g(H_s|G)(v) for family s (3 <= s <= t), in atlas order.
  template <class Count = std::int64_t>
  std::vector<Count> up_rec(int s, const SourceGraph& g, VertexId v) const {
    if (s < 3 || s > m_.t) throw std::out_of_range("up_rec: family out of range");
    std::array<Count, 3> g3{};
    const std::size_t n3 = m_.family_size(3);
    std::vector<Count> out(m_.family_size(s));
    for (std::size_t k = 0; k < n3; ++k) g3[k] = gross3<Count>(k, g, v);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = s == 3 ? g3[k] : gross_entry<Count>(s, k, g, v, std::span<const Count>(g3));
    return out;
  }

  template <class Count = std::int64_t>
  RunResult<Count> run(const SourceGraph& g, const EngineOptions& options = {}) const {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = g.vertex_count();
    RunResult<Count> result;
    result.net = FrequencyTable<Count>(m_.order, n);
    result.mask.masked.assign(m_.t + 1, std::vector<std::uint8_t>(n, 0));
    result.mask.kind.assign(m_.t + 1, std::vector<SystemKind>(n, SystemKind::full_system));

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, std::max<std::size_t>(n, 1)));
    std::vector<Scratch<Count>> scratch(workers, Scratch<Count>(m_.size(), m_.t));

    // Gross counts of families 3..t-1 at every vertex, so leaf-rooted
    // graphlets of the next family can be assembled from them. Only the
    // triangle is kept among the cliques.
    Tables<Count> tables;
    tables.by_family.resize(m_.t + 1);
    for (int s = 3; s < m_.t; ++s) {
      const std::size_t size = m_.family_size(s);
      const std::size_t clique = s == 3 ? size : families_[s].clique;
      auto& table = tables.by_family[s];
      table.assign(n * size, Count(0));
      for_each_vertex(n, workers, [&](unsigned, VertexId v) {
        const Count* g3 = s == 3 ? nullptr : tables.row(3, v, m_.family_size(3));
        std::span<const Count> g3s = g3 ? std::span<const Count>(g3, m_.family_size(3)) : std::span<const Count>();
        for (std::size_t k = 0; k < size; ++k)
          if (k != clique) table[v * size + k] = compute_gross<Count>(s, k, g, v, g3s, &tables);
      });
    }

    for_each_vertex(n, workers, [&](unsigned w, VertexId v) {
      solve_vertex(g, v, options, result, scratch[w], tables);
    });
    for (auto& sc : scratch)
      result.mask.proofs.insert(result.mask.proofs.end(), sc.proofs.begin(), sc.proofs.end());

    result.stats = collect_stats(result.mask, n, options, workers);
    for (auto& fs : result.stats.families) {
      for (const auto& sc : scratch) {
        fs.reduced_fallbacks += sc.fallbacks[fs.s];
        for (std::size_t k = 0; k < fs.zero_flags.size(); ++k)
          fs.zero_flags[k] += sc.flag_counts[m_.family_offset[fs.s] + k];
      }
    }
    result.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

 private:
  enum class Closed : std::uint8_t { none, leaf_wedge, center_wedge, triangle };

  struct FamilyPlan {
    std::vector<detail::RootedPlan> plans;
    std::vector<Closed> closed;  // s = 3 only
    std::size_t clique = 0;      // local index of K_s
    int interior_path = -1;           // local index of the interior-P4 graphlet (s = 4)
    // Inter-family zero tests per local graphlet j: (global i, W(i, j)).
    std::vector<std::vector<detail::SparseEntry>> inter;
    // Intra-family zero tests per local graphlet i: (local j, U(i, j)).
    std::vector<std::vector<detail::SparseEntry>> intra;
    std::vector<std::vector<detail::SparseEntry>> inv_rows;  // sparse rows of U_s^{-1}
    std::vector<std::size_t> column_nnz;                     // nnz per column of U_s
    std::vector<std::optional<detail::LeafRecursion>> leaf;  // s >= 4
  };

  template <class Count>
  struct Tables {
    std::vector<std::vector<Count>> by_family;  // row-major n x family size; empty if absent
    bool has(int s) const { return s < static_cast<int>(by_family.size()) && !by_family[s].empty(); }
    const Count* row(int s, VertexId v, std::size_t size) const { return by_family[s].data() + v * size; }
  };

  template <class Fn>
  static void for_each_vertex(std::size_t n, unsigned workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
      try {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        for (std::size_t v = lo; v < hi; ++v) fn(w, static_cast<VertexId>(v));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  template <class Count>
  struct Scratch {
    Scratch(std::size_t width, int t) : gross(width), flagged(width), flag_counts(width), fallbacks(t + 1) {}
    std::vector<Count> gross;
    std::vector<std::uint8_t> flagged;
    std::vector<std::size_t> flag_counts;
    std::vector<std::size_t> fallbacks;
    std::vector<ZeroProof> proofs;
  };

  void prepare() {
    families_.resize(m_.t + 1);
    for (int s = 3; s <= m_.t; ++s) {
      FamilyPlan& fp = families_[s];
      const std::size_t base = m_.family_offset[s], size = m_.family_size(s);
      const IntMatrix& u = m_.u[s];
      const IntMatrix& inv = m_.u_inv[s];
      fp.inter.resize(size);
      fp.intra.resize(size);
      fp.inv_rows.resize(size);
      fp.column_nnz.assign(size, 0);
      for (std::size_t k = 0; k < size; ++k) {
        const GraphletId id = m_.order[base + k];
        const Pattern& pat = atlas_->pattern(id.s, id.p);
        fp.plans.push_back(detail::make_rooted_plan(pat, id.sigma));
        if (pat.is_clique()) fp.clique = k;
        const int root_degree = pat.graph.degree(pat.representative(id.sigma));
        if (s == 3) {
          fp.closed.push_back(pat.is_clique()          ? Closed::triangle
                              : root_degree == 1 ? Closed::leaf_wedge
                                                 : Closed::center_wedge);
        }
        if (s == 4 && pat.graph == canonical_path4() && root_degree == 2) fp.interior_path = static_cast<int>(k);
        // Family 1 can never fire (f = 1 = W), so start at family 2.
        for (std::size_t i = m_.family_offset[2]; i < base; ++i) {
          if (m_.w_tilde(i, base + k) > 0)
            fp.inter[k].push_back({static_cast<std::uint32_t>(i), m_.w_tilde(i, base + k)});
        }
        for (std::size_t j = k; j < size; ++j) {
          if (u(k, j) > 0) fp.intra[k].push_back({static_cast<std::uint32_t>(j), u(k, j)});
          if (inv(k, j) != 0) fp.inv_rows[k].push_back({static_cast<std::uint32_t>(j), inv(k, j)});
        }
        for (std::size_t i = 0; i <= k; ++i) fp.column_nnz[k] += u(i, k) != 0;
        fp.leaf.push_back(s >= 4 ? leaf_recursion(pat, id.sigma) : std::nullopt);
      }
    }
  }

  std::optional<detail::LeafRecursion> leaf_recursion(const Pattern& pat, int sigma) const {
    const SmallGraph& h = pat.graph;
    const int s = h.order(), root = pat.representative(sigma);
    if (h.degree(root) != 1) return std::nullopt;
    const std::size_t base = m_.family_offset[s - 1], size = m_.family_size(s - 1);
    // Lower tables carry the triangle but no larger clique.
    const std::size_t lower_clique = s - 1 == 3 ? size : families_[s - 1].clique;
    // Local family s-1 index and stabilizer of node x of k.
    auto locate = [&](const SmallGraph& k, int x) {
      const Classification c = atlas_->classify(k);
      const Pattern& q = atlas_->pattern(s - 1, c.p);
      const GraphletId id = q.id(c.orbit_of[x]);
      const auto it = std::find(m_.order.begin() + base, m_.order.begin() + base + size, id);
      return std::pair{static_cast<std::size_t>(it - (m_.order.begin() + base)),
                       static_cast<std::int64_t>(q.automorphism_count / q.orbit_size(c.orbit_of[x]))};
    };
    const SmallGraph rest = h.induced(((1u << s) - 1) & ~(1u << root));
    const int a = std::countr_zero(h.neighbors(root));
    const int attach = a - (a > root);
    detail::LeafRecursion r;
    r.stabilizer = static_cast<std::int64_t>(pat.automorphism_count / pat.orbit_size(sigma));
    const auto [ai, aw] = locate(rest, attach);
    if (ai == lower_clique) return std::nullopt;
    r.attach = static_cast<std::uint32_t>(ai);
    r.attach_weight = aw;
    for (int x = 0; x < s - 1; ++x) {
      if (x == attach) continue;
      SmallGraph k = rest;
      if (!k.adjacent(x, attach)) k.add_edge(x, attach);
      const auto [xi, xw] = locate(k, x);
      if (xi == lower_clique) return std::nullopt;
      auto same = std::find_if(r.at_root.begin(), r.at_root.end(), [&](const auto& e) { return e.index == xi; });
      if (same == r.at_root.end()) r.at_root.push_back({static_cast<std::uint32_t>(xi), xw});
      else same->value += xw;
    }
    return r;
  }

  SmallGraph canonical_path4() const {
    return atlas_->pattern(4, atlas_->classify(SmallGraph::path(4)).p).graph;
  }

  template <class Count>
  Count gross3(std::size_t k, const SourceGraph& g, VertexId v) const {
    const auto nb = g.neighbors(v);
    switch (families_[3].closed[k]) {
      case Closed::leaf_wedge: {
        Count total = 0;
        for (VertexId u : nb) total = checked_add(total, Count(static_cast<std::int64_t>(g.degree(u)) - 1));
        return total;
      }
      case Closed::center_wedge: {
        const Count d = Count(static_cast<std::int64_t>(nb.size()));
        return exact_div(checked_mul(d, checked_sub(d, Count(1))), Count(2));
      }
      case Closed::triangle: {
        std::int64_t twice = 0;
        for (VertexId u : nb) {
          auto nu = g.neighbors(u);
          auto a = nb.begin();
          auto b = nu.begin();
          while (a != nb.end() && b != nu.end()) {
            if (*a < *b) ++a;
            else if (*b < *a) ++b;
            else { ++twice; ++a; ++b; }
          }
        }
        return Count(twice / 2);
      }
      case Closed::none: break;
    }
    throw std::logic_error("missing closed form");
  }

  // One gross entry of family s >= 4; g3 holds the family-3 gross at v.
  template <class Count>
  Count gross_entry(int s, std::size_t k, const SourceGraph& g, VertexId v,
                    std::span<const Count> g3) const {
    return compute_gross<Count>(s, k, g, v, g3, static_cast<const Tables<Count>*>(nullptr));
  }

  // Family s gross entry k at v. With family s-1 tables, leaf-rooted
  // graphlets are assembled from them instead of being matched.
  template <class Count>
  Count compute_gross(int s, std::size_t k, const SourceGraph& g, VertexId v,
                      std::span<const Count> g3, const Tables<Count>* tables) const {
    if (s == 3) return gross3<Count>(k, g, v);
    const FamilyPlan& fp = families_[s];
    if (static_cast<int>(k) == fp.interior_path) {
      const auto& f3 = families_[3];
      Count leaf = 0, tri = 0;
      for (std::size_t i = 0; i < f3.closed.size(); ++i) {
        if (f3.closed[i] == Closed::leaf_wedge) leaf = g3[i];
        if (f3.closed[i] == Closed::triangle) tri = g3[i];
      }
      const Count d = Count(static_cast<std::int64_t>(g.degree(v)));
      return checked_sub(checked_sub(checked_mul(d, leaf), leaf), checked_mul(Count(2), tri));
    }
    if (tables && fp.leaf[k] && tables->has(s - 1)) {
      const detail::LeafRecursion& r = *fp.leaf[k];
      const std::size_t size = m_.family_size(s - 1);
      Count around = 0;
      for (VertexId u : g.neighbors(v)) around = checked_add(around, tables->row(s - 1, u, size)[r.attach]);
      Count total = checked_mul(around, Count(r.attach_weight));
      const Count* own = tables->row(s - 1, v, size);
      for (const auto& [i, w] : r.at_root) total = checked_sub(total, checked_mul(own[i], Count(w)));
      return exact_div(total, Count(r.stabilizer));
    }
    return detail::rooted_gross<Count>(fp.plans[k], g, v);
  }

  template <class Count>
  void solve_vertex(const SourceGraph& g, VertexId v, const EngineOptions& options,
                    RunResult<Count>& result, Scratch<Count>& scratch,
                    const Tables<Count>& tables) const {
    auto net = result.net.row(v);
    std::vector<Count>& gross = scratch.gross;
    std::fill(scratch.flagged.begin(), scratch.flagged.end(), 0);
    net[0] = 1;
    gross[0] = 1;
    if (m_.t >= 2) {
      net[m_.family_offset[2]] = Count(static_cast<std::int64_t>(g.degree(v)));
      gross[m_.family_offset[2]] = net[m_.family_offset[2]];
    }
    for (int s = 3; s <= m_.t; ++s) {
      const FamilyPlan& fp = families_[s];
      const std::size_t base = m_.family_offset[s], size = m_.family_size(s);
      std::span<Count> f(net.data() + base, size);
      std::span<Count> gs(gross.data() + base, size);
      std::span<std::uint8_t> flag(scratch.flagged.data() + base, size);
      std::span<const Count> g3(gross.data() + m_.family_offset[3], m_.family_size(3));
      std::size_t flagged = 0;
      auto mark = [&](std::size_t j, ZeroProof::Rule rule, std::size_t witness, std::int64_t bound) {
        if (flag[j]) return;
        flag[j] = 1;
        ++flagged;
        ++scratch.flag_counts[base + j];
        if (options.record_proofs) {
          scratch.proofs.push_back({v, static_cast<std::uint32_t>(base + j), rule,
                            static_cast<std::uint32_t>(witness), bound});
        }
      };

      if (options.filters) {
        for (std::size_t j = 0; j < size; ++j)
          for (const auto& [i, w] : fp.inter[j])
            if (net[i] < Count(w)) {
              mark(j, ZeroProof::Rule::inter_family, i, w);
              break;
            }
      }
      SystemKind kind = SystemKind::full_system;
      if (flagged == size) {
        std::fill(f.begin(), f.end(), Count(0));
        std::fill(gs.begin(), gs.end(), Count(0));
        kind = SystemKind::zero_by_filter;
      } else {
        for (std::size_t k = 0; k < size; ++k) {
          if (k == fp.clique) continue;
          gs[k] = tables.has(s) ? tables.row(s, v, size)[k] : compute_gross<Count>(s, k, g, v, g3, &tables);
          if (options.filters) {
            for (const auto& [j, bound] : fp.intra[k])
              if (gs[k] < Count(bound)) mark(j, ZeroProof::Rule::intra_family, base + k, bound);
          }
        }
        kind = settle(s, g, v, options, f, gs, flag, flagged, g3, scratch.fallbacks[s]);
      }
      result.mask.masked[s][v] = flagged > 0;
      result.mask.kind[s][v] = kind;
      for (std::size_t j = 0; j < size; ++j) {
        if (f[j] < 0) throw std::logic_error("negative net count at vertex " + g.label(v));
        if (flag[j] && f[j] != 0) {
          throw std::logic_error("filter flagged a nonzero count: " + to_string(m_.order[base + j]) +
                                 " at vertex " + g.label(v));
        }
      }
    }
  }

  // Turns the landed gross entries into net counts, computing the clique
  // gross only when no known zero lets the system skip it.
  template <class Count>
  SystemKind settle(int s, const SourceGraph& g, VertexId v, const EngineOptions& options,
                    std::span<Count> f, std::span<Count> gs, std::span<const std::uint8_t> flag,
                    std::size_t flagged, std::span<const Count> g3,
                    std::size_t& fallbacks) const {
    const FamilyPlan& fp = families_[s];
    const std::size_t q = fp.clique, size = f.size();
    if (flagged == size) {
      std::fill(f.begin(), f.end(), Count(0));
      std::fill(gs.begin(), gs.end(), Count(0));
      return SystemKind::zero_by_filter;
    }
    if (options.reduced && flagged > 0) {
      if (flag[q]) {
        // A clique net of zero is also its gross.
        gs[q] = 0;
        full_solve(fp, gs, f);
        return SystemKind::reduced_system;
      }
      std::size_t pick = size;
      for (std::size_t j = 0; j < size; ++j) {
        if (!flag[j] || m_.u[s](j, q) == 0) continue;
        if (pick == size || fp.column_nnz[j] < fp.column_nnz[pick]) pick = j;
      }
      if (pick != size) {
        if (reduced_solve(fp, pick, gs, f)) return SystemKind::reduced_system;
        ++fallbacks;  // singular reduced matrix; the full system still works
      }
    }
    gs[q] = s == 3 ? gross3<Count>(q, g, v) : gross_entry<Count>(s, q, g, v, g3);
    full_solve(fp, gs, f);
    for (const Count& x : f)
      if (x != 0) return SystemKind::full_system;
    return SystemKind::zero_by_full_system;
  }

  template <class Count>
  static void full_solve(const FamilyPlan& fp, std::span<Count> gs, std::span<Count> f) {
    for (std::size_t k = 0; k < f.size(); ++k) {
      Count x = 0;
      for (const auto& [l, c] : fp.inv_rows[k]) x = checked_add(x, checked_mul(Count(c), gs[l]));
      f[k] = x;
    }
  }

  // Known f_j = 0 with the clique gross x unknown. Back-substitution makes
  // every net count affine in x, f = a + x b with b the clique column of
  // U^{-1}; the row f_j = 0 then pins x.
  template <class Count>
  static bool reduced_solve(const FamilyPlan& fp, std::size_t j, std::span<Count> gs,
                            std::span<Count> f) {
    const std::size_t q = fp.clique;
    auto coefficient = [&](std::size_t k) -> std::int64_t {
      for (const auto& [l, c] : fp.inv_rows[k])
        if (l == q) return c;
      return 0;
    };
    const std::int64_t bj = coefficient(j);
    if (bj == 0) return false;
    gs[q] = 0;
    full_solve(fp, gs, f);  // f = a
    const Count x = exact_div(Count(0) - f[j], Count(bj));
    if (x < 0) throw std::logic_error("reduced system produced a negative clique count");
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::int64_t bk = coefficient(k);
      if (bk != 0) f[k] = checked_add(f[k], checked_mul(x, Count(bk)));
    }
    gs[q] = x;
    return true;
  }

  RunStats collect_stats(const FilterMask& mask, std::size_t n, const EngineOptions& options,
                         unsigned workers) const {
    RunStats stats;
    stats.t = m_.t;
    stats.filters = options.filters;
    stats.reduced = options.reduced;
    stats.workers = workers;
    for (int s = 3; s <= m_.t; ++s) {
      FamilyStats fs;
      fs.s = s;
      fs.vertices = n;
      fs.zero_flags.assign(m_.family_size(s), 0);
      for (std::size_t v = 0; v < n; ++v) ++fs.systems[static_cast<std::size_t>(mask.kind[s][v])];
      stats.families.push_back(std::move(fs));
    }
    return stats;
  }

  const Atlas* atlas_;
  InterFamily m_;
  std::vector<FamilyPlan> families_;
};

}  // namespace gsurf
