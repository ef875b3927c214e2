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
#include <compare>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsurf/canonical.hpp"
#include "gsurf/small_graph.hpp"

namespace gsurf {

/// Orbit-specific graphlets (sigma >= 1) or whole patterns (sigma = 0).
enum class GraphletMode { orbit, hatted };

inline const char* to_string(GraphletMode mode) {
  return mode == GraphletMode::orbit ? "orbit" : "hatted";
}

inline GraphletMode parse_mode(const std::string& text) {
  if (text == "orbit") return GraphletMode::orbit;
  if (text == "hatted") return GraphletMode::hatted;
  throw std::invalid_argument("unknown graphlet mode '" + text + "'");
}

/// Index triplet (s, p, sigma): node count, pattern index within the
/// family, orbit index (0 for the orbit-free pattern).
struct GraphletId {
  int s = 0;
  int p = 0;
  int sigma = 0;

  friend auto operator<=>(const GraphletId&, const GraphletId&) = default;
};

inline std::string to_string(const GraphletId& id) {
  return "H(" + std::to_string(id.s) + "," + std::to_string(id.p) + "," +
         std::to_string(id.sigma) + ")";
}

inline std::ostream& operator<<(std::ostream& os, const GraphletId& id) {
  return os << to_string(id);
}

/// One isomorphism class of connected graphs, in canonical labeling, with
/// its orbits numbered by the ordering rules.
struct Pattern {
  int order = 0;
  int index = 0;  // p, 1-based
  SmallGraph graph;
  std::array<int, kMaxSmallOrder> orbit_of{};  // 1-based sigma per node
  int orbit_count = 0;
  std::uint64_t automorphism_count = 0;

  int edge_count() const { return graph.edge_count(); }
  bool is_clique() const { return graph.is_complete(); }

  unsigned orbit_mask(int sigma) const {
    unsigned mask = 0;
    for (int v = 0; v < order; ++v)
      if (orbit_of[v] == sigma) mask |= 1u << v;
    return mask;
  }

  int orbit_size(int sigma) const { return std::popcount(orbit_mask(sigma)); }

  int representative(int sigma) const {
    const unsigned mask = orbit_mask(sigma);
    if (mask == 0) throw std::out_of_range("pattern has no such orbit");
    return std::countr_zero(mask);
  }

  GraphletId id(int sigma = 0) const { return {order, index, sigma}; }
};

/// Input graph matched against the atlas: pattern index plus the orbit of
/// every input node.
struct Classification {
  int p = 0;
  std::array<int, kMaxSmallOrder> orbit_of{};
};

/// A comparison the ordering rules could not decide; broken by canonical bits
/// (patterns) or canonical node index (orbits).
struct ResidualTie {
  enum class Kind { pattern, orbit };
  Kind kind = Kind::pattern;
  int s = 0;
  int p = 0;
  int first = 0;  // p for pattern ties, sigma for orbit ties
  int second = 0;
};

/// All connected s-node graphs up to isomorphism, as canonical graphs
/// sorted by canonical bits. Orders up to six come from scanning every
/// edge set; seven and eight extend the (s-1)-node classes by one node.
inline std::vector<SmallGraph> enumerate_family(int s) {
  if (s < 1 || s > kMaxSmallOrder) {
    throw std::out_of_range("family order must be in [1, 8]");
  }
  std::set<EdgeBits> classes;
  if (s <= 6) {
    const int pairs = s * (s - 1) / 2;
    for (EdgeBits bits = 0; bits < (EdgeBits{1} << pairs); ++bits) {
      SmallGraph g = SmallGraph::from_bits(s, bits);
      if (g.connected()) classes.insert(canonical_form(g).bits);
    }
  } else {
    // Every connected graph has a non-cut node, so deleting it leaves a
    // connected (s-1)-node graph.
    for (const SmallGraph& base : enumerate_family(s - 1)) {
      for (unsigned attach = 1; attach < (1u << (s - 1)); ++attach) {
        SmallGraph g(s);
        for (int j = 1; j < s - 1; ++j)
          for (int i = 0; i < j; ++i)
            if (base.adjacent(i, j)) g.add_edge(i, j);
        for (unsigned a = attach; a; a &= a - 1)
          g.add_edge(std::countr_zero(a), s - 1);
        classes.insert(canonical_form(g).bits);
      }
    }
  }
  std::vector<SmallGraph> out;
  out.reserve(classes.size());
  for (EdgeBits bits : classes) out.push_back(SmallGraph::from_bits(s, bits));
  return out;
}

namespace detail {

using SparseCounts = std::vector<std::pair<int, int>>;  // (index, count)
using Column = std::array<std::uint16_t, kMaxSmallOrder>;
using SparseColumns = std::vector<std::pair<int, Column>>;

// Lexicographic comparison of the dense vectors the sparse lists stand for.
template <class Entry, class Zero>
std::strong_ordering compare_sparse(const std::vector<std::pair<int, Entry>>& a,
                                    const std::vector<std::pair<int, Entry>>& b,
                                    const Zero& zero) {
  std::size_t i = 0, j = 0;
  constexpr int kEnd = std::numeric_limits<int>::max();
  while (i < a.size() || j < b.size()) {
    const int ka = i < a.size() ? a[i].first : kEnd;
    const int kb = j < b.size() ? b[j].first : kEnd;
    std::strong_ordering c = std::strong_ordering::equal;
    if (ka == kb) {
      c = a[i].second <=> b[j].second;
      ++i;
      ++j;
    } else if (ka < kb) {
      c = a[i].second <=> Entry(zero);
      ++i;
    } else {
      c = Entry(zero) <=> b[j].second;
      ++j;
    }
    if (c != 0) return c;
  }
  return std::strong_ordering::equal;
}

}  // namespace detail

/// Graphlet families 1..max_order with canonical indexing.
class Atlas {
 public:
  static Atlas build(int max_order) {
    if (max_order < 1 || max_order > kMaxSmallOrder) {
      throw std::out_of_range("atlas order must be in [1, 8]");
    }
    Atlas atlas;
    for (int s = 1; s <= max_order; ++s) {
      atlas.append_family(enumerate_family(s));
    }
    return atlas;
  }

  /// Reads the export format written by write().
  static Atlas parse(std::istream& in);

  int max_order() const { return static_cast<int>(families_.size()); }

  const std::vector<Pattern>& family(int s) const {
    check_order(s);
    return families_[s - 1];
  }

  const Pattern& pattern(int s, int p) const {
    const auto& fam = family(s);
    if (p < 1 || p > static_cast<int>(fam.size())) {
      throw std::out_of_range("no pattern " + std::to_string(p) +
                              " in family " + std::to_string(s));
    }
    return fam[p - 1];
  }

  std::size_t pattern_count(int s) const { return family(s).size(); }

  std::size_t graphlet_count(int s) const {
    std::size_t n = 0;
    for (const auto& pat : family(s)) n += pat.orbit_count;
    return n;
  }

  /// Family s in atlas order.
  std::vector<GraphletId> graphlets(int s, GraphletMode mode) const {
    std::vector<GraphletId> ids;
    for (const auto& pat : family(s)) {
      if (mode == GraphletMode::hatted) {
        ids.push_back(pat.id(0));
      } else {
        for (int sigma = 1; sigma <= pat.orbit_count; ++sigma)
          ids.push_back(pat.id(sigma));
      }
    }
    return ids;
  }

  /// Families 1..t in atlas order.
  std::vector<GraphletId> graphlets_up_to(int t, GraphletMode mode) const {
    std::vector<GraphletId> ids;
    for (int s = 1; s <= t; ++s) {
      auto fam = graphlets(s, mode);
      ids.insert(ids.end(), fam.begin(), fam.end());
    }
    return ids;
  }

  struct GraphletView {
    const Pattern* pattern = nullptr;
    int sigma = 0;
    const SmallGraph& graph() const { return pattern->graph; }
    unsigned designated() const {
      return sigma == 0 ? pattern->graph.all_nodes()
                        : pattern->orbit_mask(sigma);
    }
  };

  GraphletView lookup(const GraphletId& id) const {
    if (id.s < 1 || id.s > max_order()) {
      throw std::out_of_range("unknown graphlet " + to_string(id));
    }
    const Pattern& pat = pattern(id.s, id.p);
    if (id.sigma < 0 || id.sigma > pat.orbit_count) {
      throw std::out_of_range("unknown graphlet " + to_string(id));
    }
    return {&pat, id.sigma};
  }

  Classification classify(const SmallGraph& h) const {
    const int s = h.order();
    check_order(s);
    const CanonicalForm canon = canonical_form(h);
    auto it = index_[s - 1].find(canon.bits);
    if (it == index_[s - 1].end()) {
      throw std::invalid_argument("graph is not a connected graphlet");
    }
    Classification out;
    out.p = it->second + 1;
    const Pattern& pat = families_[s - 1][it->second];
    for (int v = 0; v < s; ++v) out.orbit_of[v] = pat.orbit_of[canon.position[v]];
    return out;
  }

  const std::vector<ResidualTie>& residual_ties() const { return ties_; }

  void write(std::ostream& out) const {
    out << "# gsurf atlas v1\n";
    out << "# max_order " << max_order() << "\n";
    out << "# fields: s p sigma m edge_bitset_hex orbit_vector "
           "automorphism_count\n";
    for (const auto& tie : ties_) {
      out << "# tie " << (tie.kind == ResidualTie::Kind::pattern ? "pattern" : "orbit")
          << " s=" << tie.s << " p=" << tie.p << " " << tie.first << " "
          << tie.second << "\n";
    }
    for (const auto& fam : families_) {
      for (const auto& pat : fam) {
        std::ostringstream orbits;
        for (int v = 0; v < pat.order; ++v) {
          if (v) orbits << ',';
          orbits << pat.orbit_of[v];
        }
        for (int sigma = 0; sigma <= pat.orbit_count; ++sigma) {
          out << pat.order << ' ' << pat.index << ' ' << sigma << ' '
              << pat.edge_count() << " 0x" << std::hex << pat.graph.bits()
              << std::dec << ' ' << orbits.str() << ' '
              << pat.automorphism_count << '\n';
        }
      }
    }
  }

  std::string export_text() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  /// FNV-1a over the export text; identifies an atlas version.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : export_text()) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  std::string hash_hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash();
    return os.str();
  }

 private:
  void check_order(int s) const {
    if (s < 1 || s > max_order()) {
      throw std::out_of_range("atlas has no family " + std::to_string(s));
    }
  }

  void install_family(std::vector<Pattern> fam) {
    std::unordered_map<EdgeBits, int> index;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      index.emplace(fam[i].graph.bits(), static_cast<int>(i));
    }
    families_.push_back(std::move(fam));
    index_.push_back(std::move(index));
  }

  // Flat atlas index of every orbit graphlet in the current families.
  std::vector<std::vector<int>> flat_offsets() const {
    std::vector<std::vector<int>> offsets;
    int next = 0;
    for (const auto& fam : families_) {
      offsets.emplace_back();
      for (const auto& pat : fam) {
        offsets.back().push_back(next);
        next += pat.orbit_count;
      }
    }
    return offsets;
  }

  void append_family(const std::vector<SmallGraph>& classes);

  std::vector<std::vector<Pattern>> families_;
  std::vector<std::unordered_map<EdgeBits, int>> index_;
  std::vector<ResidualTie> ties_;
};

inline void Atlas::append_family(const std::vector<SmallGraph>& classes) {
  const int s = max_order() + 1;
  const auto offsets = flat_offsets();
  std::unordered_map<std::uint64_t, Classification> cache;

  struct Candidate {
    SmallGraph graph;
    AutomorphismInfo autos;
    std::vector<detail::SparseCounts> node_features;
    detail::SparseColumns key;
  };
  std::vector<Candidate> cands;
  cands.reserve(classes.size());

  for (const SmallGraph& g : classes) {
    Candidate c{g, automorphisms(g), {}, {}};
    // Net counts f(H_k | g)(v) of every graphlet H_k in smaller families.
    std::vector<std::map<int, int>> feat(s);
    for (unsigned mask = 1; mask < g.all_nodes(); ++mask) {
      if (!g.connected(mask)) continue;
      const SmallGraph sub = g.induced(mask);
      const std::uint64_t key =
          (std::uint64_t(sub.order()) << 32) | sub.bits();
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, classify(sub)).first;
      const Classification& cls = it->second;
      const int base = offsets[sub.order() - 1][cls.p - 1];
      int local = 0;
      for (unsigned m = mask; m; m &= m - 1, ++local) {
        ++feat[std::countr_zero(m)][base + cls.orbit_of[local] - 1];
      }
    }
    std::map<int, detail::Column> columns;
    for (int v = 0; v < s; ++v) {
      c.node_features.emplace_back(feat[v].begin(), feat[v].end());
      for (auto [k, count] : feat[v]) {
        columns[k][v] = static_cast<std::uint16_t>(count);
      }
    }
    for (auto& [k, col] : columns) {
      // Frequency sequence: non-decreasing, padded with the zeros of
      // nodes beyond s so every key compares over the same length.
      std::sort(col.begin(), col.begin() + s);
      c.key.emplace_back(k, col);
    }
    cands.push_back(std::move(c));
  }

  const detail::Column zero_column{};
  auto key_order = [&](const Candidate& a, const Candidate& b) {
    if (auto c = a.graph.edge_count() <=> b.graph.edge_count(); c != 0) return c;
    return detail::compare_sparse(a.key, b.key, zero_column);
  };
  std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
    auto c = key_order(a, b);
    if (c != 0) return c < 0;
    return a.graph.bits() < b.graph.bits();
  });

  std::vector<Pattern> fam;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    Candidate& c = cands[i];
    if (i > 0 && key_order(cands[i - 1], c) == 0) {
      ties_.push_back({ResidualTie::Kind::pattern, s, 0,
                       static_cast<int>(i), static_cast<int>(i + 1)});
    }
    Pattern pat;
    pat.order = s;
    pat.index = static_cast<int>(i + 1);
    pat.graph = c.graph;
    pat.automorphism_count = c.autos.group_size;

    std::vector<int> roots;
    for (int v = 0; v < s; ++v)
      if (c.autos.orbit_root[v] == v) roots.push_back(v);
    auto orbit_order = [&](int a, int b) {
      return detail::compare_sparse(c.node_features[a], c.node_features[b], 0);
    };
    std::sort(roots.begin(), roots.end(), [&](int a, int b) {
      auto cmp = orbit_order(a, b);
      return cmp != 0 ? cmp < 0 : a < b;
    });
    for (std::size_t r = 1; r < roots.size(); ++r) {
      if (orbit_order(roots[r - 1], roots[r]) == 0) {
        ties_.push_back({ResidualTie::Kind::orbit, s, pat.index,
                         static_cast<int>(r), static_cast<int>(r + 1)});
      }
    }
    pat.orbit_count = static_cast<int>(roots.size());
    for (int v = 0; v < s; ++v) {
      const int root = c.autos.orbit_root[v];
      pat.orbit_of[v] = static_cast<int>(
          std::find(roots.begin(), roots.end(), root) - roots.begin()) + 1;
    }
    fam.push_back(pat);
  }
  install_family(std::move(fam));
}

inline Atlas Atlas::parse(std::istream& in) {
  struct Row {
    int p = 0, m = 0;
    EdgeBits bits = 0;
    std::vector<int> orbits;
    std::uint64_t autos = 0;
    int max_sigma = 0;
  };
  std::map<int, std::map<int, Row>> rows;
  std::vector<ResidualTie> ties;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("atlas line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ts(line);
      std::string hash_mark, word, kind, s_field, p_field;
      ts >> hash_mark >> word;
      if (word == "tie") {
        ResidualTie tie;
        ts >> kind >> s_field >> p_field >> tie.first >> tie.second;
        tie.kind = kind == "pattern" ? ResidualTie::Kind::pattern
                                     : ResidualTie::Kind::orbit;
        tie.s = std::stoi(s_field.substr(2));
        tie.p = std::stoi(p_field.substr(2));
        ties.push_back(tie);
      }
      continue;
    }
    std::istringstream ls(line);
    int s = 0, p = 0, sigma = 0, m = 0;
    std::string hex, orbit_text;
    std::uint64_t autos = 0;
    if (!(ls >> s >> p >> sigma >> m >> hex >> orbit_text >> autos)) {
      fail("expected 's p sigma m edge_bitset_hex orbit_vector automorphism_count'");
    }
    if (s < 1 || s > kMaxSmallOrder || p < 1) fail("index out of range");
    Row& row = rows[s][p];
    row.p = p;
    row.m = m;
    row.bits = static_cast<EdgeBits>(std::stoul(hex, nullptr, 16));
    row.autos = autos;
    row.max_sigma = std::max(row.max_sigma, sigma);
    row.orbits.clear();
    std::istringstream os(orbit_text);
    for (std::string tok; std::getline(os, tok, ',');) row.orbits.push_back(std::stoi(tok));
    if (static_cast<int>(row.orbits.size()) != s) fail("orbit vector length differs from s");
  }
  Atlas atlas;
  int expect = 1;
  for (auto& [s, fam_rows] : rows) {
    if (s != expect++) throw std::runtime_error("atlas families are not contiguous");
    std::vector<Pattern> fam;
    int expect_p = 1;
    for (auto& [p, row] : fam_rows) {
      if (p != expect_p++) throw std::runtime_error("atlas patterns are not contiguous");
      Pattern pat;
      pat.order = s;
      pat.index = p;
      pat.graph = SmallGraph::from_bits(s, row.bits);
      if (pat.edge_count() != row.m || canonical_form(pat.graph).bits != row.bits) {
        throw std::runtime_error("atlas pattern " + std::to_string(s) + "," +
                                 std::to_string(p) + " is not canonical");
      }
      pat.automorphism_count = row.autos;
      pat.orbit_count = *std::max_element(row.orbits.begin(), row.orbits.end());
      if (pat.orbit_count != row.max_sigma) {
        throw std::runtime_error("atlas orbit records disagree with orbit vector");
      }
      for (int v = 0; v < s; ++v) pat.orbit_of[v] = row.orbits[v];
      fam.push_back(pat);
    }
    atlas.install_family(std::move(fam));
  }
  atlas.ties_ = std::move(ties);
  return atlas;
}

}  // namespace gsurf
