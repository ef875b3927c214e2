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
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsurf/atlas.hpp"
#include "gsurf/int_matrix.hpp"

namespace gsurf {

class ConversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of subgraphs of H_j isomorphic to H_i (edge-subset sense).
///
/// Orbit mode (both sigma >= 1): only subgraphs containing a fixed node v
/// of orbit sigma_j, with v in orbit sigma_i of the copy. Hatted mode
/// (both sigma == 0): all copies anywhere in H_j.
inline std::int64_t pairwise_gross(const Atlas& atlas, const GraphletId& hi,
                                   const GraphletId& hj) {
  if ((hi.sigma == 0) != (hj.sigma == 0)) {
    throw std::invalid_argument("pairwise_gross: mixed orbit and hatted ids");
  }
  const auto vi = atlas.lookup(hi);
  const auto vj = atlas.lookup(hj);
  if (hi.s > hj.s) return 0;
  const std::int64_t aut = vi.pattern->automorphism_count;
  std::int64_t embeddings = 0;
  if (hi.sigma == 0) {
    embeddings = static_cast<std::int64_t>(count_embeddings(vi.graph(), vj.graph()));
  } else {
    const int v = vj.pattern->representative(hj.sigma);
    for (unsigned m = vi.designated(); m; m &= m - 1) {
      embeddings += static_cast<std::int64_t>(
          count_embeddings(vi.graph(), vj.graph(), std::countr_zero(m), v));
    }
  }
  return exact_div(embeddings, aut);
}

/// Intra-family matrix U_s (orbit mode) or its hatted analogue, rows and
/// columns in atlas order.
inline IntMatrix build_U(const Atlas& atlas, int s, GraphletMode mode) {
  const auto ids = atlas.graphlets(s, mode);
  IntMatrix u(ids.size(), ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i; j < ids.size(); ++j) u(i, j) = pairwise_gross(atlas, ids[i], ids[j]);
  if (!u.is_upper_triangular() || !u.has_unit_diagonal()) {
    throw ConversionError("U matrix is not unit upper triangular; atlas order is broken");
  }
  return u;
}

/// lambda_i = (-1)^{m(H_i)} for each id.
inline std::vector<int> sign_diagonal(const Atlas& atlas, const std::vector<GraphletId>& ids) {
  std::vector<int> lambda;
  lambda.reserve(ids.size());
  for (const auto& id : ids) {
    lambda.push_back(atlas.pattern(id.s, id.p).edge_count() % 2 == 0 ? 1 : -1);
  }
  return lambda;
}

/// U^{-1} = Lambda U Lambda, checked against U U^{-1} = I.
inline IntMatrix invert_involutory(const IntMatrix& u, const std::vector<int>& lambda) {
  if (u.rows() != u.cols() || lambda.size() != u.rows()) {
    throw std::invalid_argument("invert_involutory: shape mismatch");
  }
  IntMatrix inv(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) inv(i, j) = lambda[i] * u(i, j) * lambda[j];
  if (!(u * inv == IntMatrix::identity(u.rows()))) {
    throw ConversionError("sign-diagonal inverse failed verification");
  }
  return inv;
}

inline IntMatrix inverse_U(const Atlas& atlas, int s, GraphletMode mode) {
  return invert_involutory(build_U(atlas, s, mode), sign_diagonal(atlas, atlas.graphlets(s, mode)));
}

/// Stacked matrices over families 1..t.
struct InterFamily {
  int t = 0;
  GraphletMode mode = GraphletMode::orbit;
  std::vector<GraphletId> order;
  /// family_offset[s] is the first row of family s; family_offset[t+1] = size.
  std::vector<std::size_t> family_offset;
  IntMatrix u_tilde;
  IntMatrix w_tilde;
  /// Per-family U_s and U_s^{-1}, index s (entry 0 unused).
  std::vector<IntMatrix> u;
  std::vector<IntMatrix> u_inv;

  std::size_t size() const { return order.size(); }
  std::size_t family_size(int s) const { return family_offset[s + 1] - family_offset[s]; }

  /// Block W_{r,s}: rows from family r, columns from family s.
  IntMatrix w_block(int r, int s) const {
    return w_tilde.block(family_offset[r], family_offset[s], family_size(r), family_size(s));
  }
};

namespace detail {
inline InterFamily frame_inter_family(const Atlas& atlas, int t, GraphletMode mode) {
  if (t < 1 || t > atlas.max_order()) throw std::out_of_range("inter-family matrices: bad t");
  InterFamily out;
  out.t = t;
  out.mode = mode;
  out.family_offset.assign(t + 2, 0);
  for (int s = 1; s <= t; ++s) {
    out.family_offset[s] = out.order.size();
    auto fam = atlas.graphlets(s, mode);
    out.order.insert(out.order.end(), fam.begin(), fam.end());
  }
  out.family_offset[t + 1] = out.order.size();
  return out;
}

// Fills U_s, U_s^{-1} and W~ from a complete U~.
inline void derive_inter_family(const Atlas& atlas, InterFamily& out) {
  const std::size_t n = out.order.size();
  out.u.assign(out.t + 1, IntMatrix());
  out.u_inv.assign(out.t + 1, IntMatrix());
  for (int s = 1; s <= out.t; ++s) {
    const std::size_t r0 = out.family_offset[s], nr = out.family_size(s);
    out.u[s] = out.u_tilde.block(r0, r0, nr, nr);
    if (!out.u[s].is_upper_triangular() || !out.u[s].has_unit_diagonal()) {
      throw ConversionError("U_" + std::to_string(s) + " is not unit upper triangular");
    }
    const std::vector<GraphletId> fam(out.order.begin() + r0, out.order.begin() + r0 + nr);
    out.u_inv[s] = invert_involutory(out.u[s], sign_diagonal(atlas, fam));
  }
  // W~ = diag(U_s^{-1}) U~, one block row at a time.
  out.w_tilde = IntMatrix(n, n);
  for (int s = 1; s <= out.t; ++s) {
    const std::size_t r0 = out.family_offset[s], nr = out.family_size(s);
    IntMatrix rows = out.u_inv[s] * out.u_tilde.block(r0, 0, nr, n);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (rows(i, j) < 0) throw ConversionError("negative net count in W~");
        out.w_tilde(r0 + i, j) = rows(i, j);
      }
  }
}
}  // namespace detail

inline InterFamily build_inter_family(const Atlas& atlas, int t, GraphletMode mode) {
  InterFamily out = detail::frame_inter_family(atlas, t, mode);
  const std::size_t n = out.order.size();
  out.u_tilde = IntMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (out.order[i].s <= out.order[j].s)
        out.u_tilde(i, j) = pairwise_gross(atlas, out.order[i], out.order[j]);
  detail::derive_inter_family(atlas, out);
  return out;
}

/// Rebuilds every derived matrix from a stored U~, re-running the
/// involution check on each diagonal block.
inline InterFamily inter_family_from_u_tilde(const Atlas& atlas, int t, GraphletMode mode,
                                             IntMatrix u_tilde) {
  InterFamily out = detail::frame_inter_family(atlas, t, mode);
  if (u_tilde.rows() != out.size() || u_tilde.cols() != out.size()) {
    throw ConversionError("stored U~ has the wrong dimensions for t = " + std::to_string(t));
  }
  out.u_tilde = std::move(u_tilde);
  detail::derive_inter_family(atlas, out);
  return out;
}

/// U with row i and column j deleted. The result is nonsingular exactly
/// when U(j, i) != 0: it is then a permuted triangular matrix.
struct ReducedMatrix {
  IntMatrix matrix;
  bool nonsingular = false;
};

inline ReducedMatrix reduced_matrix(const IntMatrix& u, std::size_t i, std::size_t j) {
  ReducedMatrix r;
  r.matrix = u.without(i, j);
  r.nonsingular = u(j, i) != 0;
  return r;
}

// ---------------------------------------------------------------------------
// Sparse triplet serialization.

struct MatrixHeader {
  std::string kind;
  std::string atlas_hash;
  int t = 0;
  GraphletMode mode = GraphletMode::orbit;
  std::vector<GraphletId> order;
};

inline void write_matrix(std::ostream& out, const MatrixHeader& header, const IntMatrix& m) {
  out << "# gsurf matrix v1\n";
  out << "# kind " << header.kind << '\n';
  out << "# atlas " << header.atlas_hash << '\n';
  out << "# t " << header.t << '\n';
  out << "# mode " << to_string(header.mode) << '\n';
  out << "# dim " << m.rows() << ' ' << m.cols() << '\n';
  out << "# order";
  for (const auto& id : header.order) out << ' ' << id.s << ',' << id.p << ',' << id.sigma;
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) out << i << ' ' << j << ' ' << m(i, j) << '\n';
}

inline std::pair<MatrixHeader, IntMatrix> read_matrix(std::istream& in) {
  MatrixHeader header;
  std::optional<std::pair<std::size_t, std::size_t>> dim;
  IntMatrix m;
  std::string line;
  bool magic = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash_mark, key;
      ls >> hash_mark >> key;
      if (key == "gsurf") {
        magic = true;
      } else if (key == "kind") {
        ls >> header.kind;
      } else if (key == "atlas") {
        ls >> header.atlas_hash;
      } else if (key == "t") {
        ls >> header.t;
      } else if (key == "mode") {
        std::string mode;
        ls >> mode;
        header.mode = parse_mode(mode);
      } else if (key == "dim") {
        std::size_t r = 0, c = 0;
        ls >> r >> c;
        dim.emplace(r, c);
        m = IntMatrix(r, c);
      } else if (key == "order") {
        std::string token;
        while (ls >> token) {
          GraphletId id{};
          char c1 = 0, c2 = 0;
          std::istringstream ts(token);
          if (!(ts >> id.s >> c1 >> id.p >> c2 >> id.sigma) || c1 != ',' || c2 != ',') {
            throw std::runtime_error("bad graphlet id in matrix header: " + token);
          }
          header.order.push_back(id);
        }
      }
      continue;
    }
    if (!magic || !dim) throw std::runtime_error("matrix file is missing its header");
    std::size_t i = 0, j = 0;
    std::int64_t value = 0;
    if (!(ls >> i >> j >> value)) throw std::runtime_error("bad matrix triplet: " + line);
    if (i >= m.rows() || j >= m.cols()) throw std::runtime_error("matrix triplet out of range: " + line);
    m(i, j) = value;
  }
  if (!magic || !dim) throw std::runtime_error("matrix file is missing its header");
  return {header, m};
}

}  // namespace gsurf
