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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsurf/atlas.hpp"
#include "gsurf/count.hpp"

namespace gsurf {

/// Per-vertex counts over an ordered graphlet list, stored row-major.
template <class Count>
class FrequencyTable {
 public:
  enum class Kind { net, gross };

  FrequencyTable() = default;
  FrequencyTable(std::vector<GraphletId> order, std::size_t vertices, Kind kind = Kind::net)
      : order_(std::move(order)), vertices_(vertices), kind_(kind),
        values_(order_.size() * vertices, Count(0)) {}

  const std::vector<GraphletId>& order() const { return order_; }
  std::size_t vertex_count() const { return vertices_; }
  std::size_t width() const { return order_.size(); }
  Kind kind() const { return kind_; }

  std::size_t index_of(const GraphletId& id) const {
    auto it = std::find(order_.begin(), order_.end(), id);
    if (it == order_.end()) throw std::out_of_range("graphlet not in table: " + to_string(id));
    return static_cast<std::size_t>(it - order_.begin());
  }

  Count& at(std::size_t v, std::size_t i) { return values_[v * width() + i]; }
  const Count& at(std::size_t v, std::size_t i) const { return values_[v * width() + i]; }
  const Count& at(std::size_t v, const GraphletId& id) const { return at(v, index_of(id)); }

  std::span<Count> row(std::size_t v) { return {values_.data() + v * width(), width()}; }
  std::span<const Count> row(std::size_t v) const {
    return {values_.data() + v * width(), width()};
  }

  /// Sum of one column over all vertices.
  Count column_sum(std::size_t i) const {
    Count total = 0;
    for (std::size_t v = 0; v < vertices_; ++v) total = checked_add(total, at(v, i));
    return total;
  }

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  std::vector<GraphletId> order_;
  std::size_t vertices_ = 0;
  Kind kind_ = Kind::net;
  std::vector<Count> values_;
};

/// Orbit-specific table -> hatted table: each pattern's entry is the sum of
/// its orbit entries at the same vertex.
template <class Count>
FrequencyTable<Count> aggregate_orbits(const Atlas& atlas, const FrequencyTable<Count>& table) {
  std::vector<GraphletId> hatted;
  std::vector<std::size_t> target(table.width());
  for (std::size_t i = 0; i < table.width(); ++i) {
    const GraphletId& id = table.order()[i];
    if (id.sigma == 0) throw std::invalid_argument("aggregate_orbits expects an orbit table");
    atlas.lookup(id);
    GraphletId h{id.s, id.p, 0};
    auto it = std::find(hatted.begin(), hatted.end(), h);
    if (it == hatted.end()) {
      hatted.push_back(h);
      target[i] = hatted.size() - 1;
    } else {
      target[i] = static_cast<std::size_t>(it - hatted.begin());
    }
  }
  FrequencyTable<Count> out(hatted, table.vertex_count(), table.kind());
  for (std::size_t v = 0; v < table.vertex_count(); ++v)
    for (std::size_t i = 0; i < table.width(); ++i)
      out.at(v, target[i]) = checked_add(out.at(v, target[i]), table.at(v, i));
  return out;
}

}  // namespace gsurf
