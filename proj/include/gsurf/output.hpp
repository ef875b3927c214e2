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
#include <limits>
#include <ostream>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "gsurf/engine.hpp"
#include "gsurf/frequency.hpp"
#include "gsurf/graph.hpp"

namespace gsurf {

/// Everything written ahead of the data so a file can be traced back to
/// the run that made it.
struct Provenance {
  std::string source = "engine";  // or "oracle"
  std::string atlas_hash;
  nlohmann::json config = nlohmann::json::object();
};

namespace detail {

inline std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <class Count>
nlohmann::json count_json(const Count& value) {
  if constexpr (std::is_same_v<Count, std::int64_t>) {
    return value;
  } else {
    if (value >= std::numeric_limits<std::int64_t>::min() &&
        value <= std::numeric_limits<std::int64_t>::max())
      return static_cast<std::int64_t>(value);
    return value.str();
  }
}

}  // namespace detail

template <class Count>
void write_csv(std::ostream& out, const SourceGraph& g, const FrequencyTable<Count>& table,
               const Provenance& prov) {
  out << "# gsurf net counts\n";
  out << "# source " << prov.source << '\n';
  out << "# atlas " << prov.atlas_hash << '\n';
  out << "# config " << prov.config.dump() << '\n';
  out << "vertex_label,graphlet_s,graphlet_p,graphlet_sigma,net_count\n";
  for (std::size_t v = 0; v < table.vertex_count(); ++v) {
    const std::string label = detail::csv_field(g.label(static_cast<VertexId>(v)));
    for (std::size_t i = 0; i < table.width(); ++i) {
      const GraphletId& id = table.order()[i];
      out << label << ',' << id.s << ',' << id.p << ',' << id.sigma << ','
          << count_to_string(table.at(v, i)) << '\n';
    }
  }
}

/// Columnar layout: one array per graphlet, aligned with "vertices".
template <class Count>
nlohmann::json table_json(const SourceGraph& g, const FrequencyTable<Count>& table,
                          const Provenance& prov) {
  nlohmann::json j;
  j["source"] = prov.source;
  j["atlas"] = prov.atlas_hash;
  j["config"] = prov.config;
  j["vertices"] = g.labels();
  auto& columns = j["columns"] = nlohmann::json::array();
  for (std::size_t i = 0; i < table.width(); ++i) {
    const GraphletId& id = table.order()[i];
    nlohmann::json col;
    col["graphlet"] = {id.s, id.p, id.sigma};
    auto& values = col["net_count"] = nlohmann::json::array();
    for (std::size_t v = 0; v < table.vertex_count(); ++v) values.push_back(detail::count_json(table.at(v, i)));
    columns.push_back(std::move(col));
  }
  return j;
}

inline nlohmann::json stats_json(const RunStats& stats, const std::vector<GraphletId>& order,
                                 const Provenance& prov) {
  nlohmann::json j;
  j["atlas"] = prov.atlas_hash;
  j["config"] = prov.config;
  j["t"] = stats.t;
  j["filters"] = stats.filters;
  j["reduced"] = stats.reduced;
  j["workers"] = stats.workers;
  j["seconds"] = stats.seconds;
  auto& families = j["families"] = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& id : order)
    if (id.s < 3) ++offset;
  for (const auto& f : stats.families) {
    nlohmann::json fj;
    fj["s"] = f.s;
    fj["vertices"] = f.vertices;
    for (SystemKind k : kSystemKinds) {
      fj["percent"][to_string(k)] = f.percent(k);
      fj["count"][to_string(k)] = f.count(k);
    }
    fj["reduced_fallbacks"] = f.reduced_fallbacks;
    auto& per = fj["graphlets"] = nlohmann::json::array();
    for (std::size_t k = 0; k < f.zero_flags.size(); ++k) {
      per.push_back({{"graphlet", to_string(order[offset + k])}, {"flagged_zero", f.zero_flags[k]}});
    }
    offset += f.zero_flags.size();
    families.push_back(std::move(fj));
  }
  return j;
}

}  // namespace gsurf
