//
// Copyright 2026 The genbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include "genbound/repset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "genbound/errors.hpp"
#include "genbound/numeric.hpp"
#include "json.hpp"

namespace genbound::repset {

namespace ts = genbound::typespace;

namespace {

size_t u(int64_t i) { return static_cast<size_t>(i); }

// Atoms on a cell boundary belong to the lower-index cell.
int64_t cube_cell_of(int64_t x, int64_t n, int64_t t) {
  return std::max<int64_t>(0, ceil_div(x * t, n) - 1);
}

// Center atom of cell j on the [0, n] axis split into t parts: the middle of
// the cell's l' = floor(n/t)+1 atoms, shifted right by half a unit when l' is
// even (the one-unit cell enlargement), clipped at n.
int64_t cube_center_atom(int64_t j, int64_t n, int64_t t) {
  int64_t half = (n / t + 1) / 2;
  return std::min(n, ceil_div(j * n, t) + half);
}

// First atom assigned to cell j (used for the simplex emptiness test).
int64_t cube_cell_first_atom(int64_t j, int64_t n, int64_t t) {
  return j == 0 ? 0 : (j * n) / t + 1;
}

// Project first m-1 center coordinates to a full valid type. Excess mass is
// removed from the front, which is the lexicographically smallest nearest type.
ts::CountVector project_prefix_to_type(std::vector<int64_t> prefix, int64_t n) {
  int64_t sum = 0;
  for (int64_t c : prefix) sum += c;
  int64_t excess = sum - n;
  for (size_t a = 0; a < prefix.size() && excess > 0; ++a) {
    int64_t d = std::min(prefix[a], excess);
    prefix[a] -= d;
    excess -= d;
  }
  int64_t last = n;
  for (int64_t c : prefix) last -= c;
  prefix.push_back(last);
  return ts::CountVector{std::move(prefix)};
}

GridSpec build_cube_or_simplex(int64_t n, int64_t m, int64_t t, GridVariant variant,
                               int64_t cap) {
  bool simplex = variant == GridVariant::simplex;
  int64_t raw = simplex ? saturating_binomial(t + m - 2, m - 1) : saturating_pow(t, m - 1);
  if (raw > cap) {
    throw CapacityError("grid with " + std::to_string(raw) + " cells exceeds the cap " +
                        std::to_string(cap));
  }

  GridSpec g;
  g.t = t;
  g.n = n;
  g.m = m;
  g.variant = variant;
  g.cell_side = static_cast<double>(n) / static_cast<double>(t);
  g.delta_t = ceil_div(n, t) + 1;
  g.raw_cell_count = raw;

  int64_t dims = m - 1;
  std::vector<int64_t> coord(u(dims), 0);
  for (;;) {
    int64_t coord_sum = 0;
    for (int64_t c : coord) coord_sum += c;
    bool keep = true;
    if (simplex) {
      keep = coord_sum <= t - 1;  // cells covering the volume under the simplex
      if (keep) {
        int64_t min_corner = 0;
        for (int64_t c : coord) min_corner += cube_cell_first_atom(c, n, t);
        keep = min_corner <= n;  // drop cells holding no valid type
      }
    }
    if (keep) {
      std::vector<int64_t> center(u(dims));
      for (int64_t a = 0; a < dims; ++a) center[u(a)] = cube_center_atom(coord[u(a)], n, t);
      g.cell_coords.push_back(coord);
      g.representatives.push_back(project_prefix_to_type(std::move(center), n));
    }
    // odometer
    int64_t a = dims - 1;
    while (a >= 0 && coord[u(a)] == t - 1) {
      coord[u(a)] = 0;
      --a;
    }
    if (a < 0) break;
    ++coord[u(a)];
  }
  return g;
}

std::vector<int64_t> typical_cell_of(const ts::CountVector& s, const GridSpec& g) {
  std::vector<int64_t> coord(s.counts.size());
  double h = static_cast<double>(g.n) * g.eta;
  for (size_t a = 0; a < s.counts.size(); ++a) {
    double lo = static_cast<double>(g.n) * g.prior->probs[a] - h;
    double x = static_cast<double>(s.counts[a]) - lo;
    int64_t j = 0;
    if (g.cell_side > 0.0) {
      j = static_cast<int64_t>(std::ceil(x / g.cell_side)) - 1;
    }
    coord[a] = std::clamp<int64_t>(j, 0, g.t - 1);
  }
  return coord;
}

GridSpec build_typical(int64_t n, int64_t m, int64_t t,
                       const ts::SourceDistribution& prior, double eta, int64_t cap) {
  GridSpec g;
  g.t = t;
  g.n = n;
  g.m = m;
  g.variant = GridVariant::typical;
  g.eta = eta;
  g.prior = prior;
  double h = static_cast<double>(n) * eta;
  g.cell_side = 2.0 * h / static_cast<double>(t);
  g.delta_t = static_cast<int64_t>(std::ceil(g.cell_side)) + 1;

  // The representative of a cell must itself be a strongly typical type from
  // that cell; staying inside the cell is what keeps every member within
  // m n eta / t of it. Among the cell's typical types we take the one nearest
  // the cell center (L1, ties toward the lexicographically smallest).
  ts::TypicalSetSpec spec{eta, n};
  std::map<std::vector<int64_t>, std::pair<double, ts::CountVector>> cells;
  for (const auto& type : ts::enumerate_types(n, m, cap)) {
    if (!ts::is_strongly_typical(type, prior, spec)) continue;
    auto coord = typical_cell_of(type, g);
    double off_center = 0.0;
    for (int64_t a = 0; a < m; ++a) {
      double lo = static_cast<double>(n) * prior.probs[u(a)] - h;
      double center = lo + (static_cast<double>(coord[u(a)]) + 0.5) * g.cell_side;
      off_center += std::abs(static_cast<double>(type.counts[u(a)]) - center);
    }
    auto [it, inserted] = cells.try_emplace(std::move(coord), off_center, type);
    if (!inserted && off_center < it->second.first - 1e-12) it->second = {off_center, type};
  }
  for (const auto& [coord, best] : cells) {
    g.cell_coords.push_back(coord);
    g.representatives.push_back(best.second);
  }
  g.raw_cell_count = static_cast<int64_t>(g.representatives.size());
  return g;
}

}  // namespace

std::string to_string(GridVariant v) {
  switch (v) {
    case GridVariant::full_cube: return "full_cube";
    case GridVariant::simplex: return "simplex";
    case GridVariant::typical: return "typical";
  }
  return "unknown";
}

std::optional<GridVariant> variant_from_string(const std::string& name) {
  for (GridVariant v : {GridVariant::full_cube, GridVariant::simplex, GridVariant::typical})
    if (to_string(v) == name) return v;
  return std::nullopt;
}

GridSpec build_grid(int64_t n, int64_t m, int64_t t, GridVariant variant,
                    const std::optional<ts::SourceDistribution>& prior,
                    std::optional<double> eta, int64_t cap) {
  if (n < 1) throw DomainError("grid needs n >= 1");
  if (m < 2) throw DomainError("grid needs m >= 2");
  if (t < 1 || t > n) throw DomainError("grid parameter t must lie in [1, n]");
  if (variant != GridVariant::typical) return build_cube_or_simplex(n, m, t, variant, cap);

  if (n < 2) throw DomainError("typical grid needs n >= 2");
  ts::SourceDistribution pz = prior.value_or(ts::SourceDistribution::uniform(m));
  ts::validate_source_distribution(pz);
  if (pz.alphabet_size() != m) throw DomainError("prior alphabet size does not match m");
  double width = eta.value_or(ts::TypicalSetSpec::defaults(n).eta);
  if (width < 0.0) throw DomainError("eta must be >= 0");
  return build_typical(n, m, t, pz, width, cap);
}

NearestResult nearest_representative(const ts::CountVector& s, const GridSpec& g) {
  if (s.alphabet_size() != g.m || s.total() != g.n)
    throw DomainError("query type does not match the grid's (n, m)");
  std::vector<int64_t> coord;
  if (g.variant == GridVariant::typical) {
    ts::TypicalSetSpec spec{g.eta, g.n};
    if (!ts::is_strongly_typical(s, *g.prior, spec)) return NearestResult{false, {}, 0};
    coord = typical_cell_of(s, g);
  } else {
    coord.resize(u(g.m - 1));
    for (int64_t a = 0; a < g.m - 1; ++a) coord[u(a)] = cube_cell_of(s.counts[u(a)], g.n, g.t);
  }
  for (size_t i = 0; i < g.cell_coords.size(); ++i) {
    if (g.cell_coords[i] == coord) {
      const auto& rep = g.representatives[i];
      return NearestResult{true, rep, ts::dataset_distance(s, rep)};
    }
  }
  return NearestResult{false, {}, 0};
}

SimplexCellCount simplex_cell_count(int64_t m, int64_t t) {
  if (m < 2) throw DomainError("simplex cell count needs m >= 2");
  if (t < 1) throw DomainError("simplex cell count needs t >= 1");
  SimplexCellCount out;
  int64_t exact = saturating_binomial(t + m - 2, m - 1);
  if (exact < std::numeric_limits<int64_t>::max()) out.exact = exact;
  out.log_exact = log_binomial(t + m - 2, m - 1);
  out.log_upper = static_cast<double>(m - 1) *
                      std::log(static_cast<double>(t) + static_cast<double>(m - 2) / 2.0) -
                  std::lgamma(static_cast<double>(m));
  out.upper = std::exp(out.log_upper);
  return out;
}

NeighborCheck neighbor_distance_check(const GridSpec& g) {
  size_t count = g.representatives.size();
  if (count < 2) return NeighborCheck{false, 0};
  int64_t worst = 0;
  for (size_t i = 0; i < count; ++i) {
    int64_t nearest = std::numeric_limits<int64_t>::max();
    for (size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      nearest = std::min(nearest, ts::dataset_distance(g.representatives[i], g.representatives[j]));
    }
    worst = std::max(worst, nearest);
  }
  return NeighborCheck{true, worst};
}

std::string grid_to_json(const GridSpec& g, int indent) {
  nlohmann::ordered_json j;
  j["t"] = g.t;
  j["variant"] = to_string(g.variant);
  j["delta_t"] = g.delta_t;
  j["M"] = g.raw_cell_count;
  auto reps = nlohmann::ordered_json::array();
  for (const auto& rep : g.representatives) reps.push_back(rep.counts);
  j["representatives"] = reps;
  return j.dump(indent);
}

}  // namespace genbound::repset
