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
#ifndef GENBOUND_REPSET_HPP_
#define GENBOUND_REPSET_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genbound/typespace.hpp"

namespace genbound::repset {

enum class GridVariant {
  full_cube,  // t^{m-1} cells over the count cube
  simplex,    // only cells covering the volume under the simplex
  typical,    // m-dimensional grid over the strongly typical cube
};

std::string to_string(GridVariant v);
std::optional<GridVariant> variant_from_string(const std::string& name);

// A covering of the count space by t splits per dimension, one representative
// dataset per kept cell.
struct GridSpec {
  int64_t t = 1;
  int64_t n = 0;
  int64_t m = 0;
  GridVariant variant = GridVariant::full_cube;
  double cell_side = 0.0;     // n/t, or 2 n eta / t for the typical variant
  int64_t delta_t = 0;        // guaranteed distance to some other representative
  int64_t raw_cell_count = 0; // cells counted by the log M terms, pre-drop
  std::vector<std::vector<int64_t>> cell_coords;          // kept cells
  std::vector<typespace::CountVector> representatives;    // aligned with cell_coords
  double eta = 0.0;                                       // typical only
  std::optional<typespace::SourceDistribution> prior;     // typical only
};

// Splits each free coordinate of [0, n] into t parts, picks the center atom
// of every kept cell, and projects it to the nearest valid type (ties broken
// toward the lexicographically smallest). The typical variant grids the cube
// of half-width n*eta around n*prior instead and keeps only cells holding a
// strongly typical type.
GridSpec build_grid(int64_t n, int64_t m, int64_t t, GridVariant variant,
                    const std::optional<typespace::SourceDistribution>& prior = std::nullopt,
                    std::optional<double> eta = std::nullopt,
                    int64_t cap = typespace::kDefaultEnumerationCap);

struct NearestResult {
  bool covered = false;  // false only for atypical inputs on typical grids
  typespace::CountVector rep;
  int64_t distance = 0;
};

// Representative of the cell containing `s` plus the dataset distance to it.
NearestResult nearest_representative(const typespace::CountVector& s, const GridSpec& g);

struct SimplexCellCount {
  std::optional<int64_t> exact;  // absent when the value overflows int64
  double log_exact = 0.0;
  double upper = 0.0;  // (t + (m-2)/2)^{m-1} / (m-1)!
  double log_upper = 0.0;
};

// Number of grid cells needed to cover the volume under the simplex,
// binomial(t + m - 2, m - 1), with its closed-form upper bound.
SimplexCellCount simplex_cell_count(int64_t m, int64_t t);

struct NeighborCheck {
  bool applicable = false;  // false for single-representative grids
  int64_t max_min_distance = 0;
};

// Max over representatives of the distance to the closest other one.
NeighborCheck neighbor_distance_check(const GridSpec& g);

// {"t":, "variant":, "delta_t":, "M":, "representatives": [[counts], ...]}
std::string grid_to_json(const GridSpec& g, int indent = 2);

}  // namespace genbound::repset

#endif  // GENBOUND_REPSET_HPP_
