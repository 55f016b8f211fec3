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
#include <cmath>

#include "doctest.h"
#include "genbound/errors.hpp"
#include "genbound/repset.hpp"
#include "json.hpp"

namespace ts = genbound::typespace;
namespace rep = genbound::repset;
using genbound::DomainError;

TEST_CASE("t = 1 grids have a single representative") {
  for (auto variant : {rep::GridVariant::full_cube, rep::GridVariant::simplex}) {
    auto g = rep::build_grid(6, 3, 1, variant);
    CHECK(g.representatives.size() == 1);
    CHECK_FALSE(rep::neighbor_distance_check(g).applicable);
  }
  auto g = rep::build_grid(6, 3, 1, rep::GridVariant::typical,
                           ts::SourceDistribution::uniform(3));
  CHECK(g.representatives.size() == 1);
}

TEST_CASE("binary full-cube grid at n=6, t=3") {
  auto g = rep::build_grid(6, 2, 3, rep::GridVariant::full_cube);
  REQUIRE(g.representatives.size() == 3);
  CHECK(g.raw_cell_count == 3);
  CHECK(g.delta_t == 3);  // ceil(6/3) + 1

  // every one of the 7 types sits within (m-1) n / t = 2 of its representative
  for (const auto& s : ts::enumerate_types(6, 2)) {
    auto near = rep::nearest_representative(s, g);
    REQUIRE(near.covered);
    CHECK(near.distance <= 2);
  }
  CHECK(rep::neighbor_distance_check(g).max_min_distance <= g.delta_t);
}

TEST_CASE("representative of its own cell is at distance zero") {
  auto g = rep::build_grid(9, 3, 3, rep::GridVariant::simplex);
  for (const auto& r : g.representatives) {
    auto near = rep::nearest_representative(r, g);
    REQUIRE(near.covered);
    CHECK(near.distance == 0);
  }
}

TEST_CASE("unit-cell grids put neighbors within delta") {
  auto g = rep::build_grid(6, 2, 6, rep::GridVariant::full_cube);
  auto nb = rep::neighbor_distance_check(g);
  REQUIRE(nb.applicable);
  CHECK(nb.max_min_distance <= 2);  // delta_t = ceil(6/6) + 1
}

TEST_CASE("simplex cell counts collapse to the closed form") {
  auto c52 = rep::simplex_cell_count(2, 5);
  REQUIRE(c52.exact.has_value());
  CHECK(*c52.exact == 5);
  CHECK(c52.upper == doctest::Approx(5.0).epsilon(1e-12));

  auto c32 = rep::simplex_cell_count(3, 2);
  CHECK(*c32.exact == 3);
  CHECK(c32.upper == doctest::Approx(3.125).epsilon(1e-12));

  for (int64_t m : {2, 4, 9}) {
    auto one = rep::simplex_cell_count(m, 1);
    CHECK(*one.exact == 1);
  }
}

TEST_CASE("simplex grids drop cells holding no valid type") {
  for (int64_t n = 1; n <= 10; ++n) {
    for (int64_t t = 1; t <= n; ++t) {
      auto g = rep::build_grid(n, 3, t, rep::GridVariant::simplex);
      CHECK(g.raw_cell_count == *rep::simplex_cell_count(3, t).exact);
      CHECK(static_cast<int64_t>(g.representatives.size()) <= g.raw_cell_count);
      // every type still lands in a kept cell
      for (const auto& s : ts::enumerate_types(n, 3))
        CHECK(rep::nearest_representative(s, g).covered);
    }
  }
}

TEST_CASE("full-cube representative count matches t^(m-1)") {
  auto g = rep::build_grid(5, 3, 2, rep::GridVariant::full_cube);
  CHECK(g.raw_cell_count == 4);
  CHECK(g.representatives.size() == 4);
}

TEST_CASE("covering radius holds exhaustively on a small sweep") {
  for (int64_t m : {2, 3}) {
    for (int64_t n = 1; n <= 8; ++n) {
      for (int64_t t = 1; t <= n; ++t) {
        for (auto variant : {rep::GridVariant::full_cube, rep::GridVariant::simplex}) {
          auto g = rep::build_grid(n, m, t, variant);
          for (const auto& s : ts::enumerate_types(n, m)) {
            auto near = rep::nearest_representative(s, g);
            REQUIRE(near.covered);
            CHECK(near.distance * t <= (m - 1) * n);
          }
        }
      }
    }
  }
}

TEST_CASE("typical grids cover exactly the strongly typical types") {
  auto prior = ts::SourceDistribution::uniform(2);
  auto g = rep::build_grid(4, 2, 2, rep::GridVariant::typical, prior);
  ts::TypicalSetSpec spec{g.eta, 4};
  for (const auto& s : ts::enumerate_types(4, 2)) {
    auto near = rep::nearest_representative(s, g);
    if (ts::is_strongly_typical(s, prior, spec)) {
      REQUIRE(near.covered);
      CHECK(static_cast<double>(near.distance) <=
            2.0 * 4.0 * g.eta / 2.0 + 1e-9);  // m n eta / t
    } else {
      CHECK_FALSE(near.covered);
    }
  }
  // representatives are typical types themselves
  for (const auto& r : g.representatives) CHECK(ts::is_strongly_typical(r, prior, spec));
}

TEST_CASE("atypical queries are flagged as uncovered") {
  ts::SourceDistribution sure{{1.0, 0.0}};
  auto g = rep::build_grid(4, 2, 2, rep::GridVariant::typical, sure);
  CHECK_FALSE(rep::nearest_representative(ts::CountVector{{2, 2}}, g).covered);
  auto on_support = rep::nearest_representative(ts::CountVector{{4, 0}}, g);
  CHECK(on_support.covered);
  CHECK(on_support.distance == 0);
}

TEST_CASE("typical cell count stays under both ceilings") {
  auto prior = ts::SourceDistribution::uniform(3);
  for (int64_t n : {4, 9}) {
    for (int64_t t = 1; t <= n; ++t) {
      auto g = rep::build_grid(n, 3, t, rep::GridVariant::typical, prior);
      auto cube = static_cast<double>(t * t * t);
      auto band = 3.0 * static_cast<double>(t * t);
      CHECK(static_cast<double>(g.raw_cell_count) <= std::min(cube, band));
    }
  }
}

TEST_CASE("grid construction validates its arguments") {
  CHECK_THROWS_AS(rep::build_grid(5, 2, 0, rep::GridVariant::full_cube), DomainError);
  CHECK_THROWS_AS(rep::build_grid(5, 2, 6, rep::GridVariant::full_cube), DomainError);
  CHECK_THROWS_AS(rep::build_grid(1, 2, 1, rep::GridVariant::typical,
                                  ts::SourceDistribution::uniform(2)),
                  DomainError);
  CHECK_THROWS_AS(
      rep::nearest_representative(ts::CountVector{{1, 1}},
                                  rep::build_grid(6, 2, 2, rep::GridVariant::full_cube)),
      DomainError);
}

TEST_CASE("construction is a pure function of its inputs") {
  auto a = rep::build_grid(11, 3, 4, rep::GridVariant::simplex);
  auto b = rep::build_grid(11, 3, 4, rep::GridVariant::simplex);
  CHECK(a.representatives == b.representatives);
  CHECK(a.cell_coords == b.cell_coords);
}

TEST_CASE("grid JSON export carries the documented fields") {
  auto g = rep::build_grid(6, 2, 3, rep::GridVariant::full_cube);
  auto j = nlohmann::json::parse(rep::grid_to_json(g));
  CHECK(j.at("t") == 3);
  CHECK(j.at("variant") == "full_cube");
  CHECK(j.at("delta_t") == 3);
  CHECK(j.at("M") == 3);
  REQUIRE(j.at("representatives").size() == 3);
  for (const auto& counts : j.at("representatives")) {
    int64_t total = 0;
    for (const auto& c : counts) total += c.get<int64_t>();
    CHECK(total == 6);
  }
}

TEST_CASE("variant names round-trip") {
  for (auto v :
       {rep::GridVariant::full_cube, rep::GridVariant::simplex, rep::GridVariant::typical}) {
    auto parsed = rep::variant_from_string(rep::to_string(v));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == v);
  }
  CHECK_FALSE(rep::variant_from_string("diagonal").has_value());
}
