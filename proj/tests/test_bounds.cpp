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
#include "genbound/bounds.hpp"
#include "genbound/errors.hpp"
#include "genbound/numeric.hpp"

namespace bnd = genbound::bounds;
using genbound::DomainError;
using genbound::kInfinity;

namespace {

bnd::BoundQuery query(int64_t n, int64_t m, double eps, double sigma = 0.5) {
  return bnd::BoundQuery{n, m, {eps, 0.0}, sigma};
}

// Independent scan oracles, kept deliberately literal.
double thm1_scan(int64_t n, int64_t m, double eps) {
  double k = static_cast<double>(m - 1);
  double best = kInfinity;
  for (int64_t t = 1; t <= n; ++t) {
    double f = k * eps * static_cast<double>(n) / static_cast<double>(t) +
               k * std::log(static_cast<double>(t));
    if (t >= 2) f -= std::log1p(std::exp(-eps * static_cast<double>(n)));
    best = std::min(best, f);
  }
  return best;
}

double thm3_scan(int64_t n, int64_t m, double eps) {
  double md = static_cast<double>(m);
  double root = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
  auto t_max = static_cast<int64_t>(std::floor(2.0 * root));
  double best = kInfinity;
  for (int64_t t = 1; t <= t_max; ++t) {
    double td = static_cast<double>(t);
    double f = eps * md * root / td + 2.0 * md * eps / static_cast<double>(n);
    if (t >= 2) {
      f -= std::log1p(std::exp(-eps * (std::ceil(2.0 * root / td) + 1.0)));
      f += std::min(md * std::log(td), std::log(md) + (md - 1.0) * std::log(td));
    }
    best = std::min(best, f);
  }
  return best;
}

}  // namespace

TEST_CASE("query validation rejects out-of-domain inputs") {
  CHECK_THROWS_AS(bnd::bound_eq8(query(0, 2, 0.0)), DomainError);
  CHECK_THROWS_AS(bnd::bound_eq8(query(10, 1, 0.0)), DomainError);
  CHECK_THROWS_AS(bnd::bound_eq8(query(10, 2, -0.5)), DomainError);
  CHECK_THROWS_AS(bnd::bound_eq8({10, 2, {0.1, 0.0}, 0.0}), DomainError);
  CHECK_THROWS_AS(bnd::bound_eq8({10, 2, {0.1, 1e-3}, 0.5}), DomainError);  // delta > 0
}

TEST_CASE("eq8 is the epsilon-free type-count ceiling") {
  CHECK(bnd::bound_eq8(query(1000, 2, 0.0)).value ==
        doctest::Approx(6.90875477931522).epsilon(1e-12));
  CHECK(bnd::bound_eq8(query(1, 2, 0.0)).value == doctest::Approx(std::log(2.0)));
  CHECK(bnd::bound_eq8(query(77, 3, 0.0)).value ==
        doctest::Approx(2.0 * bnd::bound_eq8(query(77, 2, 0.0)).value).epsilon(1e-12));
}

TEST_CASE("eq9 grows from zero and rejects eps > 1") {
  CHECK(bnd::bound_eq9(query(1000, 2, 0.0)).value == doctest::Approx(0.0));
  CHECK(bnd::bound_eq9(query(1000, 2, 0.01)).value ==
        doctest::Approx(3.3387125115688803).epsilon(1e-12));
  CHECK(bnd::bound_eq9(query(1000, 2, 1.0)).value ==
        doctest::Approx(7.908123090772258).epsilon(1e-12));
  CHECK_THROWS_AS(bnd::bound_eq9(query(1000, 2, 1.5)), DomainError);
  CHECK_THROWS_AS(bnd::bound_eq9(query(1000, 2, kInfinity)), DomainError);
}

TEST_CASE("thm1 at the documented point, with the three-point hand check") {
  auto report = bnd::bound_thm1(query(1000, 2, 0.001));
  CHECK(report.value == doctest::Approx(0.8798854930417226).epsilon(1e-12));
  REQUIRE(report.argmin_t.has_value());
  CHECK(*report.argmin_t == 2);
  // t = 1 gives 1.0 and t = 3 gives 1.1187, both worse
  double f1 = 1.0;
  double f3 = 0.001 * 1000 / 3.0 + std::log(3.0) - std::log1p(std::exp(-1.0));
  CHECK(f3 == doctest::Approx(1.1186839344832202).epsilon(1e-12));
  CHECK(report.value < f1);
  CHECK(report.value < f3);
}

TEST_CASE("thm1 agrees with a literal scan and vanishes at eps = 0") {
  for (int64_t n : {10, 137, 1000}) {
    for (double eps : {0.0, 0.003, 0.2, 5.0}) {
      CHECK(bnd::bound_thm1(query(n, 2, eps)).value ==
            doctest::Approx(thm1_scan(n, 2, eps)).epsilon(1e-12));
    }
  }
  auto zero = bnd::bound_thm1(query(500, 3, 0.0));
  CHECK(zero.value == doctest::Approx(0.0));
  CHECK(*zero.argmin_t == 1);
  CHECK(std::isinf(bnd::bound_thm1(query(10, 2, kInfinity)).value));
}

TEST_CASE("thm1 never exceeds eq9 for eps <= 1") {
  for (double eps : {0.001, 0.01, 0.1, 0.5, 1.0})
    for (int64_t n : {10, 100, 1000})
      for (int64_t m : {2, 5}) {
        CHECK(bnd::bound_thm1(query(n, m, eps)).value <=
              bnd::bound_eq9(query(n, m, eps)).value + 1e-9);
      }
}

TEST_CASE("thm2 tightens the overlap credit via the neighbor distance") {
  auto report = bnd::bound_thm2(query(1000, 2, 0.001));
  CHECK(report.value == doctest::Approx(0.7194476195563776).epsilon(1e-12));
  CHECK(*report.argmin_t == 2);
  CHECK(report.value <= bnd::bound_thm1(query(1000, 2, 0.001)).value + 1e-9);

  // m = 2 collapses the simplex factors entirely
  CHECK(bnd::bound_thm2(query(100, 2, 0.0)).value == doctest::Approx(0.0));
  // m = 3 at eps = 0: (m-1) log(1 + 1/2) - log 2 at t = 1
  CHECK(bnd::bound_thm2(query(100, 3, 0.0)).value ==
        doctest::Approx(2.0 * std::log(1.5) - std::log(2.0)).epsilon(1e-12));
  CHECK(std::isinf(bnd::bound_thm2(query(10, 2, kInfinity)).value));
}

TEST_CASE("thm3 at the documented point, including the grid range") {
  auto report = bnd::bound_thm3(query(1000, 2, 0.001));
  CHECK(report.value == doctest::Approx(0.166229813626911).epsilon(1e-12));
  CHECK(*report.argmin_t == 1);
  // the t range tops out at floor(2 sqrt(1000 log 1000)) = 166
  CHECK(static_cast<int64_t>(std::floor(
            2.0 * std::sqrt(1000.0 * std::log(1000.0)))) == 166);
  CHECK(report.value < bnd::bound_thm1(query(1000, 2, 0.001)).value);

  for (int64_t n : {2, 17, 444})
    for (double eps : {0.0, 0.05, 0.9})
      CHECK(bnd::bound_thm3(query(n, 2, eps)).value ==
            doctest::Approx(thm3_scan(n, 2, eps)).epsilon(1e-12));

  CHECK(bnd::bound_thm3(query(50, 3, 0.0)).value == doctest::Approx(0.0));
  CHECK_THROWS_AS(bnd::bound_thm3(query(1, 2, 0.1)), DomainError);
  CHECK(std::isinf(bnd::bound_thm3(query(10, 2, kInfinity)).value));
}

TEST_CASE("leakage ceilings thm4 and the stirling refinement") {
  CHECK(bnd::bound_thm4(query(5, 2, 0.0)).value == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(bnd::bound_thm4(query(1, 2, 0.0)).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bnd::bound_thm4_sharpened(query(5, 2, 0.0)).value ==
        doctest::Approx(1.8728209360233823).epsilon(1e-12));
  // binary alphabets: the refinement is weaker; m = 3 flips the order
  CHECK(bnd::bound_thm4_sharpened(query(5, 2, 0.0)).value > bnd::bound_thm4(query(5, 2, 0.0)).value);
  CHECK(bnd::bound_thm4(query(10, 3, 0.0)).value ==
        doctest::Approx(4.795790545596741).epsilon(1e-12));
  CHECK(bnd::bound_thm4_sharpened(query(10, 3, 0.0)).value ==
        doctest::Approx(4.232887586133872).epsilon(1e-12));
  CHECK(bnd::bound_thm4_sharpened(query(10, 3, 0.0)).value < bnd::bound_thm4(query(10, 3, 0.0)).value);
}

TEST_CASE("thm5 switches regimes at eps = 1/n") {
  auto small = bnd::bound_thm5(query(10, 2, 0.05));
  CHECK(small.value == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(small.terms.size() == 1);
  CHECK(small.terms[0].name == "small_eps_linear");

  CHECK(bnd::bound_thm5(query(10, 2, 0.0)).value == doctest::Approx(0.0));

  auto large = bnd::bound_thm5(query(10, 2, 0.5));
  CHECK(large.value == doctest::Approx(2.791759469228055).epsilon(1e-12));
  CHECK(large.terms[0].name == "large_eps_log");

  CHECK_THROWS_AS(bnd::bound_thm5(query(10, 2, 1.2)), DomainError);
  CHECK(std::isinf(bnd::bound_thm5(query(10, 2, kInfinity)).value));
}

TEST_CASE("ml baseline caps n*eps by the hypothesis count") {
  CHECK(bnd::ml_dp_baseline(query(10, 2, 0.0)).value == doctest::Approx(0.0));
  CHECK(bnd::ml_dp_baseline(query(10, 2, 1.0), 4).value ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(bnd::ml_dp_baseline(query(5, 2, 0.2)).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bnd::ml_dp_baseline(query(5, 2, kInfinity), 8).value ==
        doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("generalization translations") {
  CHECK(bnd::gen_avg_bound(0.0, query(100, 2, 0.0)) == doctest::Approx(0.0));
  CHECK(bnd::gen_avg_bound(std::log(2.0), query(100, 2, 0.0)) ==
        doctest::Approx(0.05887050112577374).epsilon(1e-12));
  double once = bnd::gen_avg_bound(0.3, query(500, 2, 0.0));
  double twice = bnd::gen_avg_bound(0.3, query(1000, 2, 0.0));
  CHECK(once / twice == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  CHECK(bnd::gen_tail_bound(std::log(2.0), query(1000, 2, 0.0), 0.1) ==
        doctest::Approx(8.244614489754217e-09).epsilon(1e-9));
  // small n may produce a vacuous (> 1) value, returned raw
  CHECK(bnd::gen_tail_bound(std::log(2.0), query(1, 2, 0.0), 0.5) > 1.0);
  CHECK_THROWS_AS(bnd::gen_tail_bound(0.1, query(10, 2, 0.0), 0.0), DomainError);
  CHECK_THROWS_AS(bnd::gen_tail_bound(0.1, query(10, 2, 0.0), 1.0), DomainError);
}

TEST_CASE("explicit tail bound equals the stirling count plugged into the tail form") {
  auto q = query(1000, 2, 0.0);
  auto tail = bnd::gen_tail_explicit(q, 0.3);
  CHECK(tail.log_value == doctest::Approx(-172.31703657332952).epsilon(1e-9));
  double via_count = bnd::gen_tail_bound(genbound::typespace::type_count_log_stirling(1000, 2), q, 0.3);
  CHECK(tail.log_value == doctest::Approx(std::log(via_count)).epsilon(1e-9));
  CHECK(tail.value == doctest::Approx(std::exp(tail.log_value)));

  auto tiny = bnd::gen_tail_explicit(query(1, 2, 0.0), 0.5);
  CHECK(tiny.value > 0.0);
  CHECK(std::isfinite(tiny.value));
}

TEST_CASE("reports expose argmin only for the scanned families") {
  CHECK(bnd::bound_thm1(query(20, 2, 0.1)).argmin_t.has_value());
  CHECK(bnd::bound_thm2(query(20, 2, 0.1)).argmin_t.has_value());
  CHECK(bnd::bound_thm3(query(20, 2, 0.1)).argmin_t.has_value());
  CHECK_FALSE(bnd::bound_eq8(query(20, 2, 0.1)).argmin_t.has_value());
  CHECK_FALSE(bnd::bound_thm5(query(20, 2, 0.1)).argmin_t.has_value());
}

TEST_CASE("term breakdowns sum to the reported value") {
  for (auto family : bnd::all_families()) {
    auto report = bnd::evaluate_bound(family, query(50, 3, 0.2), 7);
    CHECK(report.value == doctest::Approx(report.terms_total()).epsilon(1e-12));
  }
}

TEST_CASE("family names round-trip") {
  for (auto family : bnd::all_families()) {
    auto parsed = bnd::family_from_string(bnd::to_string(family));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == family);
  }
  CHECK_FALSE(bnd::family_from_string("thm9").has_value());
  CHECK_FALSE(bnd::family_uses_epsilon(bnd::BoundFamily::eq8));
  CHECK(bnd::family_uses_epsilon(bnd::BoundFamily::thm5));
}
