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
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "genbound/errors.hpp"
#include "genbound/mechanisms.hpp"
#include "genbound/numeric.hpp"
#include "genbound/rng.hpp"

namespace ts = genbound::typespace;
namespace mech = genbound::mechanisms;
using genbound::DomainError;
using genbound::IoError;
using genbound::kInfinity;

namespace {

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name) : path("/tmp/genbound_test_" + name) {}
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("audit of a constant mechanism is zero") {
  auto m = mech::make_randomized_response(3, 2, 0.0);
  CHECK(mech::audit_epsilon(m).epsilon == doctest::Approx(0.0));
}

TEST_CASE("audit of the identity mechanism saturates") {
  auto m = mech::make_randomized_response(1, 2, 1.0);
  CHECK(std::isinf(mech::audit_epsilon(m).epsilon));
}

TEST_CASE("audit of randomized response matches the closed form") {
  auto m = mech::make_randomized_response(2, 2, 0.5);  // 3 types
  // max ratio (0.5 + 1/6) / (1/6) = 4 over the two distance-1 pairs
  CHECK(mech::audit_epsilon(m).epsilon == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  for (double stay : {0.1, 0.25, 0.75, 0.9}) {
    auto rr = mech::make_randomized_response(4, 2, stay);
    double types_count = 5.0;
    CHECK(mech::audit_epsilon(rr).epsilon ==
          doctest::Approx(std::log1p(stay * types_count / (1.0 - stay))).epsilon(1e-9));
  }
}

TEST_CASE("audit treats sub-floor probabilities as zero") {
  std::vector<std::vector<double>> rows = {{1.0, 0.0}, {1e-310, 1.0 - 1e-310}};
  auto m = mech::make_mechanism(1, 2, {"a", "b"}, rows);
  CHECK(std::isinf(mech::audit_epsilon(m).epsilon));
}

TEST_CASE("exponential mechanism audits within its target") {
  for (double target : {0.1, 0.5, 1.0}) {
    for (int64_t n : {1, 2, 4}) {
      auto m = mech::make_exponential_mechanism(n, 2, target);
      CHECK(mech::audit_epsilon(m).epsilon <= target + 1e-12);
    }
  }
  // n = 2, m = 2, target 1: the max neighbor log-ratio works out below 1
  auto m = mech::make_exponential_mechanism(2, 2, 1.0);
  CHECK(mech::audit_epsilon(m).epsilon == doctest::Approx(0.6141070987759084).epsilon(1e-9));
}

TEST_CASE("group privacy budget") {
  auto [tight0, loose0] = mech::group_privacy_kl_bound(0, 2.0);
  CHECK(tight0 == 0.0);
  CHECK(loose0 == 0.0);
  auto [tightz, loosez] = mech::group_privacy_kl_bound(5, 0.0);
  CHECK(tightz == 0.0);
  CHECK(loosez == 0.0);
  auto [tight, loose] = mech::group_privacy_kl_bound(2, 1.0);
  CHECK(tight == doctest::Approx(1.5231883119115297).epsilon(1e-12));
  CHECK(loose == doctest::Approx(2.0));
  CHECK(tight <= loose);
}

TEST_CASE("exact_kl handles support corner cases") {
  std::vector<double> p = {0.5, 0.5};
  CHECK(mech::exact_kl(p, p) == doctest::Approx(0.0));
  std::vector<double> point = {1.0, 0.0};
  std::vector<double> fair = {0.5, 0.5};
  CHECK(mech::exact_kl(point, fair) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::isinf(mech::exact_kl(fair, point)));
}

TEST_CASE("mutual information oracle on canonical mechanisms") {
  auto prior2 = ts::SourceDistribution::uniform(2);
  auto constant = mech::make_randomized_response(3, 2, 0.0);
  CHECK(mech::exact_mutual_information(constant, prior2) == doctest::Approx(0.0));

  // identity on n = 1: the output is the type, so I = H(T) = log 2
  auto identity = mech::make_randomized_response(1, 2, 1.0);
  CHECK(mech::exact_mutual_information(identity, prior2) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  auto rr = mech::make_randomized_response(2, 2, 0.5);
  double mi = mech::exact_mutual_information(rr, prior2);
  CHECK(mi == doctest::Approx(0.21596589283669923).epsilon(1e-9));
  CHECK(mi > 0.0);
  CHECK(mi < std::log(3.0));
}

TEST_CASE("maximal leakage oracle and its support dependence") {
  auto prior = ts::SourceDistribution::uniform(2);
  auto constant = mech::make_randomized_response(2, 2, 0.0);
  CHECK(mech::exact_max_leakage(constant, mech::support_mask_from_prior(constant, prior)) ==
        doctest::Approx(0.0));

  auto identity = mech::make_randomized_response(2, 2, 1.0);
  CHECK(mech::exact_max_leakage(identity, mech::support_mask_from_prior(identity, prior)) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));

  auto rr = mech::make_randomized_response(2, 2, 0.5);
  CHECK(mech::exact_max_leakage(rr, mech::support_mask_from_prior(rr, prior)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // a sure prior shrinks the support to one type
  ts::SourceDistribution sure{{1.0, 0.0}};
  auto mask = mech::support_mask_from_prior(identity, sure);
  CHECK(mech::exact_max_leakage(identity, mask) == doctest::Approx(0.0));

  CHECK_THROWS_AS(mech::exact_max_leakage(rr, std::vector<bool>(3, false)), DomainError);
}

TEST_CASE("sum_cover detects disjoint supports") {
  auto same = mech::sum_cover({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  CHECK(same.value == doctest::Approx(1.0));
  CHECK_FALSE(same.is_equality);

  auto disjoint = mech::sum_cover({{1.0, 0.0, 0.0}, {0.0, 0.25, 0.75}});
  CHECK(disjoint.value == doctest::Approx(2.0));
  CHECK(disjoint.is_equality);

  auto partial = mech::sum_cover({{0.5, 0.5}, {1.0, 0.0}});
  CHECK(partial.value == doctest::Approx(1.5));
  CHECK_FALSE(partial.is_equality);
}

TEST_CASE("mixture bounds collapse for a single component") {
  std::vector<double> p = {0.25, 0.75};
  std::vector<std::vector<double>> comps = {{0.5, 0.5}};
  std::vector<double> w = {1.0};
  auto pair = mech::mixture_kl_bounds(p, comps, w);
  double kl = mech::exact_kl(p, comps[0]);
  CHECK(pair.soft == doctest::Approx(kl).epsilon(1e-12));
  CHECK(pair.hard == doctest::Approx(kl).epsilon(1e-12));
  CHECK(mech::overlap_mixture_kl_bound(p, comps, {{1.0}, {1.0}, 0}) ==
        doctest::Approx(kl).epsilon(1e-12));
}

TEST_CASE("soft mixture bound is at most -log of the matching weight") {
  std::vector<std::vector<double>> comps = {{0.25, 0.75}, {0.7, 0.3}};
  std::vector<double> w = {0.4, 0.6};
  auto pair = mech::mixture_kl_bounds(comps[1], comps, w);
  CHECK(pair.soft <= -std::log(0.6) + 1e-12);
  CHECK(pair.soft <= pair.hard + 1e-12);
}

TEST_CASE("uniform-overlap mixture bound reduces algebraically") {
  // all alphas equal a0 (except the anchor's 1), uniform weights:
  // bound = KL(p||Q_i) - log(a0 + (1 - a0) / M)
  std::vector<std::vector<double>> comps = {{0.5, 0.3, 0.2}, {0.4, 0.4, 0.2}, {0.45, 0.25, 0.3}};
  std::vector<double> p = {0.6, 0.2, 0.2};
  const double a0 = 0.5;
  const size_t count = comps.size();
  // components built to dominate a0 * anchor pointwise
  for (size_t b = 1; b < count; ++b)
    for (size_t w = 0; w < comps[b].size(); ++w) REQUIRE(comps[b][w] >= a0 * comps[0][w]);
  std::vector<double> weights(count, 1.0 / static_cast<double>(count));
  std::vector<double> alphas(count, a0);
  alphas[0] = 1.0;
  double got = mech::overlap_mixture_kl_bound(p, comps, {weights, alphas, 0});
  double expected = mech::exact_kl(p, comps[0]) -
                    std::log(a0 + (1.0 - a0) / static_cast<double>(count));
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("overlap coefficients above the largest constant are rejected") {
  std::vector<std::vector<double>> comps = {{0.9, 0.1}, {0.1, 0.9}};
  std::vector<double> p = {0.5, 0.5};
  // alpha = 0.5 would require Q_1 >= 0.45 at the first point, but it is 0.1
  CHECK_THROWS_AS(
      mech::overlap_mixture_kl_bound(p, comps, {{0.5, 0.5}, {1.0, 0.5}, 0}), DomainError);
  CHECK_NOTHROW(mech::overlap_mixture_kl_bound(p, comps, {{0.5, 0.5}, {1.0, 0.111}, 0}));
}

TEST_CASE("mixture bound chain on seeded random instances") {
  for (int inst = 0; inst < 40; ++inst) {
    genbound::CounterRng rng(11, static_cast<uint64_t>(inst));
    auto draw = [&rng]() {
      std::vector<double> v(4);
      double total = 0;
      for (double& x : v) {
        x = 0.05 + rng.next_double();
        total += x;
      }
      for (double& x : v) x /= total;
      return v;
    };
    auto p = draw();
    std::vector<std::vector<double>> comps = {draw(), draw(), draw()};
    std::vector<double> weights = {0.5, 0.3, 0.2};
    std::vector<double> mixture(4, 0.0);
    for (size_t b = 0; b < comps.size(); ++b)
      for (size_t w = 0; w < 4; ++w) mixture[w] += weights[b] * comps[b][w];
    double exact = mech::exact_kl(p, mixture);
    auto pair = mech::mixture_kl_bounds(p, comps, weights);
    CHECK(exact <= pair.soft + 1e-9);
    CHECK(pair.soft <= pair.hard + 1e-12);
  }
}

TEST_CASE("mechanism JSON files round-trip and validate") {
  TempPath file("mech.json");
  auto rr = mech::make_randomized_response(2, 2, 0.5);
  mech::save_mechanism(rr, file.path);
  auto loaded = mech::load_mechanism(file.path);
  REQUIRE(loaded.rows.size() == rr.rows.size());
  CHECK(loaded.labels == rr.labels);
  for (size_t i = 0; i < rr.rows.size(); ++i)
    for (size_t w = 0; w < rr.rows[i].size(); ++w)
      CHECK(loaded.rows[i][w] == doctest::Approx(rr.rows[i][w]).epsilon(1e-12));
}

TEST_CASE("mechanism files with bad rows are rejected with coordinates") {
  TempPath file("bad_mech.json");
  {
    std::ofstream out(file.path);
    out << R"({"n": 1, "m": 2, "labels": ["a", "b"],
               "rows": [[0.5, 0.4], [0.5, 0.5]]})";
  }
  try {
    mech::load_mechanism(file.path);
    FAIL("expected a DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("row 0") != std::string::npos);
  }
}

TEST_CASE("malformed mechanism files map to the right error types") {
  CHECK_THROWS_AS(mech::load_mechanism("/nonexistent/mech.json"), IoError);
  TempPath file("not_json.json");
  {
    std::ofstream out(file.path);
    out << "not json";
  }
  CHECK_THROWS_AS(mech::load_mechanism(file.path), DomainError);
  TempPath missing("missing_key.json");
  {
    std::ofstream out(missing.path);
    out << R"({"n": 1, "m": 2, "rows": [[1.0], [1.0]]})";
  }
  CHECK_THROWS_AS(mech::load_mechanism(missing.path), DomainError);
}

TEST_CASE("row count must cover the whole type space") {
  std::vector<std::vector<double>> rows = {{1.0}, {1.0}};
  CHECK_THROWS_AS(mech::make_mechanism(2, 2, {"w"}, rows), DomainError);
}

TEST_CASE("degenerate n = 0 mechanism has a single row and zero budget") {
  auto m = mech::make_exponential_mechanism(0, 3, 1.0);
  CHECK(m.num_types() == 1);
  CHECK(mech::audit_epsilon(m).epsilon == doctest::Approx(0.0));
}
