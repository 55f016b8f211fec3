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
#ifndef GENBOUND_BOUNDS_HPP_
#define GENBOUND_BOUNDS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genbound/mechanisms.hpp"

namespace genbound::bounds {

// eq8/eq9 are the type-counting baselines; thm1..thm3 the privacy-aware
// mutual-information bounds; thm4/thm4_sharp/thm5/ml_baseline the
// maximal-leakage side. All values are in nats.
enum class BoundFamily {
  eq8,
  eq9,
  thm1,
  thm2,
  thm3,
  thm4,
  thm4_sharp,
  thm5,
  ml_baseline,
};

std::string to_string(BoundFamily family);
std::optional<BoundFamily> family_from_string(const std::string& name);
std::vector<BoundFamily> all_families();

// True for families whose value depends on the privacy budget.
bool family_uses_epsilon(BoundFamily family);

struct BoundQuery {
  int64_t n = 0;
  int64_t m = 0;
  mechanisms::PrivacyBudget epsilon;
  double sigma = 0.5;  // sub-Gaussian constant of the loss
};

// n >= 1, m >= 2, sigma > 0, delta == 0; throws DomainError otherwise.
void validate_query(const BoundQuery& q);

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct BoundReport {
  BoundFamily family = BoundFamily::eq8;
  double value = 0.0;  // nats, possibly +infinity
  std::optional<int64_t> argmin_t;
  std::vector<BoundTerm> terms;  // sums to value

  double terms_total() const;
};

// (m-1) log(n+1); privacy budget unused.
BoundReport bound_eq8(const BoundQuery& q);

// (m-1) log(1 + e eps n); requires eps <= 1.
BoundReport bound_eq9(const BoundQuery& q);

// min over t in [1, n] of
//   (m-1) eps n / t + (m-1) log t - 1{t>=2} log(1 + e^{-eps n}).
BoundReport bound_thm1(const BoundQuery& q);

// min over t in [1, n] of
//   (m-1) eps n / t + (m-1) log(t + (m-2)/2) - log((m-1)!)
//   - 1{t>=2} log(1 + e^{-eps D_t}),   D_t = ceil(n/t) + 1.
BoundReport bound_thm2(const BoundQuery& q);

// min over t in [1, floor(2 sqrt(n log n))] of
//   eps m sqrt(n log n) / t - 1{t>=2} log(1 + e^{-eps D_t}) + 2 m eps / n
//   + 1{t>=2} min(m log t, log(m t^{m-1})),
//   D_t = ceil(2 sqrt(n log n) / t) + 1. Requires n >= 2.
BoundReport bound_thm3(const BoundQuery& q);

// Maximal-leakage ceiling (m-1) log(n+1); privacy budget unused.
BoundReport bound_thm4(const BoundQuery& q);

// Stirling-refined leakage ceiling
//   (m-1)(1 + log((n + m/2) / (m-1))) - log(2 pi (m-1)) / 2.
BoundReport bound_thm4_sharpened(const BoundQuery& q);

// (m-1) n eps for eps <= 1/n, else (m-1) log(e (n eps + 1)); requires eps <= 1.
BoundReport bound_thm5(const BoundQuery& q);

// min(n eps, log w_size); just n eps when w_size is absent.
BoundReport ml_dp_baseline(const BoundQuery& q, std::optional<int64_t> w_size = std::nullopt);

BoundReport evaluate_bound(BoundFamily family, const BoundQuery& q,
                           std::optional<int64_t> w_size = std::nullopt);

// sqrt(2 sigma^2 mi / n): bound on the expected generalization error.
double gen_avg_bound(double mi_nats, const BoundQuery& q);

// 2 exp(ml - n eta^2 / (2 sigma^2)), unclamped; requires eta in (0, 1).
double gen_tail_bound(double ml_nats, const BoundQuery& q, double eta);

struct TailValue {
  double log_value = 0.0;
  double value = 0.0;
};

// Tail bound with the Stirling type count plugged in for the leakage term;
// returned with its log since figure-scale values underflow doubles.
TailValue gen_tail_explicit(const BoundQuery& q, double eta);

}  // namespace genbound::bounds

#endif  // GENBOUND_BOUNDS_HPP_
