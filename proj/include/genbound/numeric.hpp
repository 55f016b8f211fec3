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
#ifndef GENBOUND_NUMERIC_HPP_
#define GENBOUND_NUMERIC_HPP_

#include <cstdint>
#include <limits>
#include <span>

namespace genbound {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Probabilities below this are treated as exact zeros in ratio audits.
inline constexpr double kProbFloor = 1e-300;

// log(sum_i exp(x[i])) with the usual max shift. Empty input and all -inf
// both give -inf.
double log_sum_exp(std::span<const double> xs);

// log(1 + exp(-x)) for x >= 0. Underflow of exp(-x) degrades gracefully to 0.
double log_one_plus_exp_neg(double x);

// log of binomial(n, k) via lgamma. Returns -inf for k < 0 or k > n.
double log_binomial(int64_t n, int64_t k);

// Exact binomial(n, k), saturating at INT64_MAX on overflow.
int64_t saturating_binomial(int64_t n, int64_t k);

// base^exp over non-negative integers, saturating at INT64_MAX.
int64_t saturating_pow(int64_t base, int64_t exp);

// ceil(a / b) for a >= 0, b > 0.
inline int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

}  // namespace genbound

#endif  // GENBOUND_NUMERIC_HPP_
