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
#include "genbound/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace genbound {

double log_sum_exp(std::span<const double> xs) {
  double mx = -kInfinity;
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;  // empty, all -inf, or a +inf entry
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

double log_one_plus_exp_neg(double x) {
  if (std::isinf(x)) return x > 0 ? 0.0 : kInfinity;
  return std::log1p(std::exp(-x));
}

double log_binomial(int64_t n, int64_t k) {
  if (k < 0 || k > n) return -kInfinity;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

int64_t saturating_binomial(int64_t n, int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = static_cast<__int128>(std::numeric_limits<int64_t>::max());
  __int128 r = 1;
  for (int64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: product of i consecutive integers is divisible by i!
    if (r > kMax) return std::numeric_limits<int64_t>::max();
  }
  return static_cast<int64_t>(r);
}

int64_t saturating_pow(int64_t base, int64_t exp) {
  constexpr auto kMax = static_cast<__int128>(std::numeric_limits<int64_t>::max());
  __int128 r = 1;
  for (int64_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > kMax) return std::numeric_limits<int64_t>::max();
  }
  return static_cast<int64_t>(r);
}

}  // namespace genbound
