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
#ifndef GENBOUND_TYPESPACE_HPP_
#define GENBOUND_TYPESPACE_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace genbound::typespace {

// Ceiling on materialized type enumerations. Closed-form bound evaluation
// never enumerates, so figure-scale inputs stay usable.
inline constexpr int64_t kDefaultEnumerationCap = 10'000'000;

// Per-symbol occurrence counts of a dataset; the dataset size is the sum.
struct CountVector {
  std::vector<int64_t> counts;

  int64_t total() const;
  int64_t alphabet_size() const { return static_cast<int64_t>(counts.size()); }
  bool operator==(const CountVector&) const = default;
  std::string label() const;  // "c0,c1,..."
};

// Throws DomainError unless counts are non-negative with at least 2 symbols.
void validate_count_vector(const CountVector& t);

struct SourceDistribution {
  std::vector<double> probs;

  static SourceDistribution uniform(int64_t m);
  int64_t alphabet_size() const { return static_cast<int64_t>(probs.size()); }
};

// Throws DomainError unless entries are in [0,1] and sum to 1 within 1e-12.
void validate_source_distribution(const SourceDistribution& pz);

struct TypicalSetSpec {
  double eta = 0.0;
  int64_t n = 0;

  // eta = sqrt(log(n) / n), the width that makes the atypical mass O(n^-2).
  static TypicalSetSpec defaults(int64_t n);
};

// Number of count vectors over m symbols summing to n, i.e.
// binomial(n + m - 1, m - 1). Saturates at INT64_MAX.
int64_t type_count(int64_t n, int64_t m);

// All count vectors summing to n, in ascending lexicographic order.
// Throws CapacityError when the count exceeds `cap`.
std::vector<CountVector> enumerate_types(int64_t n, int64_t m,
                                         int64_t cap = kDefaultEnumerationCap);

// Index of `t` within enumerate_types(t.total(), t.alphabet_size()).
int64_t type_rank(const CountVector& t);

// log binomial(n + m - 1, m - 1).
double type_count_log_exact(int64_t n, int64_t m);

// (m - 1) * log(n + 1): the polynomial counting bound. Tight iff m == 2
// (and degenerately at n == 0).
double type_count_log_poly(int64_t n, int64_t m);

// AM-GM + Stirling refinement: with k = m - 1,
// log[ (2 pi k)^{-1/2} * ((e/k) (n + (k+1)/2))^k ].
// Always >= type_count_log_exact; below the poly bound for m >= 3.
double type_count_log_stirling(int64_t n, int64_t m);

// Half the L1 distance between count vectors: the minimum number of sample
// replacements turning one dataset into the other.
int64_t dataset_distance(const CountVector& a, const CountVector& b);

// log multinomial mass of type `t` under i.i.d. draws from `pz`.
// -inf when t puts count on a zero-probability symbol.
double type_log_probability(const CountVector& t, const SourceDistribution& pz);

// Per-symbol empirical frequency within eta of pz, zero counts off support.
bool is_strongly_typical(const CountVector& t, const SourceDistribution& pz,
                         const TypicalSetSpec& spec);

// Hoeffding + union bound on the atypical mass: min(1, 2m exp(-2 n eta^2)).
double atypical_mass_bound(int64_t n, int64_t m, double eta);

}  // namespace genbound::typespace

#endif  // GENBOUND_TYPESPACE_HPP_
