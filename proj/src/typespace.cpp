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
#include "genbound/typespace.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "genbound/errors.hpp"
#include "genbound/numeric.hpp"

namespace genbound::typespace {

namespace {

size_t u(int64_t i) { return static_cast<size_t>(i); }

void check_enumeration_args(int64_t n, int64_t m) {
  if (n < 0) throw DomainError("n must be >= 0");
  if (m < 2) throw DomainError("m must be >= 2");
}

}  // namespace

int64_t CountVector::total() const {
  return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

std::string CountVector::label() const {
  std::ostringstream os;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i) os << ',';
    os << counts[i];
  }
  return os.str();
}

void validate_count_vector(const CountVector& t) {
  if (t.alphabet_size() < 2) throw DomainError("count vector needs at least 2 symbols");
  for (int64_t c : t.counts)
    if (c < 0) throw DomainError("count vector has a negative entry");
}

SourceDistribution SourceDistribution::uniform(int64_t m) {
  if (m < 2) throw DomainError("alphabet size must be >= 2");
  return SourceDistribution{std::vector<double>(u(m), 1.0 / static_cast<double>(m))};
}

void validate_source_distribution(const SourceDistribution& pz) {
  if (pz.alphabet_size() < 2) throw DomainError("source distribution needs at least 2 symbols");
  double sum = 0.0;
  for (double p : pz.probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("source probability outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("source probabilities do not sum to 1");
}

TypicalSetSpec TypicalSetSpec::defaults(int64_t n) {
  if (n < 1) throw DomainError("typical-set spec needs n >= 1");
  double nn = static_cast<double>(n);
  return TypicalSetSpec{std::sqrt(std::log(nn) / nn), n};
}

int64_t type_count(int64_t n, int64_t m) {
  check_enumeration_args(n, m);
  return saturating_binomial(n + m - 1, m - 1);
}

std::vector<CountVector> enumerate_types(int64_t n, int64_t m, int64_t cap) {
  int64_t count = type_count(n, m);
  if (count > cap) {
    throw CapacityError("type space of size " + std::to_string(count) +
                        " exceeds the enumeration cap " + std::to_string(cap));
  }
  std::vector<CountVector> out;
  out.reserve(u(count));
  std::vector<int64_t> c(u(m), 0);
  c[u(m - 1)] = n;
  for (;;) {
    out.push_back(CountVector{c});
    // Successor in lex order: bump the rightmost slot with mass strictly to
    // its right, then flush the remainder of that mass into the last slot.
    int64_t i = m - 2;
    int64_t suffix = c[u(m - 1)];
    while (i >= 0 && suffix == 0) {
      suffix += c[u(i)];
      --i;
    }
    if (i < 0) break;
    ++c[u(i)];
    for (int64_t a = i + 1; a < m; ++a) c[u(a)] = 0;
    c[u(m - 1)] = suffix - 1;
  }
  return out;
}

int64_t type_rank(const CountVector& t) {
  validate_count_vector(t);
  int64_t m = t.alphabet_size();
  int64_t remaining = t.total();
  int64_t rank = 0;
  for (int64_t a = 0; a < m - 1; ++a) {
    // Types preceding t agree on coordinates < a and take a smaller value
    // here; the hockey-stick identity collapses the sum over those values.
    int64_t c = t.counts[u(a)];
    int64_t rest = m - a - 1;
    rank += saturating_binomial(remaining + rest, rest) -
            saturating_binomial(remaining - c + rest, rest);
    remaining -= c;
  }
  return rank;
}

double type_count_log_exact(int64_t n, int64_t m) {
  check_enumeration_args(n, m);
  return log_binomial(n + m - 1, m - 1);
}

double type_count_log_poly(int64_t n, int64_t m) {
  check_enumeration_args(n, m);
  return static_cast<double>(m - 1) * std::log(static_cast<double>(n) + 1.0);
}

double type_count_log_stirling(int64_t n, int64_t m) {
  check_enumeration_args(n, m);
  double k = static_cast<double>(m - 1);
  double center = static_cast<double>(n) + (k + 1.0) / 2.0;
  return -0.5 * std::log(2.0 * M_PI * k) + k * (1.0 + std::log(center / k));
}

int64_t dataset_distance(const CountVector& a, const CountVector& b) {
  if (a.alphabet_size() != b.alphabet_size() || a.total() != b.total())
    throw DomainError("dataset distance needs matching n and alphabet size");
  int64_t l1 = 0;
  for (size_t i = 0; i < a.counts.size(); ++i) l1 += std::abs(a.counts[i] - b.counts[i]);
  return l1 / 2;
}

double type_log_probability(const CountVector& t, const SourceDistribution& pz) {
  if (t.alphabet_size() != pz.alphabet_size())
    throw DomainError("type and source distribution have different alphabets");
  int64_t n = t.total();
  double lp = std::lgamma(static_cast<double>(n) + 1.0);
  for (size_t a = 0; a < t.counts.size(); ++a) {
    int64_t c = t.counts[a];
    if (c == 0) continue;
    if (pz.probs[a] <= 0.0) return -kInfinity;
    lp -= std::lgamma(static_cast<double>(c) + 1.0);
    lp += static_cast<double>(c) * std::log(pz.probs[a]);
  }
  return lp;
}

bool is_strongly_typical(const CountVector& t, const SourceDistribution& pz,
                         const TypicalSetSpec& spec) {
  if (t.alphabet_size() != pz.alphabet_size())
    throw DomainError("type and source distribution have different alphabets");
  double n = static_cast<double>(t.total());
  for (size_t a = 0; a < t.counts.size(); ++a) {
    if (pz.probs[a] > 0.0) {
      if (std::abs(static_cast<double>(t.counts[a]) / n - pz.probs[a]) > spec.eta) return false;
    } else if (t.counts[a] != 0) {
      return false;
    }
  }
  return true;
}

double atypical_mass_bound(int64_t n, int64_t m, double eta) {
  if (n < 1) throw DomainError("atypical mass bound needs n >= 1");
  if (eta < 0.0) throw DomainError("eta must be >= 0");
  double raw = 2.0 * static_cast<double>(m) *
               std::exp(-2.0 * static_cast<double>(n) * eta * eta);
  return std::min(1.0, raw);
}

}  // namespace genbound::typespace
