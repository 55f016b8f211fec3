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
#ifndef GENBOUND_MECHANISMS_HPP_
#define GENBOUND_MECHANISMS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "genbound/typespace.hpp"

namespace genbound::mechanisms {

struct PrivacyBudget {
  double epsilon = 0.0;
  // Metadata only; bound formulas require delta == 0.
  double delta = 0.0;
};

// A permutation-invariant algorithm as a row-stochastic map from the type
// space to a finite hypothesis set. Rows follow the canonical lexicographic
// type order.
struct MechanismTable {
  int64_t n = 0;
  int64_t m = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::vector<typespace::CountVector> types;  // cached canonical enumeration

  size_t num_types() const { return rows.size(); }
  size_t num_outputs() const { return labels.size(); }
};

// Validates and normalizes a table. Row sums may deviate from 1 by at most
// `row_sum_tol`; rows are then renormalized exactly.
MechanismTable make_mechanism(int64_t n, int64_t m, std::vector<std::string> labels,
                              std::vector<std::vector<double>> rows,
                              double row_sum_tol = 1e-9,
                              int64_t cap = typespace::kDefaultEnumerationCap);

// stay_prob mass on the input type, the rest uniform over all types.
MechanismTable make_randomized_response(int64_t n, int64_t m, double stay_prob,
                                        int64_t cap = typespace::kDefaultEnumerationCap);

// Exponential mechanism with utility -dataset_distance (sensitivity 1):
// P(w|t) proportional to exp(-eps_target * d(t, w) / 2).
MechanismTable make_exponential_mechanism(int64_t n, int64_t m, double eps_target,
                                          int64_t cap = typespace::kDefaultEnumerationCap);

// JSON file format: {"n": int, "m": int, "labels": [...], "rows": [[...], ...]}
// with rows in canonical type order, validated to 1e-9 stochasticity.
MechanismTable load_mechanism(const std::string& path,
                              int64_t cap = typespace::kDefaultEnumerationCap);
void save_mechanism(const MechanismTable& mech, const std::string& path);

// Smallest eps such that P(w|t) <= e^eps P(w|t') over all outputs and all
// type pairs at dataset distance 1; +infinity on a support mismatch.
PrivacyBudget audit_epsilon(const MechanismTable& mech);

// {k eps tanh(k eps / 2), k eps}: KL budget between outputs of datasets at
// distance k under an eps-DP mechanism.
std::pair<double, double> group_privacy_kl_bound(int64_t k, double eps);

// sum p log(p/q) with 0 log 0 = 0; +infinity when q vanishes on p's support.
double exact_kl(std::span<const double> p, std::span<const double> q);

// I(T; W) from the exact joint distribution; n and m must be within the cap.
double exact_mutual_information(const MechanismTable& mech,
                                const typespace::SourceDistribution& pz);

// Types consistent with the support of pz (true entries participate in the
// maximal-leakage column maxima).
std::vector<bool> support_mask_from_prior(const MechanismTable& mech,
                                          const typespace::SourceDistribution& pz);

// log sum_w max over in-support types of P(w|t).
double exact_max_leakage(const MechanismTable& mech, const std::vector<bool>& support_mask);

struct SumCoverResult {
  double value = 0.0;
  bool is_equality = false;  // supports pairwise disjoint
};

// sum_w max_i P_i(w), at most M with equality iff at most one pmf is
// positive at every point.
SumCoverResult sum_cover(const std::vector<std::vector<double>>& pmfs);

struct MixtureKlBounds {
  double soft = 0.0;  // -log sum_b w_b exp(-KL(p||Q_b))
  double hard = 0.0;  // min_b KL(p||Q_b) - log w_b
};

// Bounds on KL(p || sum_b w_b Q_b) from the per-component divergences.
MixtureKlBounds mixture_kl_bounds(std::span<const double> p,
                                  const std::vector<std::vector<double>>& components,
                                  std::span<const double> weights);

struct MixtureSpec {
  std::vector<double> weights;  // positive, sum to 1
  std::vector<double> alphas;   // overlap coefficients against the anchor, in [0,1]
  int64_t anchor = 0;           // alphas[anchor] == 1
};

// KL(p||Q_anchor) - log sum_b w_b alpha_b, valid whenever every component
// dominates alpha_b times the anchor pointwise (checked).
double overlap_mixture_kl_bound(std::span<const double> p,
                                const std::vector<std::vector<double>>& components,
                                const MixtureSpec& spec);

}  // namespace genbound::mechanisms

#endif  // GENBOUND_MECHANISMS_HPP_
