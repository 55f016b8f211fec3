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
#include "genbound/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "genbound/errors.hpp"
#include "genbound/numeric.hpp"
#include "json.hpp"

namespace genbound::mechanisms {

namespace ts = genbound::typespace;

namespace {

std::vector<std::string> type_labels(const std::vector<ts::CountVector>& types) {
  std::vector<std::string> labels;
  labels.reserve(types.size());
  for (const auto& t : types) labels.push_back(t.label());
  return labels;
}

}  // namespace

MechanismTable make_mechanism(int64_t n, int64_t m, std::vector<std::string> labels,
                              std::vector<std::vector<double>> rows, double row_sum_tol,
                              int64_t cap) {
  auto types = ts::enumerate_types(n, m, cap);
  if (rows.size() != types.size()) {
    throw DomainError("mechanism has " + std::to_string(rows.size()) + " rows, expected " +
                      std::to_string(types.size()) + " (one per type)");
  }
  if (labels.empty()) throw DomainError("mechanism needs at least one hypothesis");
  for (size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    if (row.size() != labels.size()) {
      throw DomainError("row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                        " entries, expected " + std::to_string(labels.size()));
    }
    double sum = 0.0;
    for (size_t w = 0; w < row.size(); ++w) {
      if (!(row[w] >= -1e-12 && row[w] <= 1.0 + 1e-9) || !std::isfinite(row[w])) {
        throw DomainError("row " + std::to_string(i) + ", column " + std::to_string(w) +
                          ": probability outside [0,1]");
      }
      row[w] = std::max(0.0, row[w]);
      sum += row[w];
    }
    if (std::abs(sum - 1.0) > row_sum_tol) {
      throw DomainError("row " + std::to_string(i) + " sums to " + std::to_string(sum) +
                        ", expected 1");
    }
    for (double& v : row) v /= sum;
  }
  return MechanismTable{n, m, std::move(labels), std::move(rows), std::move(types)};
}

MechanismTable make_randomized_response(int64_t n, int64_t m, double stay_prob, int64_t cap) {
  if (!(stay_prob >= 0.0 && stay_prob <= 1.0)) throw DomainError("stay probability outside [0,1]");
  auto types = ts::enumerate_types(n, m, cap);
  size_t count = types.size();
  double uniform = (1.0 - stay_prob) / static_cast<double>(count);
  std::vector<std::vector<double>> rows(count, std::vector<double>(count, uniform));
  for (size_t i = 0; i < count; ++i) rows[i][i] += stay_prob;
  return make_mechanism(n, m, type_labels(types), std::move(rows), 1e-9, cap);
}

MechanismTable make_exponential_mechanism(int64_t n, int64_t m, double eps_target, int64_t cap) {
  if (!(eps_target > 0.0) || !std::isfinite(eps_target))
    throw DomainError("eps_target must be positive and finite");
  auto types = ts::enumerate_types(n, m, cap);
  size_t count = types.size();
  std::vector<std::vector<double>> rows(count, std::vector<double>(count, 0.0));
  for (size_t i = 0; i < count; ++i) {
    double mass = 0.0;
    for (size_t w = 0; w < count; ++w) {
      double d = static_cast<double>(ts::dataset_distance(types[i], types[w]));
      rows[i][w] = std::exp(-eps_target * d / 2.0);
      mass += rows[i][w];
    }
    for (double& v : rows[i]) v /= mass;
  }
  return make_mechanism(n, m, type_labels(types), std::move(rows), 1e-9, cap);
}

MechanismTable load_mechanism(const std::string& path, int64_t cap) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mechanism file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("mechanism file is not valid JSON: " + std::string(e.what()));
  }
  try {
    int64_t n = j.at("n").get<int64_t>();
    int64_t m = j.at("m").get<int64_t>();
    auto labels = j.at("labels").get<std::vector<std::string>>();
    auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
    return make_mechanism(n, m, std::move(labels), std::move(rows), 1e-9, cap);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("mechanism file schema violation: " + std::string(e.what()));
  }
}

void save_mechanism(const MechanismTable& mech, const std::string& path) {
  nlohmann::ordered_json j;
  j["n"] = mech.n;
  j["m"] = mech.m;
  j["labels"] = mech.labels;
  j["rows"] = mech.rows;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mechanism file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing mechanism file: " + path);
}

PrivacyBudget audit_epsilon(const MechanismTable& mech) {
  double worst = 0.0;
  std::vector<int64_t> neighbor;
  for (size_t i = 0; i < mech.num_types(); ++i) {
    const auto& t = mech.types[i].counts;
    for (size_t a = 0; a < t.size(); ++a) {
      if (t[a] == 0) continue;
      for (size_t b = 0; b < t.size(); ++b) {
        if (b == a) continue;
        neighbor = t;
        --neighbor[a];
        ++neighbor[b];
        int64_t jdx = ts::type_rank(ts::CountVector{neighbor});
        const auto& pi = mech.rows[i];
        const auto& pj = mech.rows[static_cast<size_t>(jdx)];
        for (size_t w = 0; w < pi.size(); ++w) {
          if (pi[w] <= kProbFloor) continue;
          if (pj[w] <= kProbFloor) return PrivacyBudget{kInfinity, 0.0};
          worst = std::max(worst, std::log(pi[w]) - std::log(pj[w]));
        }
      }
    }
  }
  return PrivacyBudget{worst, 0.0};
}

std::pair<double, double> group_privacy_kl_bound(int64_t k, double eps) {
  if (k < 0) throw DomainError("group size must be >= 0");
  if (eps < 0.0) throw DomainError("epsilon must be >= 0");
  if (k == 0 || eps == 0.0) return {0.0, 0.0};
  double x = static_cast<double>(k) * eps;
  return {x * std::tanh(x / 2.0), x};
}

double exact_kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("KL needs a shared support index set");
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInfinity;
    kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return std::max(0.0, kl);
}

double exact_mutual_information(const MechanismTable& mech,
                                const ts::SourceDistribution& pz) {
  if (pz.alphabet_size() != mech.m) throw DomainError("prior alphabet does not match mechanism");
  size_t nt = mech.num_types();
  size_t nw = mech.num_outputs();
  std::vector<double> pt(nt);
  for (size_t i = 0; i < nt; ++i) pt[i] = std::exp(ts::type_log_probability(mech.types[i], pz));
  std::vector<double> pw(nw, 0.0);
  for (size_t i = 0; i < nt; ++i) {
    if (pt[i] <= 0.0) continue;
    for (size_t w = 0; w < nw; ++w) pw[w] += pt[i] * mech.rows[i][w];
  }
  double mi = 0.0;
  for (size_t i = 0; i < nt; ++i) {
    if (pt[i] <= 0.0) continue;
    double kl = 0.0;
    for (size_t w = 0; w < nw; ++w) {
      double p = mech.rows[i][w];
      if (p <= 0.0) continue;
      kl += p * (std::log(p) - std::log(pw[w]));
    }
    mi += pt[i] * std::max(0.0, kl);
  }
  return std::max(0.0, mi);
}

std::vector<bool> support_mask_from_prior(const MechanismTable& mech,
                                          const ts::SourceDistribution& pz) {
  if (pz.alphabet_size() != mech.m) throw DomainError("prior alphabet does not match mechanism");
  std::vector<bool> mask(mech.num_types(), true);
  for (size_t i = 0; i < mech.num_types(); ++i) {
    for (size_t a = 0; a < pz.probs.size(); ++a) {
      if (mech.types[i].counts[a] > 0 && pz.probs[a] <= 0.0) {
        mask[i] = false;
        break;
      }
    }
  }
  return mask;
}

double exact_max_leakage(const MechanismTable& mech, const std::vector<bool>& support_mask) {
  if (support_mask.size() != mech.num_types())
    throw DomainError("support mask size does not match the type space");
  if (std::none_of(support_mask.begin(), support_mask.end(), [](bool b) { return b; }))
    throw DomainError("support mask is empty");
  double total = 0.0;
  for (size_t w = 0; w < mech.num_outputs(); ++w) {
    double mx = 0.0;
    for (size_t i = 0; i < mech.num_types(); ++i) {
      if (support_mask[i]) mx = std::max(mx, mech.rows[i][w]);
    }
    total += mx;
  }
  return std::max(0.0, std::log(total));
}

SumCoverResult sum_cover(const std::vector<std::vector<double>>& pmfs) {
  if (pmfs.empty()) throw DomainError("sum_cover needs at least one pmf");
  size_t width = pmfs.front().size();
  for (const auto& p : pmfs)
    if (p.size() != width) throw DomainError("sum_cover pmfs need a shared support index set");
  double value = 0.0;
  bool disjoint = true;
  for (size_t w = 0; w < width; ++w) {
    double mx = 0.0;
    int positive = 0;
    for (const auto& p : pmfs) {
      mx = std::max(mx, p[w]);
      if (p[w] > 0.0) ++positive;
    }
    value += mx;
    if (positive > 1) disjoint = false;
  }
  return SumCoverResult{value, disjoint};
}

MixtureKlBounds mixture_kl_bounds(std::span<const double> p,
                                  const std::vector<std::vector<double>>& components,
                                  std::span<const double> weights) {
  if (components.empty() || components.size() != weights.size())
    throw DomainError("mixture needs matching components and weights");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("mixture weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");

  std::vector<double> exponents(components.size());
  double hard = kInfinity;
  for (size_t b = 0; b < components.size(); ++b) {
    double kl = exact_kl(p, components[b]);
    exponents[b] = std::log(weights[b]) - kl;  // -inf when kl is +inf
    hard = std::min(hard, kl - std::log(weights[b]));
  }
  double soft = -log_sum_exp(exponents);
  return MixtureKlBounds{soft, hard};
}

double overlap_mixture_kl_bound(std::span<const double> p,
                                const std::vector<std::vector<double>>& components,
                                const MixtureSpec& spec) {
  size_t count = components.size();
  if (count == 0) throw DomainError("mixture needs at least one component");
  if (spec.weights.size() != count || spec.alphas.size() != count)
    throw DomainError("mixture spec size does not match components");
  if (spec.anchor < 0 || static_cast<size_t>(spec.anchor) >= count)
    throw DomainError("mixture anchor out of range");
  double wsum = 0.0;
  for (double w : spec.weights) {
    if (!(w > 0.0)) throw DomainError("mixture weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
  const auto& anchor = components[static_cast<size_t>(spec.anchor)];
  double overlap = 0.0;
  for (size_t b = 0; b < count; ++b) {
    double alpha = spec.alphas[b];
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("overlap coefficient outside [0,1]");
    if (b == static_cast<size_t>(spec.anchor) && std::abs(alpha - 1.0) > 1e-9)
      throw DomainError("anchor overlap coefficient must be 1");
    if (components[b].size() != anchor.size())
      throw DomainError("mixture components need a shared support index set");
    for (size_t w = 0; w < anchor.size(); ++w) {
      if (components[b][w] * (1.0 + 1e-9) + 1e-15 < alpha * anchor[w]) {
        throw DomainError("overlap coefficient " + std::to_string(alpha) + " for component " +
                          std::to_string(b) + " exceeds the largest valid constant");
      }
    }
    overlap += spec.weights[b] * alpha;
  }
  return exact_kl(p, anchor) - std::log(overlap);
}

}  // namespace genbound::mechanisms
