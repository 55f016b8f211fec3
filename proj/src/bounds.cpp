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
#include "genbound/bounds.hpp"

#include <cmath>

#include "genbound/errors.hpp"
#include "genbound/numeric.hpp"
#include "genbound/typespace.hpp"

namespace genbound::bounds {

namespace {

BoundReport saturated_report(BoundFamily family) {
  return BoundReport{family, kInfinity, std::nullopt,
                     {{"saturated_infinite_epsilon", kInfinity}}};
}

}  // namespace

std::string to_string(BoundFamily family) {
  switch (family) {
    case BoundFamily::eq8: return "eq8";
    case BoundFamily::eq9: return "eq9";
    case BoundFamily::thm1: return "thm1";
    case BoundFamily::thm2: return "thm2";
    case BoundFamily::thm3: return "thm3";
    case BoundFamily::thm4: return "thm4";
    case BoundFamily::thm4_sharp: return "thm4_sharp";
    case BoundFamily::thm5: return "thm5";
    case BoundFamily::ml_baseline: return "ml_baseline";
  }
  return "unknown";
}

std::optional<BoundFamily> family_from_string(const std::string& name) {
  for (BoundFamily f : all_families())
    if (to_string(f) == name) return f;
  return std::nullopt;
}

std::vector<BoundFamily> all_families() {
  return {BoundFamily::eq8,  BoundFamily::eq9,        BoundFamily::thm1,
          BoundFamily::thm2, BoundFamily::thm3,       BoundFamily::thm4,
          BoundFamily::thm5, BoundFamily::thm4_sharp, BoundFamily::ml_baseline};
}

bool family_uses_epsilon(BoundFamily family) {
  switch (family) {
    case BoundFamily::eq8:
    case BoundFamily::thm4:
    case BoundFamily::thm4_sharp:
      return false;
    default:
      return true;
  }
}

void validate_query(const BoundQuery& q) {
  if (q.n < 1) throw DomainError("bound query needs n >= 1");
  if (q.m < 2) throw DomainError("bound query needs m >= 2");
  if (!(q.sigma > 0.0)) throw DomainError("bound query needs sigma > 0");
  if (q.epsilon.epsilon < 0.0 || std::isnan(q.epsilon.epsilon))
    throw DomainError("bound query needs epsilon >= 0");
  if (q.epsilon.delta != 0.0)
    throw DomainError("bound formulas require delta == 0 (delta is audit metadata only)");
}

double BoundReport::terms_total() const {
  double sum = 0.0;
  for (const auto& term : terms) sum += term.value;
  return sum;
}

BoundReport bound_eq8(const BoundQuery& q) {
  validate_query(q);
  double v = static_cast<double>(q.m - 1) * std::log(static_cast<double>(q.n) + 1.0);
  return BoundReport{BoundFamily::eq8, v, std::nullopt, {{"type_count_poly", v}}};
}

BoundReport bound_eq9(const BoundQuery& q) {
  validate_query(q);
  double eps = q.epsilon.epsilon;
  if (eps > 1.0) throw DomainError("eq9 requires eps <= 1 (eq8 is the valid fallback)");
  double v = static_cast<double>(q.m - 1) * std::log1p(M_E * eps * static_cast<double>(q.n));
  return BoundReport{BoundFamily::eq9, v, std::nullopt, {{"dp_type_count", v}}};
}

BoundReport bound_thm1(const BoundQuery& q) {
  validate_query(q);
  double eps = q.epsilon.epsilon;
  if (std::isinf(eps)) return saturated_report(BoundFamily::thm1);
  double k = static_cast<double>(q.m - 1);
  double nd = static_cast<double>(q.n);
  // The overlap credit does not depend on t here.
  double credit = log_one_plus_exp_neg(eps * nd);
  double best = kInfinity;
  int64_t best_t = 1;
  for (int64_t t = 1; t <= q.n; ++t) {
    double td = static_cast<double>(t);
    double f = k * eps * nd / td + k * std::log(td) - (t >= 2 ? credit : 0.0);
    if (f < best) {
      best = f;
      best_t = t;
    }
  }
  double td = static_cast<double>(best_t);
  BoundReport report{BoundFamily::thm1, best, best_t, {}};
  report.terms.push_back({"cover", k * eps * nd / td});
  report.terms.push_back({"cells", k * std::log(td)});
  if (best_t >= 2) report.terms.push_back({"overlap_credit", -credit});
  return report;
}

BoundReport bound_thm2(const BoundQuery& q) {
  validate_query(q);
  double eps = q.epsilon.epsilon;
  if (std::isinf(eps)) return saturated_report(BoundFamily::thm2);
  double k = static_cast<double>(q.m - 1);
  double nd = static_cast<double>(q.n);
  double shift = static_cast<double>(q.m - 2) / 2.0;
  double log_factorial = std::lgamma(static_cast<double>(q.m));
  double best = kInfinity;
  int64_t best_t = 1;
  for (int64_t t = 1; t <= q.n; ++t) {
    double td = static_cast<double>(t);
    double f = k * eps * nd / td + k * std::log(td + shift) - log_factorial;
    if (t >= 2) {
      int64_t delta_t = ceil_div(q.n, t) + 1;
      f -= log_one_plus_exp_neg(eps * static_cast<double>(delta_t));
    }
    if (f < best) {
      best = f;
      best_t = t;
    }
  }
  double td = static_cast<double>(best_t);
  BoundReport report{BoundFamily::thm2, best, best_t, {}};
  report.terms.push_back({"cover", k * eps * nd / td});
  report.terms.push_back({"cells", k * std::log(td + shift) - log_factorial});
  if (best_t >= 2) {
    int64_t delta_t = ceil_div(q.n, best_t) + 1;
    report.terms.push_back(
        {"overlap_credit", -log_one_plus_exp_neg(eps * static_cast<double>(delta_t))});
  }
  return report;
}

BoundReport bound_thm3(const BoundQuery& q) {
  validate_query(q);
  if (q.n < 2) throw DomainError("thm3 requires n >= 2 (the grid range is empty at n = 1)");
  double eps = q.epsilon.epsilon;
  if (std::isinf(eps)) return saturated_report(BoundFamily::thm3);
  double md = static_cast<double>(q.m);
  double nd = static_cast<double>(q.n);
  double root = std::sqrt(nd * std::log(nd));  // half-width of the typical cube
  auto t_max = static_cast<int64_t>(std::floor(2.0 * root));
  double atypical = 2.0 * md * eps / nd;
  double log_m = std::log(md);
  double best = kInfinity;
  int64_t best_t = 1;
  for (int64_t t = 1; t <= t_max; ++t) {
    double td = static_cast<double>(t);
    double f = eps * md * root / td + atypical;
    if (t >= 2) {
      double delta_t = std::ceil(2.0 * root / td) + 1.0;
      f -= log_one_plus_exp_neg(eps * delta_t);
      f += std::min(md * std::log(td), log_m + (md - 1.0) * std::log(td));
    }
    if (f < best) {
      best = f;
      best_t = t;
    }
  }
  double td = static_cast<double>(best_t);
  BoundReport report{BoundFamily::thm3, best, best_t, {}};
  report.terms.push_back({"cover", eps * md * root / td});
  report.terms.push_back({"atypical", atypical});
  if (best_t >= 2) {
    double delta_t = std::ceil(2.0 * root / td) + 1.0;
    report.terms.push_back({"overlap_credit", -log_one_plus_exp_neg(eps * delta_t)});
    report.terms.push_back({"cells", std::min(md * std::log(td), log_m + (md - 1.0) * std::log(td))});
  }
  return report;
}

BoundReport bound_thm4(const BoundQuery& q) {
  validate_query(q);
  double v = typespace::type_count_log_poly(q.n, q.m);
  return BoundReport{BoundFamily::thm4, v, std::nullopt, {{"type_count_poly", v}}};
}

BoundReport bound_thm4_sharpened(const BoundQuery& q) {
  validate_query(q);
  double v = typespace::type_count_log_stirling(q.n, q.m);
  return BoundReport{BoundFamily::thm4_sharp, v, std::nullopt, {{"type_count_stirling", v}}};
}

BoundReport bound_thm5(const BoundQuery& q) {
  validate_query(q);
  double eps = q.epsilon.epsilon;
  if (std::isinf(eps)) return saturated_report(BoundFamily::thm5);
  if (eps > 1.0) throw DomainError("thm5 requires eps <= 1");
  double k = static_cast<double>(q.m - 1);
  double nd = static_cast<double>(q.n);
  if (eps <= 1.0 / nd) {
    double v = k * nd * eps;
    return BoundReport{BoundFamily::thm5, v, std::nullopt, {{"small_eps_linear", v}}};
  }
  double v = k * (1.0 + std::log1p(nd * eps));
  return BoundReport{BoundFamily::thm5, v, std::nullopt, {{"large_eps_log", v}}};
}

BoundReport ml_dp_baseline(const BoundQuery& q, std::optional<int64_t> w_size) {
  validate_query(q);
  double v = static_cast<double>(q.n) * q.epsilon.epsilon;
  if (q.epsilon.epsilon == 0.0) v = 0.0;
  BoundReport report{BoundFamily::ml_baseline, v, std::nullopt, {}};
  if (w_size.has_value()) {
    if (*w_size < 1) throw DomainError("hypothesis count must be >= 1");
    double cap = std::log(static_cast<double>(*w_size));
    if (cap < v) {
      report.value = cap;
      report.terms.push_back({"log_hypothesis_count", cap});
      return report;
    }
  }
  report.terms.push_back({"n_eps", v});
  return report;
}

BoundReport evaluate_bound(BoundFamily family, const BoundQuery& q,
                           std::optional<int64_t> w_size) {
  switch (family) {
    case BoundFamily::eq8: return bound_eq8(q);
    case BoundFamily::eq9: return bound_eq9(q);
    case BoundFamily::thm1: return bound_thm1(q);
    case BoundFamily::thm2: return bound_thm2(q);
    case BoundFamily::thm3: return bound_thm3(q);
    case BoundFamily::thm4: return bound_thm4(q);
    case BoundFamily::thm4_sharp: return bound_thm4_sharpened(q);
    case BoundFamily::thm5: return bound_thm5(q);
    case BoundFamily::ml_baseline: return ml_dp_baseline(q, w_size);
  }
  throw DomainError("unknown bound family");
}

double gen_avg_bound(double mi_nats, const BoundQuery& q) {
  validate_query(q);
  if (mi_nats < 0.0) throw DomainError("mutual information must be >= 0");
  return std::sqrt(2.0 * q.sigma * q.sigma * mi_nats / static_cast<double>(q.n));
}

double gen_tail_bound(double ml_nats, const BoundQuery& q, double eta) {
  validate_query(q);
  if (ml_nats < 0.0) throw DomainError("maximal leakage must be >= 0");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  return 2.0 * std::exp(ml_nats - static_cast<double>(q.n) * eta * eta / (2.0 * q.sigma * q.sigma));
}

TailValue gen_tail_explicit(const BoundQuery& q, double eta) {
  validate_query(q);
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  double log_value = std::log(2.0) + typespace::type_count_log_stirling(q.n, q.m) -
                     static_cast<double>(q.n) * eta * eta / (2.0 * q.sigma * q.sigma);
  return TailValue{log_value, std::exp(log_value)};
}

}  // namespace genbound::bounds
