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
#include "genbound/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "genbound/errors.hpp"
#include "genbound/numeric.hpp"
#include "genbound/repset.hpp"
#include "genbound/rng.hpp"
#include "json.hpp"

namespace genbound::experiments {

namespace ts = genbound::typespace;
namespace mech_ns = genbound::mechanisms;

namespace {

// Accumulates one named inequality over many instances, tracking the worst
// slack (rhs - lhs) and where it happened.
class Tracker {
 public:
  explicit Tracker(std::string name, bool asserted = true)
      : name_(std::move(name)), asserted_(asserted) {}

  void expect_le(double lhs, double rhs, double tol, const std::string& ctx) {
    ++instances_;
    bool ok = lhs <= rhs + tol;
    if (!ok) pass_ = false;
    double slack = rhs - lhs;
    if (!std::isnan(slack) && (instances_ == 1 || slack < worst_)) {
      worst_ = slack;
      detail_ = ctx;
    }
  }

  void expect_true(bool ok, const std::string& ctx) {
    ++instances_;
    if (!ok) {
      pass_ = false;
      if (detail_.empty()) detail_ = ctx;
      worst_ = std::min(worst_, -1.0);
    }
  }

  CheckResult result() const {
    return CheckResult{name_, pass_, asserted_, instances_ ? worst_ : 0.0, instances_, detail_};
  }

 private:
  std::string name_;
  bool asserted_;
  bool pass_ = true;
  double worst_ = kInfinity;
  int64_t instances_ = 0;
  std::string detail_;
};

nlohmann::ordered_json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
  return v;
}

nlohmann::ordered_json check_to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["asserted"] = c.asserted;
  j["worst_slack"] = json_number(c.worst_slack);
  j["instances"] = c.instances;
  j["detail"] = c.detail;
  return j;
}

std::string format_double(double v, const char* fmt = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return std::string(buf);
}

int64_t sample_index(std::span<const double> pmf, double u) {
  double acc = 0.0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return static_cast<int64_t>(i);
  }
  return static_cast<int64_t>(pmf.size()) - 1;
}

}  // namespace

int64_t GenerationReport::failures() const {
  int64_t bad = 0;
  for (const auto& c : checks)
    if (c.asserted && !c.pass) ++bad;
  return bad;
}

int64_t BatteryReport::failures() const {
  int64_t bad = 0;
  for (const auto& c : checks)
    if (c.asserted && !c.pass) ++bad;
  return bad;
}

mech_ns::MechanismTable build_battery_mechanism(const MechanismSpec& spec, int64_t n, int64_t m,
                                                int64_t cap) {
  if (spec.family == "constant") return mech_ns::make_randomized_response(n, m, 0.0, cap);
  if (spec.family == "identity") return mech_ns::make_randomized_response(n, m, 1.0, cap);
  if (spec.family == "rr") return mech_ns::make_randomized_response(n, m, spec.param, cap);
  if (spec.family == "expmech") return mech_ns::make_exponential_mechanism(n, m, spec.param, cap);
  throw DomainError("unknown mechanism family: " + spec.family +
                    " (expected constant|rr|identity|expmech)");
}

GenerationReport run_monte_carlo(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw DomainError("trials must be >= 1");
  if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  ts::validate_source_distribution(cfg.prior);
  if (cfg.prior.alphabet_size() != cfg.m) throw DomainError("prior alphabet size must equal m");

  GenerationReport report;
  report.config = cfg;
  auto mech = build_battery_mechanism(cfg.mechanism, cfg.n, cfg.m, cfg.cap);
  report.audited_epsilon = mech_ns::audit_epsilon(mech).epsilon;
  report.exact_mi = mech_ns::exact_mutual_information(mech, cfg.prior);
  report.exact_ml =
      mech_ns::exact_max_leakage(mech, mech_ns::support_mask_from_prior(mech, cfg.prior));

  // Loss 1 - w(z) is bounded on [0, 1].
  bounds::BoundQuery q{cfg.n, cfg.m, {report.audited_epsilon, 0.0}, 0.5};
  report.avg_bound = bounds::gen_avg_bound(report.exact_mi, q);
  report.tail_bound_raw = bounds::gen_tail_bound(report.exact_ml, q, cfg.eta);
  report.tail_bound = std::min(1.0, report.tail_bound_raw);
  for (auto family : bounds::all_families()) {
    try {
      std::optional<int64_t> w_size;
      if (family == bounds::BoundFamily::ml_baseline)
        w_size = static_cast<int64_t>(mech.num_outputs());
      report.info_bounds.emplace_back(bounds::to_string(family),
                                      bounds::evaluate_bound(family, q, w_size).value);
    } catch (const DomainError&) {
      // family not applicable at this (n, eps)
    }
  }

  double nd = static_cast<double>(cfg.n);
  double sum_gen = 0.0, sum_gen2 = 0.0, sum_abs = 0.0, sum_abs2 = 0.0;
  int64_t tail_count = 0;
  std::vector<int64_t> counts(static_cast<size_t>(cfg.m));
  for (int64_t trial = 0; trial < cfg.trials; ++trial) {
    CounterRng rng(cfg.seed, static_cast<uint64_t>(trial));
    std::fill(counts.begin(), counts.end(), int64_t{0});
    for (int64_t i = 0; i < cfg.n; ++i)
      ++counts[static_cast<size_t>(sample_index(cfg.prior.probs, rng.next_double()))];
    auto type_idx =
        static_cast<size_t>(ts::type_rank(ts::CountVector{counts}));
    auto w_idx = static_cast<size_t>(sample_index(mech.rows[type_idx], rng.next_double()));
    const auto& released = mech.types[w_idx].counts;
    double gen = 0.0;
    for (size_t z = 0; z < counts.size(); ++z) {
      gen += static_cast<double>(released[z]) / nd *
             (static_cast<double>(counts[z]) / nd - cfg.prior.probs[z]);
    }
    sum_gen += gen;
    sum_gen2 += gen * gen;
    sum_abs += std::abs(gen);
    sum_abs2 += gen * gen;
    if (std::abs(gen) >= cfg.eta) ++tail_count;
  }
  double trials = static_cast<double>(cfg.trials);
  report.mean_gen = sum_gen / trials;
  report.mean_abs_gen = sum_abs / trials;
  auto std_err = [trials](double sum, double sum2, double mean) {
    if (trials < 2) return 0.0;
    double var = std::max(0.0, (sum2 - trials * mean * mean) / (trials - 1.0));
    (void)sum;
    return std::sqrt(var / trials);
  };
  report.std_err_mean = std_err(sum_gen, sum_gen2, report.mean_gen);
  report.std_err_abs = std_err(sum_abs, sum_abs2, report.mean_abs_gen);
  report.tail_freq = static_cast<double>(tail_count) / trials;
  report.tail_std_err = std::sqrt(report.tail_freq * (1.0 - report.tail_freq) / trials);

  Tracker mean_check("abs_mean_gen_le_avg_bound");
  mean_check.expect_le(std::abs(report.mean_gen), report.avg_bound + 3.0 * report.std_err_mean,
                       0.0, "|mean gen| vs avg bound + 3 SE");
  report.checks.push_back(mean_check.result());

  Tracker tail_check("tail_freq_le_ml_tail_bound");
  tail_check.expect_le(report.tail_freq, report.tail_bound + 3.0 * report.tail_std_err, 0.0,
                       "tail frequency vs clamped tail bound + 3 SE");
  report.checks.push_back(tail_check.result());

  // The avg bound governs |E[gen]|; the mean-of-|gen| comparison is reported
  // for reference but cannot hold at MI = 0 (constant mechanisms).
  Tracker abs_form("mean_abs_gen_le_avg_bound", /*asserted=*/false);
  abs_form.expect_le(report.mean_abs_gen, report.avg_bound + 3.0 * report.std_err_abs, 0.0,
                     "E|gen| vs avg bound + 3 SE (informational)");
  report.checks.push_back(abs_form.result());

  return report;
}

std::string report_to_json(const GenerationReport& report, int indent) {
  nlohmann::ordered_json j;
  j["config"] = {{"n", report.config.n},
                 {"m", report.config.m},
                 {"mechanism_family", report.config.mechanism.family},
                 {"mechanism_param", report.config.mechanism.param},
                 {"prior", report.config.prior.probs},
                 {"trials", report.config.trials},
                 {"seed", report.config.seed},
                 {"eta", report.config.eta}};
  j["audited_epsilon_nats"] = json_number(report.audited_epsilon);
  j["exact_mi_nats"] = report.exact_mi;
  j["exact_ml_nats"] = report.exact_ml;
  j["mean_gen"] = report.mean_gen;
  j["mean_abs_gen"] = report.mean_abs_gen;
  j["std_err_mean"] = report.std_err_mean;
  j["std_err_abs"] = report.std_err_abs;
  j["tail_freq"] = report.tail_freq;
  j["tail_std_err"] = report.tail_std_err;
  j["avg_bound"] = report.avg_bound;
  j["tail_bound_raw"] = json_number(report.tail_bound_raw);
  j["tail_bound"] = report.tail_bound;
  auto info = nlohmann::ordered_json::object();
  for (const auto& [name, value] : report.info_bounds) info[name] = json_number(value);
  j["info_bounds_nats"] = info;
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) checks.push_back(check_to_json(c));
  j["checks"] = checks;
  j["failures"] = report.failures();
  return j.dump(indent);
}

namespace {

struct BatteryRanges {
  int64_t enum_n_max;
  int64_t mech_n_max;
  int64_t repset_n_max;
  int64_t lemma_instances;
  int64_t mc_trials;
  int64_t atypical_draws;
};

BatteryRanges ranges_for(bool full) {
  if (full) return BatteryRanges{10, 6, 12, 100, 10000, 100000};
  return BatteryRanges{4, 4, 6, 25, 2000, 20000};
}

std::vector<MechanismSpec> battery_mechanisms() {
  return {{"constant", 0.0}, {"rr", 0.25},    {"rr", 0.5},     {"rr", 0.9},
          {"expmech", 0.1},  {"expmech", 0.5}, {"expmech", 1.0}};
}

std::string instance_tag(const MechanismSpec& spec, int64_t n, int64_t m) {
  return spec.family + "(" + format_double(spec.param, "%g") + ") n=" + std::to_string(n) +
         " m=" + std::to_string(m);
}

void battery_typespace(const BatteryRanges& r, uint64_t seed, std::vector<CheckResult>& out) {
  Tracker count_check("typespace/enumeration_count_matches_binomial");
  Tracker order_check("typespace/enumeration_order_and_rank");
  Tracker poly_eq("typespace/poly_count_equality_iff_binary");
  for (int64_t m = 2; m <= 4; ++m) {
    for (int64_t n = 0; n <= r.enum_n_max; ++n) {
      auto types = ts::enumerate_types(n, m);
      std::string ctx = "n=" + std::to_string(n) + " m=" + std::to_string(m);
      auto expected = static_cast<double>(ts::type_count(n, m));
      count_check.expect_le(std::abs(static_cast<double>(types.size()) - expected), 0.0, 0.0, ctx);
      count_check.expect_le(
          std::abs(std::exp(ts::type_count_log_exact(n, m)) - expected), 1e-6 * expected, 1e-9, ctx);
      bool ordered = true;
      for (size_t i = 0; i < types.size(); ++i) {
        if (i + 1 < types.size() && !(types[i].counts < types[i + 1].counts)) ordered = false;
        if (ts::type_rank(types[i]) != static_cast<int64_t>(i)) ordered = false;
      }
      order_check.expect_true(ordered, ctx);
      if (n >= 1) {
        int64_t poly = saturating_pow(n + 1, m - 1);
        bool equal = poly == static_cast<int64_t>(types.size());
        poly_eq.expect_true(equal == (m == 2), ctx);
      }
    }
  }
  out.push_back(count_check.result());
  out.push_back(order_check.result());
  out.push_back(poly_eq.result());

  Tracker poly_dom("typespace/poly_count_bound_dominates_exact");
  Tracker stirling_dom("typespace/stirling_count_bound_dominates_exact");
  Tracker stirling_vs_poly("typespace/stirling_below_poly_for_m_ge_3");
  std::vector<int64_t> ns = {1, 2, 3, 5, 9, 16, 28, 50, 89, 158, 282, 501, 1000};
  for (int64_t m = 2; m <= 50; ++m) {
    for (int64_t n : ns) {
      std::string ctx = "n=" + std::to_string(n) + " m=" + std::to_string(m);
      double exact = ts::type_count_log_exact(n, m);
      poly_dom.expect_le(exact, ts::type_count_log_poly(n, m), 1e-9, ctx);
      stirling_dom.expect_le(exact, ts::type_count_log_stirling(n, m), 1e-9, ctx);
      if (m >= 3) {
        stirling_vs_poly.expect_le(ts::type_count_log_stirling(n, m),
                                   ts::type_count_log_poly(n, m), 1e-9, ctx);
      }
    }
  }
  out.push_back(poly_dom.result());
  out.push_back(stirling_dom.result());
  out.push_back(stirling_vs_poly.result());

  Tracker metric("typespace/distance_is_metric");
  for (int64_t m = 2; m <= 3; ++m) {
    for (int64_t n = 1; n <= std::min<int64_t>(r.mech_n_max, 6); ++n) {
      auto types = ts::enumerate_types(n, m);
      std::string ctx = "n=" + std::to_string(n) + " m=" + std::to_string(m);
      for (const auto& a : types) {
        metric.expect_true(ts::dataset_distance(a, a) == 0, ctx);
        for (const auto& b : types) {
          int64_t dab = ts::dataset_distance(a, b);
          metric.expect_true(dab == ts::dataset_distance(b, a), ctx);
          metric.expect_true((dab == 0) == (a == b), ctx);
          for (const auto& c : types) {
            metric.expect_le(static_cast<double>(ts::dataset_distance(a, c)),
                             static_cast<double>(dab + ts::dataset_distance(b, c)), 0.0, ctx);
          }
        }
      }
    }
  }
  out.push_back(metric.result());

  Tracker normalize("typespace/type_probabilities_normalize");
  for (int64_t m = 2; m <= 3; ++m) {
    std::vector<ts::SourceDistribution> priors = {ts::SourceDistribution::uniform(m)};
    if (m == 2) {
      priors.push_back(ts::SourceDistribution{{0.7, 0.3}});
      priors.push_back(ts::SourceDistribution{{1.0, 0.0}});
    } else {
      priors.push_back(ts::SourceDistribution{{0.6, 0.3, 0.1}});
      priors.push_back(ts::SourceDistribution{{0.5, 0.5, 0.0}});
    }
    for (int64_t n = 1; n <= r.repset_n_max; ++n) {
      for (size_t pi = 0; pi < priors.size(); ++pi) {
        double total = 0.0;
        for (const auto& t : ts::enumerate_types(n, m))
          total += std::exp(ts::type_log_probability(t, priors[pi]));
        std::string ctx = "n=" + std::to_string(n) + " m=" + std::to_string(m) + " prior#" +
                          std::to_string(pi);
        normalize.expect_le(std::abs(total - 1.0), 1e-9, 0.0, ctx);
      }
    }
  }
  out.push_back(normalize.result());

  Tracker atypical("typespace/atypical_mass_monte_carlo");
  {
    int64_t n = 100, m = 2;
    auto spec = ts::TypicalSetSpec::defaults(n);
    auto prior = ts::SourceDistribution::uniform(m);
    int64_t hits = 0;
    std::vector<int64_t> counts(2);
    for (int64_t trial = 0; trial < r.atypical_draws; ++trial) {
      CounterRng rng(seed, 0x10000 + static_cast<uint64_t>(trial));
      counts[0] = counts[1] = 0;
      for (int64_t i = 0; i < n; ++i)
        ++counts[static_cast<size_t>(sample_index(prior.probs, rng.next_double()))];
      if (!ts::is_strongly_typical(ts::CountVector{counts}, prior, spec)) ++hits;
    }
    double freq = static_cast<double>(hits) / static_cast<double>(r.atypical_draws);
    double bound = ts::atypical_mass_bound(n, m, spec.eta);
    double se = std::sqrt(std::max(freq * (1.0 - freq), 1.0 / static_cast<double>(r.atypical_draws)) /
                          static_cast<double>(r.atypical_draws));
    atypical.expect_le(freq, bound + 3.0 * se, 0.0,
                       "n=100 m=2 default eta, " + std::to_string(r.atypical_draws) + " draws");
  }
  out.push_back(atypical.result());
}

void battery_mechanisms_and_bounds(const BatteryRanges& r, std::vector<CheckResult>& out) {
  Tracker rr_closed("mechanisms/rr_audit_closed_form");
  Tracker exp_within("mechanisms/expmech_audit_within_target");
  Tracker mi_le_ml("mechanisms/mi_le_ml");
  Tracker ml_cap("mechanisms/ml_le_min_neps_logw");
  Tracker group_kl("mechanisms/group_privacy_kl");
  Tracker mi_dom("bounds/mi_oracle_dominance");
  Tracker ml_dom("bounds/ml_oracle_dominance");
  Tracker alpha_pointwise("mechanisms/dp_overlap_alpha_pointwise");
  Tracker dp_chain("mechanisms/dp_mixture_bound_chain");
  Tracker terms_sum("bounds/terms_sum_to_value");

  auto track_report = [&terms_sum](const bounds::BoundReport& rep, const std::string& ctx) {
    if (std::isinf(rep.value)) return rep.value;
    terms_sum.expect_le(std::abs(rep.value - rep.terms_total()), 1e-9, 0.0,
                        ctx + " " + bounds::to_string(rep.family));
    return rep.value;
  };

  for (int64_t m = 2; m <= 3; ++m) {
    for (int64_t n = 1; n <= r.mech_n_max; ++n) {
      for (const auto& spec : battery_mechanisms()) {
        auto mech = build_battery_mechanism(spec, n, m);
        std::string ctx = instance_tag(spec, n, m);
        double eps = mech_ns::audit_epsilon(mech).epsilon;
        auto prior = ts::SourceDistribution::uniform(m);
        double mi = mech_ns::exact_mutual_information(mech, prior);
        double ml = mech_ns::exact_max_leakage(mech, mech_ns::support_mask_from_prior(mech, prior));

        if (spec.family == "rr" || spec.family == "constant") {
          double stay = spec.param;
          double types_count = static_cast<double>(mech.num_types());
          double closed =
              stay < 1.0 ? std::log1p(stay * types_count / (1.0 - stay)) : kInfinity;
          rr_closed.expect_le(std::abs(eps - closed), 1e-9, 0.0, ctx);
        }
        if (spec.family == "expmech") {
          exp_within.expect_le(eps, spec.param, 1e-9, ctx);
        }

        mi_le_ml.expect_le(mi, ml, 1e-9, ctx);
        double w_cap = std::log(static_cast<double>(mech.num_outputs()));
        ml_cap.expect_le(ml, std::min(static_cast<double>(n) * eps, w_cap), 1e-9, ctx);

        for (size_t i = 0; i < mech.num_types(); ++i) {
          for (size_t j = 0; j < mech.num_types(); ++j) {
            if (i == j) continue;
            int64_t k = ts::dataset_distance(mech.types[i], mech.types[j]);
            double kl = mech_ns::exact_kl(mech.rows[i], mech.rows[j]);
            group_kl.expect_le(kl, mech_ns::group_privacy_kl_bound(k, eps).first, 1e-9,
                               ctx + " d=" + std::to_string(k));
          }
        }

        bounds::BoundQuery q{n, m, {eps, 0.0}, 0.5};
        mi_dom.expect_le(mi, track_report(bounds::bound_eq8(q), ctx), 1e-9, ctx + " eq8");
        mi_dom.expect_le(mi, track_report(bounds::bound_thm1(q), ctx), 1e-9, ctx + " thm1");
        mi_dom.expect_le(mi, track_report(bounds::bound_thm2(q), ctx), 1e-9, ctx + " thm2");
        if (eps <= 1.0)
          mi_dom.expect_le(mi, track_report(bounds::bound_eq9(q), ctx), 1e-9, ctx + " eq9");
        if (n >= 2)
          mi_dom.expect_le(mi, track_report(bounds::bound_thm3(q), ctx), 1e-9, ctx + " thm3");

        ml_dom.expect_le(ml, track_report(bounds::bound_thm4(q), ctx), 1e-9, ctx + " thm4");
        ml_dom.expect_le(ml, track_report(bounds::bound_thm4_sharpened(q), ctx), 1e-9,
                         ctx + " thm4_sharp");
        if (eps <= 1.0)
          ml_dom.expect_le(ml, track_report(bounds::bound_thm5(q), ctx), 1e-9, ctx + " thm5");
        ml_dom.expect_le(
            ml,
            track_report(
                bounds::ml_dp_baseline(q, static_cast<int64_t>(mech.num_outputs())), ctx),
            1e-9, ctx + " ml_baseline");

        // Overlap-mixture machinery on the DP instances (small n to keep the
        // pairwise pointwise scan cheap).
        if (n <= 4 && std::isfinite(eps)) {
          size_t count = mech.num_types();
          std::vector<double> weights(count, 1.0 / static_cast<double>(count));
          std::vector<double> mixture(mech.num_outputs(), 0.0);
          for (size_t b = 0; b < count; ++b)
            for (size_t w = 0; w < mixture.size(); ++w)
              mixture[w] += weights[b] * mech.rows[b][w];
          for (size_t anchor : {size_t{0}, count - 1}) {
            std::vector<double> alphas(count);
            for (size_t b = 0; b < count; ++b) {
              auto d = static_cast<double>(
                  ts::dataset_distance(mech.types[b], mech.types[anchor]));
              alphas[b] = std::exp(-eps * d);
              for (size_t w = 0; w < mech.num_outputs(); ++w) {
                alpha_pointwise.expect_le(alphas[b] * mech.rows[anchor][w],
                                          mech.rows[b][w], 1e-12,
                                          ctx + " b=" + std::to_string(b));
              }
            }
            mech_ns::MixtureSpec mix_spec{weights, alphas, static_cast<int64_t>(anchor)};
            for (size_t s = 0; s < count; ++s) {
              const auto& p = mech.rows[s];
              double exact = mech_ns::exact_kl(p, mixture);
              double overlap_bound = mech_ns::overlap_mixture_kl_bound(p, mech.rows, mix_spec);
              double hard_at_anchor =
                  mech_ns::exact_kl(p, mech.rows[anchor]) - std::log(weights[anchor]);
              std::string where = ctx + " s=" + std::to_string(s) + " anchor=" +
                                  std::to_string(anchor);
              dp_chain.expect_le(exact, overlap_bound, 1e-9, where);
              dp_chain.expect_le(overlap_bound, hard_at_anchor, 1e-9, where);
            }
          }
        }
      }
    }
  }
  out.push_back(rr_closed.result());
  out.push_back(exp_within.result());
  out.push_back(mi_le_ml.result());
  out.push_back(ml_cap.result());
  out.push_back(group_kl.result());
  out.push_back(mi_dom.result());
  out.push_back(ml_dom.result());
  out.push_back(alpha_pointwise.result());
  out.push_back(dp_chain.result());
  out.push_back(terms_sum.result());
}

void battery_random_mixtures(const BatteryRanges& r, uint64_t seed,
                             std::vector<CheckResult>& out) {
  Tracker chain("mechanisms/mixture_bound_chain_random");
  Tracker soft_hard("mechanisms/mixture_soft_le_hard");
  Tracker cover("mechanisms/sum_cover_equality_detection");

  constexpr size_t kSupport = 4;
  constexpr size_t kComponents = 3;
  for (int64_t inst = 0; inst < r.lemma_instances; ++inst) {
    CounterRng rng(seed, 0x20000 + static_cast<uint64_t>(inst));
    auto draw_pmf = [&rng]() {
      std::vector<double> p(kSupport);
      double total = 0.0;
      for (double& v : p) {
        v = 0.05 + rng.next_double();
        total += v;
      }
      for (double& v : p) v /= total;
      return p;
    };
    auto p = draw_pmf();
    std::vector<std::vector<double>> components;
    for (size_t b = 0; b < kComponents; ++b) components.push_back(draw_pmf());
    std::vector<double> weights(kComponents);
    double wtotal = 0.0;
    for (double& w : weights) {
      w = 0.1 + rng.next_double();
      wtotal += w;
    }
    for (double& w : weights) w /= wtotal;

    std::vector<double> mixture(kSupport, 0.0);
    for (size_t b = 0; b < kComponents; ++b)
      for (size_t w = 0; w < kSupport; ++w) mixture[w] += weights[b] * components[b][w];

    int64_t anchor = inst % kComponents;
    std::vector<double> alphas(kComponents);
    for (size_t b = 0; b < kComponents; ++b) {
      double ratio = kInfinity;
      for (size_t w = 0; w < kSupport; ++w)
        ratio = std::min(ratio, components[b][w] / components[static_cast<size_t>(anchor)][w]);
      alphas[b] = std::min(1.0, ratio);
    }
    alphas[static_cast<size_t>(anchor)] = 1.0;

    std::string ctx = "instance " + std::to_string(inst);
    double exact = mech_ns::exact_kl(p, mixture);
    auto pair = mech_ns::mixture_kl_bounds(p, components, weights);
    double overlap =
        mech_ns::overlap_mixture_kl_bound(p, components, {weights, alphas, anchor});
    double hard_at_anchor =
        mech_ns::exact_kl(p, components[static_cast<size_t>(anchor)]) -
        std::log(weights[static_cast<size_t>(anchor)]);
    chain.expect_le(exact, overlap, 1e-9, ctx);
    chain.expect_le(overlap, hard_at_anchor, 1e-9, ctx);
    chain.expect_le(exact, pair.soft, 1e-9, ctx);
    soft_hard.expect_le(pair.soft, pair.hard, 1e-12, ctx);

    auto sc = mech_ns::sum_cover(components);
    cover.expect_le(sc.value, static_cast<double>(kComponents), 1e-12, ctx);
    bool brute_disjoint = true;
    for (size_t w = 0; w < kSupport; ++w) {
      int positive = 0;
      for (const auto& comp : components)
        if (comp[w] > 0.0) ++positive;
      if (positive > 1) brute_disjoint = false;
    }
    cover.expect_true(sc.is_equality == brute_disjoint, ctx);
  }
  // Disjoint-support instance: equality must be detected.
  auto disjoint = mech_ns::sum_cover({{1.0, 0.0, 0.0, 0.0}, {0.0, 0.4, 0.6, 0.0}});
  cover.expect_true(disjoint.is_equality && std::abs(disjoint.value - 2.0) < 1e-12,
                    "handcrafted disjoint pair");
  out.push_back(chain.result());
  out.push_back(soft_hard.result());
  out.push_back(cover.result());
}

void battery_repset(const BatteryRanges& r, std::vector<CheckResult>& out) {
  Tracker radius("repset/covering_radius");
  Tracker typical_radius("repset/typical_covering_radius");
  Tracker ceilings("repset/cell_count_ceilings");
  Tracker neighbor("repset/neighbor_distance");
  Tracker deterministic("repset/deterministic_build");

  for (int64_t m = 2; m <= 3; ++m) {
    for (int64_t n = 1; n <= r.repset_n_max; ++n) {
      auto types = ts::enumerate_types(n, m);
      for (int64_t t = 1; t <= n; ++t) {
        std::string ctx = "n=" + std::to_string(n) + " m=" + std::to_string(m) +
                          " t=" + std::to_string(t);
        for (auto variant : {repset::GridVariant::full_cube, repset::GridVariant::simplex}) {
          auto g = repset::build_grid(n, m, t, variant);
          std::string vctx = ctx + " " + repset::to_string(variant);
          int64_t raw_ceiling = variant == repset::GridVariant::full_cube
                                    ? saturating_pow(t, m - 1)
                                    : repset::simplex_cell_count(m, t).exact.value();
          ceilings.expect_le(static_cast<double>(g.raw_cell_count),
                             static_cast<double>(raw_ceiling), 0.0, vctx);
          ceilings.expect_le(static_cast<double>(g.representatives.size()),
                             static_cast<double>(g.raw_cell_count), 0.0, vctx);
          for (const auto& s : types) {
            auto near = repset::nearest_representative(s, g);
            radius.expect_true(near.covered, vctx);
            radius.expect_le(static_cast<double>(near.distance * t),
                             static_cast<double>((m - 1) * n), 0.0, vctx);
          }
          auto nb = repset::neighbor_distance_check(g);
          if (nb.applicable) {
            neighbor.expect_le(static_cast<double>(nb.max_min_distance),
                               static_cast<double>(g.delta_t), 0.0, vctx);
          }
          auto again = repset::build_grid(n, m, t, variant);
          deterministic.expect_true(again.representatives == g.representatives, vctx);
        }
        if (n >= 2) {
          auto prior = ts::SourceDistribution::uniform(m);
          auto g = repset::build_grid(n, m, t, repset::GridVariant::typical, prior);
          std::string vctx = ctx + " typical";
          double md = static_cast<double>(m);
          int64_t cube_cells = saturating_pow(t, m);
          auto band_cells = static_cast<double>(m) * static_cast<double>(saturating_pow(t, m - 1));
          ceilings.expect_le(static_cast<double>(g.raw_cell_count),
                             std::min(static_cast<double>(cube_cells), band_cells), 0.0, vctx);
          ts::TypicalSetSpec spec{g.eta, n};
          for (const auto& s : types) {
            auto near = repset::nearest_representative(s, g);
            if (ts::is_strongly_typical(s, prior, spec)) {
              typical_radius.expect_true(near.covered, vctx);
              typical_radius.expect_le(
                  static_cast<double>(near.distance),
                  md * static_cast<double>(n) * g.eta / static_cast<double>(t), 1e-9, vctx);
            } else {
              typical_radius.expect_true(!near.covered, vctx);
            }
          }
          auto nb = repset::neighbor_distance_check(g);
          if (nb.applicable) {
            neighbor.expect_le(static_cast<double>(nb.max_min_distance),
                               static_cast<double>(g.delta_t), 0.0, vctx);
          }
        }
      }
    }
  }
  out.push_back(radius.result());
  out.push_back(typical_radius.result());
  out.push_back(ceilings.result());
  out.push_back(neighbor.result());
  out.push_back(deterministic.result());

  Tracker simplex_counts("repset/simplex_count_exact_le_upper");
  for (int64_t m = 2; m <= 10; ++m) {
    for (int64_t t = 1; t <= 100; ++t) {
      auto counts = repset::simplex_cell_count(m, t);
      simplex_counts.expect_le(static_cast<double>(counts.exact.value()),
                               counts.upper * (1.0 + 1e-12), 1e-9,
                               "m=" + std::to_string(m) + " t=" + std::to_string(t));
    }
  }
  out.push_back(simplex_counts.result());
}

void battery_bound_grids(bool full, std::vector<CheckResult>& out) {
  Tracker improves("bounds/thm1_improves_eq9");
  bool strict_somewhere = false;
  for (double eps : {0.001, 0.01, 0.1, 0.5, 1.0}) {
    for (int64_t n : {int64_t{10}, int64_t{100}, int64_t{1000}, int64_t{10000}}) {
      for (int64_t m : {int64_t{2}, int64_t{5}, int64_t{10}}) {
        bounds::BoundQuery q{n, m, {eps, 0.0}, 0.5};
        double v1 = bounds::bound_thm1(q).value;
        double v9 = bounds::bound_eq9(q).value;
        improves.expect_le(v1, v9, 1e-9,
                           "eps=" + format_double(eps, "%g") + " n=" + std::to_string(n) +
                               " m=" + std::to_string(m));
        if (v1 < v9 - 1e-9) strict_somewhere = true;
      }
    }
  }
  improves.expect_true(strict_somewhere, "strict inequality somewhere on the grid");
  out.push_back(improves.result());

  Tracker monotone("bounds/monotone_in_epsilon");
  Tracker tightest("bounds/thm3_tightest_on_small_binary_grid");
  {
    int64_t n = full ? 1000 : 100;
    int64_t m = 2;
    auto grid = log_spaced_grid(1e-3, 1.0, full ? 50 : 12);
    std::vector<bounds::BoundFamily> eps_families = {
        bounds::BoundFamily::eq9,  bounds::BoundFamily::thm1, bounds::BoundFamily::thm2,
        bounds::BoundFamily::thm3, bounds::BoundFamily::thm5, bounds::BoundFamily::ml_baseline};
    std::vector<double> prev(eps_families.size(), -1.0);
    for (double eps : grid) {
      bounds::BoundQuery q{n, m, {eps, 0.0}, 0.5};
      for (size_t f = 0; f < eps_families.size(); ++f) {
        double v = bounds::evaluate_bound(eps_families[f], q).value;
        monotone.expect_le(prev[f], v, 1e-9,
                           bounds::to_string(eps_families[f]) + " at eps=" +
                               format_double(eps, "%g"));
        prev[f] = v;
      }
    }
    for (double eps : log_spaced_grid(1e-2, 1.0, 25)) {
      bounds::BoundQuery q{n, m, {eps, 0.0}, 0.5};
      double v3 = bounds::bound_thm3(q).value;
      double v1 = bounds::bound_thm1(q).value;
      double v2 = bounds::bound_thm2(q).value;
      tightest.expect_le(v3, std::min(v1, v2), 1e-9, "eps=" + format_double(eps, "%g"));
    }
  }
  out.push_back(monotone.result());
  out.push_back(tightest.result());
}

void battery_monte_carlo(const BatteryRanges& r, uint64_t seed, std::vector<CheckResult>& out) {
  Tracker mean_check("experiments/mc_abs_mean_within_bound");
  Tracker tail_check("experiments/mc_tail_within_bound");
  Tracker determinism("experiments/mc_determinism");

  std::vector<ExperimentConfig> configs;
  // The headline configuration.
  configs.push_back(ExperimentConfig{50, 2, {"rr", 0.5}, ts::SourceDistribution::uniform(2),
                                     r.mc_trials, seed, 0.3, ts::kDefaultEnumerationCap});
  for (const auto& spec : battery_mechanisms()) {
    for (double eta : {0.3, 0.5}) {
      configs.push_back(ExperimentConfig{r.mech_n_max, 2, spec, ts::SourceDistribution::uniform(2),
                                         r.mc_trials / 2, seed + 1, eta,
                                         ts::kDefaultEnumerationCap});
      configs.push_back(ExperimentConfig{std::min<int64_t>(4, r.mech_n_max), 3, spec,
                                         ts::SourceDistribution::uniform(3), r.mc_trials / 2,
                                         seed + 2, eta, ts::kDefaultEnumerationCap});
    }
  }
  for (const auto& cfg : configs) {
    auto report = run_monte_carlo(cfg);
    std::string ctx = instance_tag(cfg.mechanism, cfg.n, cfg.m) + " eta=" +
                      format_double(cfg.eta, "%g");
    mean_check.expect_le(std::abs(report.mean_gen),
                         report.avg_bound + 3.0 * report.std_err_mean, 0.0, ctx);
    tail_check.expect_le(report.tail_freq, report.tail_bound + 3.0 * report.tail_std_err, 0.0,
                         ctx);
  }
  {
    auto& cfg = configs.front();
    determinism.expect_true(report_to_json(run_monte_carlo(cfg)) ==
                                report_to_json(run_monte_carlo(cfg)),
                            "same config and seed twice");
  }
  out.push_back(mean_check.result());
  out.push_back(tail_check.result());
  out.push_back(determinism.result());
}

}  // namespace

BatteryReport run_verification_battery(const BatteryOptions& options) {
  BatteryReport report;
  report.options = options;
  auto ranges = ranges_for(options.full);
  battery_typespace(ranges, options.seed, report.checks);
  battery_mechanisms_and_bounds(ranges, report.checks);
  battery_random_mixtures(ranges, options.seed, report.checks);
  battery_repset(ranges, report.checks);
  battery_bound_grids(options.full, report.checks);
  battery_monte_carlo(ranges, options.seed, report.checks);
  return report;
}

std::string battery_to_json(const BatteryReport& report, int indent) {
  nlohmann::ordered_json j;
  j["mode"] = report.options.full ? "full" : "quick";
  j["seed"] = report.options.seed;
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) checks.push_back(check_to_json(c));
  j["checks"] = checks;
  j["failures"] = report.failures();
  return j.dump(indent);
}

void write_battery_table(std::ostream& os, const BatteryReport& report) {
  for (const auto& c : report.checks) {
    os << (c.pass ? "[PASS] " : (c.asserted ? "[FAIL] " : "[INFO] ")) << c.name << " ("
       << c.instances << " instances, worst slack " << format_double(c.worst_slack, "%.6g");
    if (!c.pass && !c.detail.empty()) os << ", at " << c.detail;
    os << ")\n";
  }
  if (report.failures() == 0)
    os << "all checks passed\n";
  else
    os << "failures: " << report.failures() << "\n";
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
  if (points < 1) throw DomainError("grid needs at least one point");
  if (points == 1 || lo == hi) return std::vector<double>(static_cast<size_t>(points), lo);
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("log grid needs 0 < lo < hi");
  std::vector<double> grid(static_cast<size_t>(points));
  double ratio = std::log(hi / lo);
  for (int i = 0; i < points; ++i)
    grid[static_cast<size_t>(i)] =
        lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
  grid.back() = hi;
  return grid;
}

SweepRequest fig1_preset() {
  return SweepRequest{1000, 2, log_spaced_grid(1e-3, 1.0, 50), bounds::all_families(), 0.5, 1};
}

SweepRequest fig2_preset() {
  return SweepRequest{10000000, 1000000, log_spaced_grid(1e-3, 1.0, 50), bounds::all_families(),
                      0.5, 1};
}

std::vector<SweepCell> sweep_figure(const SweepRequest& req) {
  if (req.families.empty()) throw DomainError("sweep needs at least one bound family");
  if (req.eps_grid.empty()) throw DomainError("sweep needs a non-empty epsilon grid");
  size_t per_eps = req.families.size();
  std::vector<SweepCell> cells(req.eps_grid.size() * per_eps);
  auto compute_eps = [&](size_t e) {
    double eps = req.eps_grid[e];
    for (size_t f = 0; f < per_eps; ++f) {
      SweepCell& cell = cells[e * per_eps + f];
      cell.epsilon = eps;
      cell.family = req.families[f];
      try {
        bounds::BoundQuery q{req.n, req.m, {eps, 0.0}, req.sigma};
        auto report = bounds::evaluate_bound(cell.family, q);
        cell.value = report.value;
        cell.argmin_t = report.argmin_t;
      } catch (const DomainError&) {
        // recorded as an empty cell
      }
    }
  };
  int jobs = std::max(1, req.jobs);
  if (jobs == 1 || req.eps_grid.size() == 1) {
    for (size_t e = 0; e < req.eps_grid.size(); ++e) compute_eps(e);
  } else {
    std::vector<std::thread> workers;
    std::size_t stride = static_cast<size_t>(jobs);
    for (size_t w = 0; w < stride; ++w) {
      workers.emplace_back([&, w]() {
        for (size_t e = w; e < req.eps_grid.size(); e += stride) compute_eps(e);
      });
    }
    for (auto& th : workers) th.join();
  }
  return cells;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "epsilon,family,value_nats,argmin_t\n";
  for (const auto& cell : cells) {
    os << format_double(cell.epsilon) << ',' << bounds::to_string(cell.family) << ',';
    if (cell.value.has_value()) {
      if (std::isinf(*cell.value))
        os << "infinity";
      else
        os << format_double(*cell.value);
    }
    os << ',';
    if (cell.argmin_t.has_value()) os << *cell.argmin_t;
    os << '\n';
  }
}

}  // namespace genbound::experiments
