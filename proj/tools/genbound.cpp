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
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "genbound/bounds.hpp"
#include "genbound/errors.hpp"
#include "genbound/experiments.hpp"
#include "genbound/mechanisms.hpp"
#include "genbound/numeric.hpp"
#include "genbound/repset.hpp"
#include "genbound/typespace.hpp"
#include "json.hpp"

namespace {

namespace ts = genbound::typespace;
namespace mechs = genbound::mechanisms;
namespace bnd = genbound::bounds;
namespace expt = genbound::experiments;
namespace rep = genbound::repset;

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

int failure_exit_code(int64_t failures) {
  if (failures <= 0) return 0;
  return static_cast<int>(std::min<int64_t>(100, failures + 3));
}

std::string format_value(double v, bool bits) {
  if (std::isinf(v)) return "infinity";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", bits ? v / std::log(2.0) : v);
  return std::string(buf);
}

nlohmann::ordered_json value_json(double v) {
  if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
  return v;
}

int resolve_jobs(int flag_jobs) {
  if (flag_jobs > 0) return flag_jobs;
  if (const char* env = std::getenv("GENBOUND_JOBS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw genbound::IoError("cannot write output file: " + path);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  auto out = open_output(path);
  out << text;
  if (!out) throw genbound::IoError("failed writing output file: " + path);
}

ts::SourceDistribution load_prior(const std::string& spec, int64_t m) {
  if (spec.empty() || spec == "uniform") return ts::SourceDistribution::uniform(m);
  std::ifstream in(spec);
  if (!in) throw genbound::IoError("cannot open prior file: " + spec);
  nlohmann::json j;
  try {
    in >> j;
    ts::SourceDistribution prior{j.get<std::vector<double>>()};
    ts::validate_source_distribution(prior);
    if (prior.alphabet_size() != m)
      throw genbound::DomainError("prior file has " + std::to_string(prior.alphabet_size()) +
                                  " entries, expected " + std::to_string(m));
    return prior;
  } catch (const nlohmann::json::exception& e) {
    throw genbound::DomainError("prior file must be a JSON array of probabilities: " +
                                std::string(e.what()));
  }
}

std::vector<double> parse_eps_grid(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  int points = 0;
  char colon1 = 0, colon2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> colon1 >> hi >> colon2 >> points) || colon1 != ':' || colon2 != ':' ||
      !in.eof()) {
    throw genbound::DomainError("--eps-grid expects lo:hi:points, got '" + spec + "'");
  }
  return expt::log_spaced_grid(lo, hi, points);
}

std::vector<bnd::BoundFamily> parse_families(const std::string& csv) {
  if (csv.empty() || csv == "all") return bnd::all_families();
  std::vector<bnd::BoundFamily> out;
  std::istringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    auto family = bnd::family_from_string(token);
    if (!family) throw genbound::DomainError("unknown bound family: " + token);
    out.push_back(*family);
  }
  if (out.empty()) throw genbound::DomainError("no bound families given");
  return out;
}

// With --eps-inf-fallback, saturated privacy-dependent reports are replaced by
// their epsilon-free ceilings.
bnd::BoundReport apply_inf_fallback(const bnd::BoundReport& report, const bnd::BoundQuery& q) {
  if (!std::isinf(report.value)) return report;
  bnd::BoundQuery free_q = q;
  free_q.epsilon = {0.0, 0.0};
  switch (report.family) {
    case bnd::BoundFamily::thm1:
    case bnd::BoundFamily::thm2:
    case bnd::BoundFamily::thm3: {
      auto fallback = bnd::bound_eq8(free_q);
      return bnd::BoundReport{report.family, fallback.value, std::nullopt,
                              {{"fallback_type_count_poly", fallback.value}}};
    }
    case bnd::BoundFamily::thm5: {
      auto fallback = bnd::bound_thm4(free_q);
      return bnd::BoundReport{report.family, fallback.value, std::nullopt,
                              {{"fallback_type_count_poly", fallback.value}}};
    }
    default:
      return report;
  }
}

nlohmann::ordered_json report_json(const bnd::BoundReport& report) {
  nlohmann::ordered_json j;
  j["family"] = bnd::to_string(report.family);
  j["value_nats"] = value_json(report.value);
  if (report.argmin_t.has_value()) j["argmin_t"] = *report.argmin_t;
  auto terms = nlohmann::ordered_json::object();
  for (const auto& term : report.terms) terms[term.name] = value_json(term.value);
  j["terms"] = terms;
  return j;
}

struct BoundOptions {
  int64_t n = 0;
  int64_t m = 0;
  double eps = 0.0;
  double sigma = 0.5;
  std::string family = "all";
  std::string format = "human";
  std::string out;
  std::optional<int64_t> w_size;
  bool bits = false;
  bool inf_fallback = false;
};

int cmd_bound(const BoundOptions& opt) {
  bnd::BoundQuery q{opt.n, opt.m, {opt.eps, 0.0}, opt.sigma};
  std::vector<bnd::BoundReport> reports;
  if (opt.family == "all") {
    for (auto family : bnd::all_families()) {
      try {
        reports.push_back(bnd::evaluate_bound(family, q, opt.w_size));
      } catch (const genbound::DomainError& e) {
        std::cerr << "note: " << bnd::to_string(family) << " skipped: " << e.what() << "\n";
      }
    }
    if (reports.empty()) throw genbound::DomainError("no bound family applies to this query");
  } else {
    auto family = bnd::family_from_string(opt.family);
    if (!family) throw genbound::DomainError("unknown bound family: " + opt.family);
    reports.push_back(bnd::evaluate_bound(*family, q, opt.w_size));
  }
  if (opt.inf_fallback)
    for (auto& report : reports) report = apply_inf_fallback(report, q);

  std::ostringstream os;
  if (opt.format == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& report : reports) arr.push_back(report_json(report));
    os << arr.dump(2) << '\n';
  } else if (opt.format == "csv") {
    std::vector<expt::SweepCell> cells;
    for (const auto& report : reports)
      cells.push_back(expt::SweepCell{opt.eps, report.family, report.value, report.argmin_t});
    expt::write_sweep_csv(os, cells);
  } else if (opt.format == "human") {
    const char* unit = opt.bits ? "bits" : "nats";
    for (const auto& report : reports) {
      os << bnd::to_string(report.family) << ": " << format_value(report.value, opt.bits) << ' '
         << unit;
      if (report.argmin_t.has_value()) os << " (argmin t=" << *report.argmin_t << ")";
      os << '\n';
      for (const auto& term : report.terms)
        os << "  " << term.name << " = " << format_value(term.value, opt.bits) << '\n';
    }
  } else {
    throw genbound::DomainError("unknown format: " + opt.format);
  }
  write_text(opt.out, os.str());
  return 0;
}

struct SweepOptions {
  std::string preset;
  int64_t n = 0;
  int64_t m = 0;
  std::string eps_grid = "0.001:1:50";
  std::string families = "all";
  double sigma = 0.5;
  std::string out;
  int jobs = 0;
};

int cmd_sweep(const SweepOptions& opt) {
  expt::SweepRequest req;
  if (opt.preset == "fig1") {
    req = expt::fig1_preset();
  } else if (opt.preset == "fig2") {
    req = expt::fig2_preset();
  } else if (opt.preset.empty()) {
    if (opt.n < 1 || opt.m < 2)
      throw genbound::DomainError("sweep needs --preset or explicit --n and --m");
    req.n = opt.n;
    req.m = opt.m;
  } else {
    throw genbound::DomainError("unknown preset: " + opt.preset + " (expected fig1|fig2)");
  }
  req.eps_grid = parse_eps_grid(opt.eps_grid);
  req.families = parse_families(opt.families);
  req.sigma = opt.sigma;
  req.jobs = resolve_jobs(opt.jobs);

  auto cells = expt::sweep_figure(req);
  std::ostringstream os;
  expt::write_sweep_csv(os, cells);
  write_text(opt.out, os.str());
  return 0;
}

struct AuditOptions {
  std::string mechanism_path;
  std::string prior = "uniform";
  std::string format = "human";
  std::string out;
  bool bits = false;
  bool inf_fallback = false;
};

int cmd_audit(const AuditOptions& opt) {
  auto mech = mechs::load_mechanism(opt.mechanism_path);
  auto prior = load_prior(opt.prior, mech.m);
  double eps = mechs::audit_epsilon(mech).epsilon;
  double mi = mechs::exact_mutual_information(mech, prior);
  double ml = mechs::exact_max_leakage(mech, mechs::support_mask_from_prior(mech, prior));

  bnd::BoundQuery q{mech.n, mech.m, {eps, 0.0}, 0.5};
  struct Entry {
    bnd::BoundReport report;
    double oracle;
  };
  std::vector<Entry> entries;
  for (auto family : bnd::all_families()) {
    bool ml_family = family == bnd::BoundFamily::thm4 || family == bnd::BoundFamily::thm4_sharp ||
                     family == bnd::BoundFamily::thm5 || family == bnd::BoundFamily::ml_baseline;
    try {
      std::optional<int64_t> w_size;
      if (family == bnd::BoundFamily::ml_baseline)
        w_size = static_cast<int64_t>(mech.num_outputs());
      auto report = bnd::evaluate_bound(family, q, w_size);
      if (opt.inf_fallback) report = apply_inf_fallback(report, q);
      entries.push_back(Entry{report, ml_family ? ml : mi});
    } catch (const genbound::DomainError&) {
      // family not applicable at the audited epsilon
    }
  }

  std::ostringstream os;
  if (opt.format == "json") {
    nlohmann::ordered_json j;
    j["n"] = mech.n;
    j["m"] = mech.m;
    j["hypotheses"] = mech.num_outputs();
    j["audited_epsilon_nats"] = value_json(eps);
    j["exact_mi_nats"] = mi;
    j["exact_ml_nats"] = ml;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& entry : entries) {
      auto ej = report_json(entry.report);
      ej["oracle_nats"] = entry.oracle;
      ej["slack_nats"] = value_json(entry.report.value - entry.oracle);
      arr.push_back(ej);
    }
    j["bounds"] = arr;
    os << j.dump(2) << '\n';
  } else if (opt.format == "human") {
    os << "audited_epsilon = " << format_value(eps, opt.bits) << '\n';
    os << "exact_mi = " << format_value(mi, opt.bits) << '\n';
    os << "exact_ml = " << format_value(ml, opt.bits) << '\n';
    for (const auto& entry : entries) {
      os << "bound " << bnd::to_string(entry.report.family) << " = "
         << format_value(entry.report.value, opt.bits)
         << " (slack " << format_value(entry.report.value - entry.oracle, opt.bits) << ")";
      if (entry.report.argmin_t.has_value()) os << " t=" << *entry.report.argmin_t;
      os << '\n';
    }
  } else {
    throw genbound::DomainError("unknown format: " + opt.format);
  }
  write_text(opt.out, os.str());
  return 0;
}

struct GridOptions {
  int64_t n = 0;
  int64_t m = 0;
  int64_t t = 1;
  std::string variant = "full_cube";
  std::string prior = "uniform";
  double eta = -1.0;
  std::string out;
};

int cmd_grid(const GridOptions& opt) {
  auto variant = rep::variant_from_string(opt.variant);
  if (!variant)
    throw genbound::DomainError("unknown variant: " + opt.variant +
                                " (expected full_cube|simplex|typical)");
  std::optional<ts::SourceDistribution> prior;
  if (*variant == rep::GridVariant::typical) prior = load_prior(opt.prior, opt.m);
  std::optional<double> eta;
  if (opt.eta >= 0.0) eta = opt.eta;
  auto grid = rep::build_grid(opt.n, opt.m, opt.t, *variant, prior, eta);
  write_text(opt.out, rep::grid_to_json(grid) + "\n");
  return 0;
}

struct VerifyOptions {
  bool quick = false;
  bool full = false;
  uint64_t seed = 0;
  std::string out;
};

int cmd_verify(const VerifyOptions& opt) {
  expt::BatteryOptions options{opt.full, opt.seed};
  auto report = expt::run_verification_battery(options);
  expt::write_battery_table(std::cerr, report);
  write_text(opt.out, expt::battery_to_json(report) + "\n");
  return failure_exit_code(report.failures());
}

struct GenExpOptions {
  int64_t n = 0;
  int64_t m = 0;
  std::string family = "rr";
  double param = 0.5;
  int64_t trials = 10000;
  uint64_t seed = 0;
  double eta = 0.3;
  std::string prior = "uniform";
  std::string out;
};

int cmd_gen_exp(const GenExpOptions& opt) {
  expt::ExperimentConfig cfg;
  cfg.n = opt.n;
  cfg.m = opt.m;
  cfg.mechanism = {opt.family, opt.param};
  cfg.prior = load_prior(opt.prior, opt.m);
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  cfg.eta = opt.eta;
  auto report = expt::run_monte_carlo(cfg);
  write_text(opt.out, expt::report_to_json(report) + "\n");
  return failure_exit_code(report.failures());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalization-error bound calculator for private learning algorithms"};
  app.require_subcommand(1);

  BoundOptions bound_opt;
  auto* bound = app.add_subcommand("bound", "evaluate closed-form bounds at one query point");
  bound->add_option("--n", bound_opt.n, "dataset size")->required();
  bound->add_option("--m", bound_opt.m, "alphabet size")->required();
  bound->add_option("--eps", bound_opt.eps, "privacy budget in nats (inf allowed)");
  bound->add_option("--sigma", bound_opt.sigma, "sub-Gaussian constant of the loss");
  bound->add_option("--family", bound_opt.family, "bound family name or 'all'");
  bound->add_option("--format", bound_opt.format, "human|json|csv");
  bound->add_option("--out", bound_opt.out, "output path (default: stdout)");
  bound->add_option("--w-size", bound_opt.w_size, "hypothesis count for ml_baseline");
  bound->add_flag("--bits", bound_opt.bits, "report human-readable values in bits");
  bound->add_flag("--eps-inf-fallback", bound_opt.inf_fallback,
                  "replace saturated bounds by their eps-free ceilings");

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "bound values over an epsilon grid, as CSV");
  sweep->add_option("--preset", sweep_opt.preset, "fig1 (n=1e3, m=2) or fig2 (n=1e7, m=1e6)");
  sweep->add_option("--n", sweep_opt.n, "dataset size (without --preset)");
  sweep->add_option("--m", sweep_opt.m, "alphabet size (without --preset)");
  sweep->add_option("--eps-grid", sweep_opt.eps_grid, "lo:hi:points, log-spaced");
  sweep->add_option("--families", sweep_opt.families, "comma-separated families or 'all'");
  sweep->add_option("--sigma", sweep_opt.sigma, "sub-Gaussian constant of the loss");
  sweep->add_option("--out", sweep_opt.out, "output CSV path (default: stdout)");
  sweep->add_option("--jobs", sweep_opt.jobs, "worker threads (default: GENBOUND_JOBS or cores)");

  AuditOptions audit_opt;
  auto* audit = app.add_subcommand("audit", "audit a mechanism file and compare oracles to bounds");
  audit->add_option("--mechanism", audit_opt.mechanism_path, "mechanism JSON file")->required();
  audit->add_option("--prior", audit_opt.prior, "'uniform' or a JSON array file");
  audit->add_option("--format", audit_opt.format, "human|json");
  audit->add_option("--out", audit_opt.out, "output path (default: stdout)");
  audit->add_flag("--bits", audit_opt.bits, "report human-readable values in bits");
  audit->add_flag("--eps-inf-fallback", audit_opt.inf_fallback,
                  "replace saturated bounds by their eps-free ceilings");

  GridOptions grid_opt;
  auto* grid = app.add_subcommand("grid", "inspect a representative-set construction as JSON");
  grid->add_option("--n", grid_opt.n, "dataset size")->required();
  grid->add_option("--m", grid_opt.m, "alphabet size")->required();
  grid->add_option("--t", grid_opt.t, "splits per dimension")->required();
  grid->add_option("--variant", grid_opt.variant, "full_cube|simplex|typical");
  grid->add_option("--prior", grid_opt.prior, "'uniform' or a JSON array file (typical only)");
  grid->add_option("--eta", grid_opt.eta, "typicality width override (typical only)");
  grid->add_option("--out", grid_opt.out, "output path (default: stdout)");

  VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "run the cross-module verification battery");
  auto* quick_flag = verify->add_flag("--quick", verify_opt.quick, "reduced ranges, < 10 s");
  verify->add_flag("--full", verify_opt.full, "acceptance ranges")->excludes(quick_flag);
  verify->add_option("--seed", verify_opt.seed, "seed for randomized checks");
  verify->add_option("--out", verify_opt.out, "report JSON path (default: stdout)");

  GenExpOptions gen_opt;
  auto* gen = app.add_subcommand("gen-exp", "Monte Carlo generalization experiment");
  gen->add_option("--n", gen_opt.n, "dataset size")->required();
  gen->add_option("--m", gen_opt.m, "alphabet size")->required();
  gen->add_option("--mechanism-family", gen_opt.family, "constant|rr|identity|expmech");
  gen->add_option("--param", gen_opt.param, "stay probability (rr) or target eps (expmech)");
  gen->add_option("--trials", gen_opt.trials, "Monte Carlo trials")
      ->check(CLI::Range(int64_t{1}, std::numeric_limits<int64_t>::max()));
  gen->add_option("--seed", gen_opt.seed, "RNG seed");
  gen->add_option("--eta", gen_opt.eta, "tail threshold in (0,1)");
  gen->add_option("--prior", gen_opt.prior, "'uniform' or a JSON array file");
  gen->add_option("--out", gen_opt.out, "report JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
    if (*bound) return cmd_bound(bound_opt);
    if (*sweep) return cmd_sweep(sweep_opt);
    if (*audit) return cmd_audit(audit_opt);
    if (*grid) return cmd_grid(grid_opt);
    if (*verify) return cmd_verify(verify_opt);
    if (*gen) return cmd_gen_exp(gen_opt);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const genbound::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const genbound::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
