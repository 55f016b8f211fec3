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
#ifndef GENBOUND_EXPERIMENTS_HPP_
#define GENBOUND_EXPERIMENTS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "genbound/bounds.hpp"
#include "genbound/mechanisms.hpp"
#include "genbound/typespace.hpp"

namespace genbound::experiments {

// Battery mechanism families: "constant", "rr", "identity", "expmech".
struct MechanismSpec {
  std::string family;
  double param = 0.0;  // stay probability for rr, target eps for expmech
};

mechanisms::MechanismTable build_battery_mechanism(const MechanismSpec& spec, int64_t n,
                                                   int64_t m,
                                                   int64_t cap = typespace::kDefaultEnumerationCap);

struct ExperimentConfig {
  int64_t n = 0;
  int64_t m = 0;
  MechanismSpec mechanism;
  typespace::SourceDistribution prior;
  int64_t trials = 1;
  uint64_t seed = 0;
  double eta = 0.3;
  int64_t cap = typespace::kDefaultEnumerationCap;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  bool asserted = true;   // informational checks never fail a run
  double worst_slack = 0; // min over instances of rhs - lhs
  int64_t instances = 0;
  std::string detail;     // context of the worst instance
};

struct GenerationReport {
  ExperimentConfig config;
  double audited_epsilon = 0.0;
  double exact_mi = 0.0;
  double exact_ml = 0.0;
  double mean_gen = 0.0;
  double mean_abs_gen = 0.0;
  double std_err_mean = 0.0;
  double std_err_abs = 0.0;
  double tail_freq = 0.0;
  double tail_std_err = 0.0;
  double avg_bound = 0.0;        // on |E gen|, from the exact mutual information
  double tail_bound_raw = 0.0;   // unclamped, from the exact maximal leakage
  double tail_bound = 0.0;       // clamped to 1
  std::vector<std::pair<std::string, double>> info_bounds;  // per-family values at audited eps
  std::vector<CheckResult> checks;

  int64_t failures() const;
};

// Samples datasets from the prior, pushes them through the mechanism, and
// compares the observed generalization error against the exact-oracle bounds.
// The released hypothesis is a type; the loss is 1 - w(z), so sigma = 1/2.
GenerationReport run_monte_carlo(const ExperimentConfig& cfg);

std::string report_to_json(const GenerationReport& report, int indent = 2);

struct BatteryOptions {
  bool full = false;  // quick ranges otherwise
  uint64_t seed = 0;
};

struct BatteryReport {
  BatteryOptions options;
  std::vector<CheckResult> checks;

  int64_t failures() const;
};

// Cross-module invariant sweep: counting bounds, metric laws, oracle
// dominance, mixture-bound ordering, covering radii, Monte Carlo checks.
BatteryReport run_verification_battery(const BatteryOptions& options);

std::string battery_to_json(const BatteryReport& report, int indent = 2);
void write_battery_table(std::ostream& os, const BatteryReport& report);

struct SweepRequest {
  int64_t n = 0;
  int64_t m = 0;
  std::vector<double> eps_grid;
  std::vector<bounds::BoundFamily> families;
  double sigma = 0.5;
  int jobs = 1;
};

struct SweepCell {
  double epsilon = 0.0;
  bounds::BoundFamily family = bounds::BoundFamily::eq8;
  std::optional<double> value;      // empty on a per-cell domain error
  std::optional<int64_t> argmin_t;
};

// One row per (epsilon, family), epsilon-major, deterministic regardless of
// the job count.
std::vector<SweepCell> sweep_figure(const SweepRequest& req);

// Header exactly: epsilon,family,value_nats,argmin_t
void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

std::vector<double> log_spaced_grid(double lo, double hi, int points);

SweepRequest fig1_preset();  // n = 10^3, m = 2
SweepRequest fig2_preset();  // n = 10^7, m = 10^6

}  // namespace genbound::experiments

#endif  // GENBOUND_EXPERIMENTS_HPP_
