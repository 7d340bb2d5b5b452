// Copyright 2026 The okl-hinge Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "okl/data.hpp"
#include "okl/kernel.hpp"
#include "okl/learner.hpp"
#include "okl/pomdr.hpp"

namespace okl {

struct BoundReport {
  double empirical_value = 0.0;
  double bound_value = 0.0;
  bool satisfied = false;  // empirical <= bound + 1e-9
  double slack = 0.0;      // bound - empirical

  static BoundReport make(double empirical, double bound);
};

struct RunReport {
  std::string algo;
  std::string dataset;
  std::size_t T = 0;
  std::size_t mistakes = 0;
  double amr = 0.0;
  double cumulative_loss = 0.0;
  std::optional<double> alignment;
  double delta_sum = 0.0;  // clipped deltas accumulated by the learner
  std::vector<std::pair<std::size_t, std::size_t>> budget_trace;  // (round, size) at changes
  std::optional<std::size_t> t_bar;
  std::vector<std::size_t> restart_times;
  double wall_time_seconds = 0.0;
  // Invariant monitoring.
  std::size_t max_support = 0;
  double max_sampled_norm = 0.0;
  std::size_t norm_checks = 0;
};

struct RunOptions {
  // Dense ||f'|| recheck every this many rounds (0 disables); the last round
  // is always checked when enabled.
  std::size_t norm_check_every = 0;
};

// Feeds the whole dataset through the learner in order.
RunReport run_stream(OnlineLearner& learner, const Dataset& ds, const RunOptions& options = {});

// A_T = sum_t kappa(x_t, x_t) - (1/T) Y^T K Y, computed in row blocks without
// materializing K. `threads` = 0 uses the hardware concurrency.
double kernel_alignment(std::span<const Instance> xs, std::span<const int> ys, const Kernel& k,
                        std::size_t chunk = 1024, std::size_t threads = 1);
double kernel_alignment(const Dataset& ds, const Kernel& k, std::size_t chunk = 1024,
                        std::size_t threads = 1);

// sum_t max(||grad_t - grad_bar_t||^2 - ||grad_bar_t||^2, 0) with the exact
// gradient on every round, against 4 A_T + 7 D.
struct DeltaSumReport {
  BoundReport report;
  double alignment = 0.0;
};
DeltaSumReport delta_sum_check(std::span<const Instance> xs, std::span<const int> ys,
                          const Kernel& k, std::size_t M, std::size_t threads = 1);

// Final ALD budget size on a synthetic Gram matrix with a prescribed spectrum
// against the closed-form bound (C1 = 1, C2 = D/A).
struct BudgetBoundReport {
  BoundReport report;
  SpectrumProfile profile;
  std::size_t n = 0;
  double alpha = 0.0;
  double A = 0.0;
  double D = 0.0;
  std::size_t budget_size = 0;
  std::size_t degenerate_skips = 0;
};
double budget_size_bound(const SpectrumProfile& profile, double alpha, double A, double D);
BudgetBoundReport budget_bound_harness(const SpectrumProfile& profile, std::size_t n, double alpha,
                                std::uint64_t seed);
// Same with alpha = alpha_over_D * D, D read off the synthesized matrix.
BudgetBoundReport budget_bound_harness_relative(const SpectrumProfile& profile, std::size_t n,
                                         double alpha_over_D, std::uint64_t seed);
// Runs the ALD-gated insertion rule over all rows of a precomputed kernel.
std::size_t ald_budget_size(const Kernel& k, double threshold, std::size_t* degenerate = nullptr);

// Closed-form regret bounds for a finished POMDR run. The empirical side is the
// regret against the zero hypothesis (cumulative loss minus T), which lies in
// the U-ball, so the bound must dominate it.
struct RegretBounds {
  double pomd_bound = 0.0;
  double omdr_bound = 0.0;
  bool omdr_applies = false;
  BoundReport report;
};
RegretBounds regret_bound_values(const RunReport& report, const PomdrConfig& cfg,
                                 double alignment, double D);

struct BatchResult {
  std::size_t r = 0;
  double test_hinge_risk = 0.0;
  double test_error_rate = 0.0;
  double online_amr = 0.0;
};
// Draws r uniformly from {1..T} (or uses `r_override`), runs POMDR over the
// training stream, and evaluates f_r on the test set.
BatchResult online_to_batch(const PomdrConfig& cfg, const Kernel& k, const Dataset& train,
                            const Dataset& test, std::uint64_t r_seed,
                            std::optional<std::size_t> r_override = std::nullopt);

// Sample mean and (n-1) standard deviation; 0 deviation for a single value.
std::pair<double, double> mean_and_stddev(std::span<const double> values);

}  // namespace okl
