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

#include "okl/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "okl/budget.hpp"
#include "okl/errors.hpp"
#include "okl/optimism.hpp"

namespace okl {

BoundReport BoundReport::make(double empirical, double bound) {
  return BoundReport{empirical, bound, empirical <= bound + 1e-9, bound - empirical};
}

RunReport run_stream(OnlineLearner& learner, const Dataset& ds, const RunOptions& options) {
  RunReport rep;
  rep.algo = learner.name();
  rep.dataset = ds.name;
  rep.T = ds.size();
  std::size_t last_size = learner.support_size();
  rep.budget_trace.emplace_back(0, last_size);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& e = ds.examples[i];
    learner.step(e.x, e.label);
    const std::size_t size = learner.support_size();
    rep.max_support = std::max(rep.max_support, size);
    if (size != last_size) {
      rep.budget_trace.emplace_back(i + 1, size);
      last_size = size;
    }
    if (options.norm_check_every > 0 &&
        ((i + 1) % options.norm_check_every == 0 || i + 1 == ds.size())) {
      if (auto norm = learner.dense_norm()) {
        rep.max_sampled_norm = std::max(rep.max_sampled_norm, *norm);
        ++rep.norm_checks;
      }
    }
  }
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.mistakes = learner.mistakes();
  rep.cumulative_loss = learner.cumulative_loss();
  rep.amr = rep.T ? static_cast<double>(rep.mistakes) / static_cast<double>(rep.T) : 0.0;
  if (const auto* p = dynamic_cast<const PomdrLearner*>(&learner)) {
    rep.t_bar = p->t_bar();
    rep.restart_times = p->restart_times();
    rep.delta_sum = p->total_delta();
  }
  return rep;
}

double kernel_alignment(std::span<const Instance> xs, std::span<const int> ys, const Kernel& k,
                        std::size_t chunk, std::size_t threads) {
  if (xs.size() != ys.size()) throw std::invalid_argument("alignment: label count mismatch");
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (chunk == 0) chunk = 1024;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t blocks = (n + chunk - 1) / chunk;
  // Per-block partial sums of y_i y_j K_ij over j <= i, doubled off the diagonal.
  std::vector<long double> partial(blocks, 0.0L);
  std::vector<long double> diag(blocks, 0.0L);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      long double quad = 0.0L;
      long double trace = 0.0L;
      const std::size_t end = std::min(n, (b + 1) * chunk);
      for (std::size_t i = b * chunk; i < end; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < i; ++j) row += ys[j] * k(xs[j], xs[i]);
        const double self = k.diagonal(xs[i]);
        quad += 2.0L * ys[i] * row + self;
        trace += self;
      }
      partial[b] = quad;
      diag[b] = trace;
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, blocks); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  long double quad = 0.0L;
  long double trace = 0.0L;
  for (std::size_t b = 0; b < blocks; ++b) {
    quad += partial[b];
    trace += diag[b];
  }
  return static_cast<double>(trace - quad / static_cast<long double>(n));
}

double kernel_alignment(const Dataset& ds, const Kernel& k, std::size_t chunk,
                        std::size_t threads) {
  const auto xs = ds.instances();
  const auto ys = ds.labels();
  return kernel_alignment(xs, ys, k, chunk, threads);
}

DeltaSumReport delta_sum_check(std::span<const Instance> xs, std::span<const int> ys,
                          const Kernel& k, std::size_t M, std::size_t threads) {
  if (xs.size() != ys.size()) throw std::invalid_argument("delta_sum_check: label count mismatch");
  OptimismWindow window(M);
  double sum = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    sum += delta_exact(window, k, xs[t], ys[t]).delta;
    window.push(xs[t], ys[t]);
  }
  DeltaSumReport out;
  out.alignment = kernel_alignment(xs, ys, k, 1024, threads);
  out.report = BoundReport::make(sum, 4.0 * out.alignment + 7.0 * k.upper_bound());
  return out;
}

double budget_size_bound(const SpectrumProfile& profile, double alpha, double A, double D) {
  if (!(alpha > 0.0)) throw std::invalid_argument("budget bound: alpha must be positive");
  if (profile.decay == Decay::exponential)
    return 2.0 * std::log(profile.R0 / alpha) / std::log(1.0 / profile.rate) + 2.0;
  return std::numbers::e * std::pow((D / A) * profile.R0 / alpha, 1.0 / profile.rate) + 1.0;
}

std::size_t ald_budget_size(const Kernel& k, double threshold, std::size_t* degenerate) {
  const auto* m = k.matrix();
  if (m == nullptr) throw std::invalid_argument("ald_budget_size: needs a precomputed kernel");
  const auto n = static_cast<std::size_t>(m->rows());
  BudgetSet budget(BudgetMode::tracked, n);
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = Instance::index(i);
    const AldResult ald = budget.ald_check(k, x, threshold);
    if (ald.holds) continue;
    try {
      budget.insert_tracked(k, x, 1, i + 1, ald);
    } catch (const DegenerateInsertion&) {
      ++skipped;
    }
  }
  if (degenerate) *degenerate = skipped;
  return budget.size();
}

namespace {

BudgetBoundReport harness_on(const SpectrumProfile& profile, std::size_t n, const Kernel& k,
                          double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("budget bound: alpha must be positive");
  BudgetBoundReport out;
  out.profile = profile;
  out.n = n;
  out.alpha = alpha;
  out.A = k.lower_bound();
  out.D = k.upper_bound();
  out.budget_size = ald_budget_size(k, std::sqrt(alpha), &out.degenerate_skips);
  out.report = BoundReport::make(static_cast<double>(out.budget_size),
                                 budget_size_bound(profile, alpha, out.A, out.D));
  return out;
}

}  // namespace

BudgetBoundReport budget_bound_harness(const SpectrumProfile& profile, std::size_t n, double alpha,
                                std::uint64_t seed) {
  profile.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("budget bound: alpha must be positive");
  return harness_on(profile, n, Kernel::precomputed(synthesize_psd(profile, n, seed)), alpha);
}

BudgetBoundReport budget_bound_harness_relative(const SpectrumProfile& profile, std::size_t n,
                                         double alpha_over_D, std::uint64_t seed) {
  profile.validate();
  const Kernel k = Kernel::precomputed(synthesize_psd(profile, n, seed));
  return harness_on(profile, n, k, alpha_over_D * k.upper_bound());
}

RegretBounds regret_bound_values(const RunReport& report, const PomdrConfig& cfg,
                                 double alignment, double D) {
  RegretBounds out;
  const double U = cfg.U;
  out.pomd_bound = 6.0 * U * std::sqrt(alignment + 2.0 * D) + 9.0 * U;
  out.omdr_bound = out.pomd_bound + 6.0 * U *
                                        std::sqrt(2.0 * static_cast<double>(report.T) *
                                                  (alignment + 2.0 * D)) /
                                        std::sqrt(static_cast<double>(cfg.B));
  out.omdr_applies = report.t_bar.has_value();
  const double regret_vs_zero = report.cumulative_loss - static_cast<double>(report.T);
  out.report =
      BoundReport::make(regret_vs_zero, out.omdr_applies ? out.omdr_bound : out.pomd_bound);
  return out;
}

BatchResult online_to_batch(const PomdrConfig& cfg, const Kernel& k, const Dataset& train,
                            const Dataset& test, std::uint64_t r_seed,
                            std::optional<std::size_t> r_override) {
  if (train.empty() || test.empty()) throw DataError("online-to-batch: empty train or test set");
  PomdrConfig run_cfg = cfg;
  run_cfg.T = train.size();
  BatchResult out;
  if (r_override) {
    if (*r_override < 1 || *r_override > train.size())
      throw ConfigError("online-to-batch: r must lie in [1, T]");
    out.r = *r_override;
  } else {
    std::mt19937_64 rng(r_seed);
    out.r = static_cast<std::size_t>(uniform_below(train.size(), rng)) + 1;
  }

  PomdrLearner learner(run_cfg, k);
  std::optional<FrozenHypothesis> chosen;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (i + 1 == out.r) chosen.emplace(learner.snapshot());
    learner.step(train.examples[i].x, train.examples[i].label);
  }
  out.online_amr = static_cast<double>(learner.mistakes()) / static_cast<double>(train.size());

  double hinge_sum = 0.0;
  std::size_t errors = 0;
  for (const auto& e : test.examples) {
    const double v = chosen->value(e.x);
    hinge_sum += hinge(v, e.label);
    if (sign_of(v) != e.label) ++errors;
  }
  out.test_hinge_risk = hinge_sum / static_cast<double>(test.size());
  out.test_error_rate = static_cast<double>(errors) / static_cast<double>(test.size());
  return out;
}

std::pair<double, double> mean_and_stddev(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

}  // namespace okl
