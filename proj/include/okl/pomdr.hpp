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
#include <vector>

#include <Eigen/Dense>

#include "okl/budget.hpp"
#include "okl/hypothesis.hpp"
#include "okl/kernel.hpp"
#include "okl/learner.hpp"
#include "okl/optimism.hpp"

namespace okl {

struct PomdrConfig {
  double U = 25.0;
  double zeta = 2.0 / 3.0;
  std::size_t B = 400;
  std::optional<std::size_t> B0;  // empty: ceil(15 ln T)
  std::size_t M = 15;
  double lr_scale = 0.1;          // c, multiplies the whole learning rate
  double ald_scale = 10.0;        // ALD threshold = ald_scale * T^-zeta
  std::size_t T = 0;
  std::uint64_t seed = 0;
  bool check_inverse = false;     // verify and rebuild K_S^{-1} after insertions

  // Throws ConfigError.
  void validate() const;
  std::size_t resolved_B0() const;
  double ald_threshold() const;
};

// ceil(15 ln T), at least 1.
std::size_t auto_b0(std::size_t T);

enum class Phase { pomd, omdr };

/// Immutable copy of f_{t+1} = f'_t - lambda_{t+1} grad_bar_{t+1}, taken after
/// t completed rounds.
class FrozenHypothesis {
 public:
  FrozenHypothesis(Kernel kernel, std::vector<Instance> members, Eigen::VectorXd coefficients,
                   std::vector<Instance> window_points, std::vector<int> window_labels,
                   double lambda);

  double value(const Instance& x) const;
  int predict(const Instance& x) const { return sign_of(value(x)); }
  double learning_rate() const { return lambda_; }
  std::size_t support_size() const { return members_.size(); }

 private:
  Kernel kernel_;
  std::vector<Instance> members_;
  Eigen::VectorXd coefficients_;
  std::vector<Instance> window_points_;
  std::vector<int> window_labels_;
  double lambda_;
};

/// Budgeted optimistic mirror descent for the hinge loss.
///
/// Starts in the POMD phase: the budget grows only when the new kernel
/// feature is not approximately linearly dependent on the budget, otherwise the
/// gradient is replaced by its projection onto the budget span. Once the
/// budget reaches B0 the learner switches permanently to OMDR: every
/// loss-incurring example is stored, and when the budget hits B the newest
/// half is folded into the oldest half and the learning rate restarts.
class PomdrLearner final : public OnlineLearner {
 public:
  PomdrLearner(PomdrConfig cfg, Kernel kernel);

  std::string name() const override { return "pomdr"; }
  RoundOutcome step(const Instance& x, int y) override;
  std::size_t support_size() const override { return budget_.size(); }
  std::optional<double> dense_norm() const override;

  FrozenHypothesis snapshot() const;

  const PomdrConfig& config() const { return cfg_; }
  const Kernel& kernel() const { return kernel_; }
  Phase phase() const { return phase_; }
  const BudgetSet& budget() const { return budget_; }
  const KernelExpansion& hypothesis() const { return f_prime_; }
  const OptimismWindow& window() const { return window_; }
  double delta_sum() const { return delta_sum_; }
  double epsilon() const { return epsilon_; }
  double total_delta() const { return total_delta_; }
  std::size_t t() const { return t_; }
  std::optional<std::size_t> t_bar() const { return t_bar_; }
  const std::vector<std::size_t>& restart_times() const { return restart_times_; }
  std::size_t b0() const { return b0_; }
  // lambda for the next round.
  double learning_rate() const;

 private:
  PomdrConfig cfg_;
  Kernel kernel_;
  std::size_t b0_;
  double threshold_;
  Phase phase_ = Phase::pomd;
  BudgetSet budget_;
  KernelExpansion f_prime_;
  OptimismWindow window_;
  double delta_sum_ = 0.0;
  double epsilon_ = 3.0;
  double total_delta_ = 0.0;
  std::size_t t_ = 0;
  std::optional<std::size_t> t_bar_;
  std::vector<std::size_t> restart_times_;
};

}  // namespace okl
