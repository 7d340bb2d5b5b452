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

#include <Eigen/Dense>

#include "okl/budget.hpp"
#include "okl/kernel.hpp"

namespace okl {

// f = sum_i a_i kappa(x_i, .) over the members of a BudgetSet, with its
// squared RKHS norm tracked incrementally.
struct KernelExpansion {
  Eigen::VectorXd coefficients;
  double squared_norm = 0.0;
  double radius = 1.0;  // U

  KernelExpansion() = default;
  explicit KernelExpansion(double radius_u) : radius(radius_u) {}

  double norm() const;
};

double evaluate_at(const KernelExpansion& f, const BudgetSet& b, const Kernel& k,
                   const Instance& x);
// Same value from a precomputed column k_S(x).
double evaluate_with_column(const KernelExpansion& f, const Eigen::VectorXd& column);

// a^T K_S a, recomputed from scratch.
double dense_squared_norm(const KernelExpansion& f, const BudgetSet& b, const Kernel& k);

// Exact-gradient step f <- Pi_U(f + lambda y kappa(x, .)). The caller has
// already appended x to the budget, so the coefficient vector grows by one.
void step_exact(KernelExpansion& f, const BudgetSet& b, const Kernel& k, const Instance& x,
                int y, double lambda);
// `previous_value` is f(x) before the step.
void step_exact(KernelExpansion& f, const BudgetSet& b, double self_similarity,
                double previous_value, int y, double lambda);

// Approximate-gradient step f <- Pi_U(f + lambda y Phi_S beta).
void step_approx(KernelExpansion& f, const BudgetSet& b, const Kernel& k, int y,
                 double lambda, const Eigen::VectorXd& beta);
// `beta_gram_beta` = beta^T K_S beta and `projected_value` = sum_i beta_i f(x_i).
// When beta = K_S^{-1} k_S(x) these equal beta^T k_S(x) and f(x).
void step_approx(KernelExpansion& f, int y, double lambda, const Eigen::VectorXd& beta,
                 double beta_gram_beta, double projected_value);

// Scales f onto the ball of radius U when its norm exceeds U.
void project_to_ball(KernelExpansion& f);

struct HalvingResult {
  std::size_t removed = 0;
  double norm_before_rescale = 0.0;
};

// Drops the newest half of a full plain budget, moves each dropped
// coefficient onto the most similar kept member (ties to the smaller index),
// then rescales the expansion to norm exactly U unless it vanished.
HalvingResult halve_and_redistribute(KernelExpansion& f, BudgetSet& b, const Kernel& k);

}  // namespace okl
