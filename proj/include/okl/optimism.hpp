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
#include <deque>

#include <Eigen/Dense>

#include "okl/budget.hpp"
#include "okl/kernel.hpp"

namespace okl {

struct WindowEntry {
  Instance x;
  int label = 1;
  // kappa(x, s_i) for the current budget members s_i; maintained by the
  // learner while it runs ALD checks, empty otherwise.
  Eigen::VectorXd budget_column;
};

/// Last min(M, t-1) received examples. The optimistic gradient guess is
///   grad_bar_t = -(1/M_t) sum_r y_{t-r} kappa(x_{t-r}, .),  M_t = |window|,
/// and grad_bar_1 = 0.
class OptimismWindow {
 public:
  explicit OptimismWindow(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<WindowEntry>& entries() const { return entries_; }

  void push(Instance x, int label, Eigen::VectorXd budget_column = {});

  // kappa(x_r, x) for every entry, oldest first.
  Eigen::VectorXd kernel_values(const Kernel& k, const Instance& x) const;
  // (1/M_t) sum_r y_r values_r; 0 for an empty window.
  double weighted_mean(const Eigen::VectorXd& values) const;

  // Appends one budget member's kernel values (one per entry, oldest first).
  void extend_budget_columns(const Eigen::VectorXd& values);
  void clear_budget_columns();
  // (1/M_t) sum_r y_r beta^T budget_column_r = <Phi_S beta, -grad_bar>.
  double budget_inner(const Eigen::VectorXd& beta) const;

 private:
  std::size_t capacity_;
  std::deque<WindowEntry> entries_;
};

// Value of -grad_bar_t at x.
double optimistic_value_at(const OptimismWindow& w, const Kernel& k, const Instance& x);

struct DeltaRecord {
  double delta = 0.0;  // max(raw, 0)
  double raw = 0.0;    // ||g - grad_bar||^2 - ||grad_bar||^2
  bool used_exact_gradient = true;
};

DeltaRecord make_delta(double raw, bool exact);

// Exact gradient g = -y kappa(x, .): raw = kappa(x,x) - 2 y <kappa(x,.), -grad_bar>.
DeltaRecord delta_exact(const OptimismWindow& w, const Kernel& k, const Instance& x, int y);
// Approximate gradient g = -y Phi_S beta:
//   raw = beta^T K_S beta - 2 y (1/M_t) sum_r sum_i beta_i y_{t-r} kappa(s_i, x_{t-r}).
DeltaRecord delta_approx(const OptimismWindow& w, const Kernel& k, const BudgetSet& b,
                         const Eigen::VectorXd& beta, int y);

}  // namespace okl
