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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "okl/kernel.hpp"

namespace okl {

enum class BudgetMode { tracked, plain };

// Outcome of the approximate-linear-dependence test for one query point.
struct AldResult {
  Eigen::VectorXd beta;            // K_S^{-1} k_S
  Eigen::VectorXd kernel_column;   // k_S, (k_S)_i = kappa(x_i, x)
  double self_similarity = 0.0;    // kappa(x, x)
  double residual = 0.0;           // kappa(x,x) - k_S^T beta, clamped at 0
  double alpha = 0.0;              // projection error used by the test; D when S is empty
  bool holds = false;              // sqrt(alpha) <= threshold
};

/// Ordered support set S_t.
///
/// In tracked mode the inverse Gram matrix of the members is maintained by
/// rank-one updates so that ALD checks cost O(|S|^2). Plain mode is an
/// append-only list used once the learner stops testing ALD. Members are kept
/// in arrival order.
class BudgetSet {
 public:
  BudgetSet(BudgetMode mode, std::size_t capacity);

  BudgetMode mode() const { return mode_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  std::size_t capacity() const { return capacity_; }

  std::span<const Instance> instances() const { return instances_; }
  std::span<const int> labels() const { return labels_; }
  std::span<const std::size_t> arrivals() const { return arrivals_; }
  const Instance& instance(std::size_t i) const { return instances_[i]; }
  const Eigen::MatrixXd& inverse_gram() const;

  // With the flag on, every tracked insertion verifies K_S * K_S^{-1} = I
  // and rebuilds the inverse from scratch when the error exceeds 1e-6.
  void set_consistency_check(bool on) { check_consistency_ = on; }
  std::size_t rebuild_count() const { return rebuilds_; }

  AldResult ald_check(const Kernel& k, const Instance& x, double threshold) const;
  // Same test when k_S and kappa(x,x) are already known.
  AldResult ald_from_column(Eigen::VectorXd kernel_column, double self_similarity,
                            double upper_bound, double threshold) const;

  // Appends x and extends the inverse with the rank-one formula
  //   K^{-1}_{S+x} = [K^{-1}_S 0; 0 0] + (1/alpha) (beta; -1)(beta; -1)^T.
  // Throws DegenerateInsertion when the residual is below 1e-12.
  void insert_tracked(const Kernel& k, const Instance& x, int label,
                      std::size_t arrival, const AldResult& prior);
  void insert_plain(const Instance& x, int label, std::size_t arrival);

  // det(K_{S+x}) / det(K_S) from dense determinants; |S| <= 12.
  double determinant_ratio(const Kernel& k, const Instance& x) const;

  // max |K_S K_S^{-1} - I|
  double inverse_consistency_error(const Kernel& k) const;
  void rebuild_inverse(const Kernel& k);

  // Drops the inverse and switches to plain mode with a new capacity.
  void to_plain(std::size_t capacity);
  // Keeps the first `count` members (plain mode only).
  void truncate(std::size_t count);

 private:
  BudgetMode mode_;
  std::size_t capacity_;
  std::vector<Instance> instances_;
  std::vector<int> labels_;
  std::vector<std::size_t> arrivals_;
  Eigen::MatrixXd inverse_;
  bool check_consistency_ = false;
  std::size_t rebuilds_ = 0;

  void append(const Instance& x, int label, std::size_t arrival);
};

}  // namespace okl
