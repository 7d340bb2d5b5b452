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

#include "okl/optimism.hpp"

#include <algorithm>
#include <stdexcept>

namespace okl {

OptimismWindow::OptimismWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("optimism window: M must be positive");
}

void OptimismWindow::push(Instance x, int label, Eigen::VectorXd budget_column) {
  entries_.push_back(WindowEntry{std::move(x), label, std::move(budget_column)});
  if (entries_.size() > capacity_) entries_.pop_front();
}

Eigen::VectorXd OptimismWindow::kernel_values(const Kernel& k, const Instance& x) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(entries_.size()));
  Eigen::Index i = 0;
  for (const auto& e : entries_) out[i++] = k(e.x, x);
  return out;
}

double OptimismWindow::weighted_mean(const Eigen::VectorXd& values) const {
  if (static_cast<std::size_t>(values.size()) != entries_.size())
    throw std::invalid_argument("optimism window: value count mismatch");
  if (entries_.empty()) return 0.0;
  double sum = 0.0;
  Eigen::Index i = 0;
  for (const auto& e : entries_) sum += e.label * values[i++];
  return sum / static_cast<double>(entries_.size());
}

void OptimismWindow::extend_budget_columns(const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != entries_.size())
    throw std::invalid_argument("optimism window: value count mismatch");
  Eigen::Index i = 0;
  for (auto& e : entries_) {
    const auto n = e.budget_column.size();
    e.budget_column.conservativeResize(n + 1);
    e.budget_column[n] = values[i++];
  }
}

void OptimismWindow::clear_budget_columns() {
  for (auto& e : entries_) e.budget_column.resize(0);
}

double OptimismWindow::budget_inner(const Eigen::VectorXd& beta) const {
  if (entries_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : entries_) {
    if (e.budget_column.size() != beta.size())
      throw std::logic_error("optimism window: cached budget column is stale");
    sum += e.label * beta.dot(e.budget_column);
  }
  return sum / static_cast<double>(entries_.size());
}

double optimistic_value_at(const OptimismWindow& w, const Kernel& k, const Instance& x) {
  return w.weighted_mean(w.kernel_values(k, x));
}

DeltaRecord make_delta(double raw, bool exact) {
  return DeltaRecord{std::max(raw, 0.0), raw, exact};
}

DeltaRecord delta_exact(const OptimismWindow& w, const Kernel& k, const Instance& x, int y) {
  return make_delta(k.diagonal(x) - 2.0 * y * optimistic_value_at(w, k, x), true);
}

DeltaRecord delta_approx(const OptimismWindow& w, const Kernel& k, const BudgetSet& b,
                         const Eigen::VectorXd& beta, int y) {
  if (static_cast<std::size_t>(beta.size()) != b.size())
    throw std::invalid_argument("delta_approx: beta length does not match budget");
  if (b.empty()) return make_delta(0.0, false);
  const Eigen::MatrixXd g = gram(k, b.instances());
  double cross = 0.0;
  if (!w.empty()) {
    for (const auto& e : w.entries()) {
      double inner = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i)
        inner += beta[static_cast<Eigen::Index>(i)] * k(b.instance(i), e.x);
      cross += e.label * inner;
    }
    cross /= static_cast<double>(w.size());
  }
  return make_delta(beta.dot(g * beta) - 2.0 * y * cross, false);
}

}  // namespace okl
