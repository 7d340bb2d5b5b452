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

#include "okl/budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "okl/errors.hpp"

namespace okl {

namespace {
constexpr double kDegenerateResidual = 1e-12;
constexpr double kConsistencyTolerance = 1e-6;
constexpr std::size_t kMaxDeterminantSize = 12;
}  // namespace

BudgetSet::BudgetSet(BudgetMode mode, std::size_t capacity)
    : mode_(mode), capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("budget: capacity must be positive");
}

const Eigen::MatrixXd& BudgetSet::inverse_gram() const {
  if (mode_ != BudgetMode::tracked)
    throw std::logic_error("budget: inverse Gram is only kept in tracked mode");
  return inverse_;
}

AldResult BudgetSet::ald_check(const Kernel& k, const Instance& x, double threshold) const {
  if (mode_ != BudgetMode::tracked)
    throw std::logic_error("budget: ALD check requires tracked mode");
  Eigen::VectorXd column(static_cast<Eigen::Index>(size()));
  k.column(instances_, x, std::span<double>(column.data(), size()));
  return ald_from_column(std::move(column), k.diagonal(x), k.upper_bound(), threshold);
}

AldResult BudgetSet::ald_from_column(Eigen::VectorXd kernel_column, double self_similarity,
                                     double upper_bound, double threshold) const {
  if (mode_ != BudgetMode::tracked)
    throw std::logic_error("budget: ALD check requires tracked mode");
  if (static_cast<std::size_t>(kernel_column.size()) != size())
    throw std::invalid_argument("budget: kernel column does not match budget size");
  AldResult r;
  r.self_similarity = self_similarity;
  if (empty()) {
    r.residual = self_similarity;
    r.alpha = upper_bound;
  } else {
    r.beta = inverse_ * kernel_column;
    r.residual = std::max(0.0, self_similarity - kernel_column.dot(r.beta));
    r.alpha = std::clamp(r.residual, 0.0, upper_bound);
  }
  r.kernel_column = std::move(kernel_column);
  r.holds = std::sqrt(r.alpha) <= threshold;
  return r;
}

void BudgetSet::append(const Instance& x, int label, std::size_t arrival) {
  if (!arrivals_.empty() && arrival <= arrivals_.back())
    throw std::invalid_argument("budget: arrival indices must be strictly increasing");
  instances_.push_back(x);
  labels_.push_back(label);
  arrivals_.push_back(arrival);
}

void BudgetSet::insert_tracked(const Kernel& k, const Instance& x, int label,
                               std::size_t arrival, const AldResult& prior) {
  if (mode_ != BudgetMode::tracked)
    throw std::logic_error("budget: tracked insertion into a plain budget");
  if (size() >= capacity_) throw std::length_error("budget: capacity reached");
  if (static_cast<std::size_t>(prior.kernel_column.size()) != size() ||
      static_cast<std::size_t>(prior.beta.size()) != size())
    throw std::invalid_argument("budget: ALD result was computed for a different budget");
  if (prior.residual < kDegenerateResidual)
    throw DegenerateInsertion("budget: projection error " + std::to_string(prior.residual) +
                              " too small for a stable inverse update");

  const auto n = static_cast<Eigen::Index>(size());
  const double inv_alpha = 1.0 / prior.residual;
  Eigen::MatrixXd next(n + 1, n + 1);
  if (n > 0) {
    next.topLeftCorner(n, n) = inverse_ + inv_alpha * prior.beta * prior.beta.transpose();
    next.topRightCorner(n, 1) = -inv_alpha * prior.beta;
    next.bottomLeftCorner(1, n) = -inv_alpha * prior.beta.transpose();
  }
  next(n, n) = inv_alpha;
  inverse_ = std::move(next);
  append(x, label, arrival);

  if (check_consistency_ && inverse_consistency_error(k) > kConsistencyTolerance)
    rebuild_inverse(k);
}

void BudgetSet::insert_plain(const Instance& x, int label, std::size_t arrival) {
  if (mode_ != BudgetMode::plain)
    throw std::logic_error("budget: plain insertion into a tracked budget");
  if (size() >= capacity_)
    throw std::length_error("budget: full (" + std::to_string(capacity_) +
                            " members); remove before inserting");
  append(x, label, arrival);
}

double BudgetSet::determinant_ratio(const Kernel& k, const Instance& x) const {
  if (size() > kMaxDeterminantSize)
    throw std::invalid_argument("budget: determinant ratio limited to 12 members");
  if (empty()) return k.diagonal(x);
  std::vector<Instance> points(instances_.begin(), instances_.end());
  const double small = gram(k, points).determinant();
  if (std::abs(small) < 1e-300) throw std::domain_error("budget: K_S is singular");
  points.push_back(x);
  return gram(k, points).determinant() / small;
}

double BudgetSet::inverse_consistency_error(const Kernel& k) const {
  if (mode_ != BudgetMode::tracked)
    throw std::logic_error("budget: inverse Gram is only kept in tracked mode");
  if (empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(size());
  const Eigen::MatrixXd product = gram(k, instances_) * inverse_;
  return (product - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

void BudgetSet::rebuild_inverse(const Kernel& k) {
  if (mode_ != BudgetMode::tracked)
    throw std::logic_error("budget: inverse Gram is only kept in tracked mode");
  ++rebuilds_;
  if (empty()) {
    inverse_.resize(0, 0);
    return;
  }
  const Eigen::MatrixXd g = gram(k, instances_);
  inverse_ = g.ldlt().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
}

void BudgetSet::to_plain(std::size_t capacity) {
  if (capacity < size()) throw std::invalid_argument("budget: new capacity below size");
  mode_ = BudgetMode::plain;
  capacity_ = capacity;
  inverse_.resize(0, 0);
}

void BudgetSet::truncate(std::size_t count) {
  if (mode_ != BudgetMode::plain) throw std::logic_error("budget: tracked budgets only grow");
  if (count > size()) throw std::invalid_argument("budget: truncate beyond size");
  instances_.resize(count);
  labels_.resize(count);
  arrivals_.resize(count);
}

}  // namespace okl
