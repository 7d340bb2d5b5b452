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

#include "okl/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace okl {

namespace {

void require_aligned(const KernelExpansion& f, const BudgetSet& b) {
  if (static_cast<std::size_t>(f.coefficients.size()) != b.size())
    throw std::invalid_argument("expansion: coefficients not aligned with budget");
}

bool same_point(const Instance& a, const Instance& b) {
  if (a.features.size() != b.features.size()) return false;
  if (a.features.size() == 0) return a.row == b.row;
  return a.features == b.features;
}

}  // namespace

double KernelExpansion::norm() const { return std::sqrt(std::max(0.0, squared_norm)); }

double evaluate_at(const KernelExpansion& f, const BudgetSet& b, const Kernel& k,
                   const Instance& x) {
  require_aligned(f, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    sum += f.coefficients[static_cast<Eigen::Index>(i)] * k(b.instance(i), x);
  return sum;
}

double evaluate_with_column(const KernelExpansion& f, const Eigen::VectorXd& column) {
  if (column.size() != f.coefficients.size())
    throw std::invalid_argument("expansion: kernel column length mismatch");
  return f.coefficients.dot(column);
}

double dense_squared_norm(const KernelExpansion& f, const BudgetSet& b, const Kernel& k) {
  require_aligned(f, b);
  if (b.empty()) return 0.0;
  return f.coefficients.dot(gram(k, b.instances()) * f.coefficients);
}

void step_exact(KernelExpansion& f, const BudgetSet& b, const Kernel& k, const Instance& x,
                int y, double lambda) {
  if (b.empty() || !same_point(b.instance(b.size() - 1), x))
    throw std::invalid_argument("step_exact: x must be the most recently inserted member");
  if (static_cast<std::size_t>(f.coefficients.size()) + 1 != b.size())
    throw std::invalid_argument("step_exact: coefficients must cover all but the new member");
  double previous = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    previous += f.coefficients[static_cast<Eigen::Index>(i)] * k(b.instance(i), x);
  step_exact(f, b, k.diagonal(x), previous, y, lambda);
}

void step_exact(KernelExpansion& f, const BudgetSet& b, double self_similarity,
                double previous_value, int y, double lambda) {
  const auto n = f.coefficients.size();
  if (static_cast<std::size_t>(n) + 1 != b.size())
    throw std::invalid_argument("step_exact: coefficients must cover all but the new member");
  f.coefficients.conservativeResize(n + 1);
  f.coefficients[n] = lambda * y;
  f.squared_norm += lambda * lambda * self_similarity + 2.0 * lambda * y * previous_value;
  f.squared_norm = std::max(0.0, f.squared_norm);
  project_to_ball(f);
}

void step_approx(KernelExpansion& f, const BudgetSet& b, const Kernel& k, int y,
                 double lambda, const Eigen::VectorXd& beta) {
  require_aligned(f, b);
  if (static_cast<std::size_t>(beta.size()) != b.size())
    throw std::invalid_argument("step_approx: beta length does not match budget");
  if (b.empty()) return;
  const Eigen::MatrixXd g = gram(k, b.instances());
  const Eigen::VectorXd g_beta = g * beta;
  step_approx(f, y, lambda, beta, beta.dot(g_beta), f.coefficients.dot(g_beta));
}

void step_approx(KernelExpansion& f, int y, double lambda, const Eigen::VectorXd& beta,
                 double beta_gram_beta, double projected_value) {
  if (beta.size() != f.coefficients.size())
    throw std::invalid_argument("step_approx: beta length does not match coefficients");
  f.coefficients += (lambda * y) * beta;
  f.squared_norm += lambda * lambda * beta_gram_beta + 2.0 * lambda * y * projected_value;
  f.squared_norm = std::max(0.0, f.squared_norm);
  project_to_ball(f);
}

void project_to_ball(KernelExpansion& f) {
  const double limit = f.radius * f.radius;
  if (f.squared_norm <= limit) return;
  f.coefficients *= f.radius / std::sqrt(f.squared_norm);
  f.squared_norm = limit;
}

HalvingResult halve_and_redistribute(KernelExpansion& f, BudgetSet& b, const Kernel& k) {
  if (b.mode() != BudgetMode::plain)
    throw std::logic_error("halve: budget must be in plain mode");
  if (b.size() != b.capacity() || b.capacity() % 2 != 0)
    throw std::invalid_argument("halve: budget must be full with an even capacity");
  require_aligned(f, b);

  const std::size_t keep = b.size() / 2;
  Eigen::VectorXd kept = f.coefficients.head(static_cast<Eigen::Index>(keep));
  for (std::size_t j = keep; j < b.size(); ++j) {
    std::size_t best = 0;
    double best_value = k(b.instance(0), b.instance(j));
    for (std::size_t i = 1; i < keep; ++i) {
      const double v = k(b.instance(i), b.instance(j));
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    kept[static_cast<Eigen::Index>(best)] += f.coefficients[static_cast<Eigen::Index>(j)];
  }
  b.truncate(keep);
  f.coefficients = std::move(kept);
  f.squared_norm = dense_squared_norm(f, b, k);

  HalvingResult result{keep, f.norm()};
  if (f.squared_norm > 0.0) {
    f.coefficients *= f.radius / std::sqrt(f.squared_norm);
    f.squared_norm = f.radius * f.radius;
  }
  return result;
}

}  // namespace okl
