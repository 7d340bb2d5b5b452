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

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "okl/hypothesis.hpp"
#include "oracles.hpp"

using okl::BudgetMode;
using okl::BudgetSet;
using okl::Instance;
using okl::Kernel;
using okl::KernelExpansion;

namespace {

BudgetSet plain_budget(const std::vector<Instance>& pts, std::size_t capacity) {
  BudgetSet b(BudgetMode::plain, capacity);
  for (std::size_t i = 0; i < pts.size(); ++i) b.insert_plain(pts[i], 1, i + 1);
  return b;
}

double dense_oracle(const KernelExpansion& f, const BudgetSet& b, const Kernel& k) {
  oracle::Matrix g(b.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) g[i][j] = k(b.instance(i), b.instance(j));
  return oracle::quadratic_form(
      g, std::vector<double>(f.coefficients.data(), f.coefficients.data() + f.coefficients.size()));
}

}  // namespace

TEST_CASE("evaluate_at") {
  std::mt19937_64 rng(61);
  const Kernel k = Kernel::gaussian(1.0);
  const auto pts = oracle::random_points(5, 3, rng);
  const BudgetSet b = plain_budget(pts, 10);
  KernelExpansion f(25.0);
  f.coefficients = Eigen::VectorXd::Zero(5);
  CHECK(evaluate_at(f, b, k, pts[0]) == 0.0);
  std::normal_distribution<double> g;
  for (auto& a : f.coefficients) a = g(rng);
  const auto q = oracle::random_points(1, 3, rng).front();
  double want = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    want += f.coefficients[static_cast<Eigen::Index>(i)] * oracle::gauss(pts[i], q, 1.0);
  CHECK(std::abs(evaluate_at(f, b, k, q) - want) <= 1e-12);

  const BudgetSet one = plain_budget({pts[0]}, 2);
  KernelExpansion h(25.0);
  h.coefficients = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(evaluate_at(h, one, k, pts[0]) == 2.0);
  CHECK_THROWS(evaluate_at(h, b, k, q));
}

TEST_CASE("step_exact") {
  std::mt19937_64 rng(67);
  const Kernel k = Kernel::gaussian(1.0);
  const auto pts = oracle::random_points(3, 2, rng);
  BudgetSet b(BudgetMode::plain, 10);
  KernelExpansion f(25.0);
  b.insert_plain(pts[0], 1, 1);
  okl::step_exact(f, b, k, pts[0], +1, 0.5);
  REQUIRE(f.coefficients.size() == 1);
  CHECK(f.coefficients[0] == 0.5);
  CHECK(f.squared_norm == doctest::Approx(0.25));

  b.insert_plain(pts[1], -1, 2);
  okl::step_exact(f, b, k, pts[1], -1, 0.0);
  CHECK(f.coefficients[1] == 0.0);
  CHECK(f.squared_norm == doctest::Approx(0.25));

  b.insert_plain(pts[2], 1, 3);
  okl::step_exact(f, b, k, pts[2], 1, 0.7);
  CHECK(std::abs(f.squared_norm - dense_oracle(f, b, k)) <= 1e-9);
  CHECK_THROWS(okl::step_exact(f, b, k, pts[0], 1, 0.1));
}

TEST_CASE("step_approx") {
  std::mt19937_64 rng(71);
  const Kernel k = Kernel::gaussian(1.0);
  const auto pts = oracle::random_points(4, 2, rng);
  const BudgetSet b = plain_budget(pts, 10);
  KernelExpansion f(25.0);
  std::normal_distribution<double> g;
  f.coefficients = Eigen::VectorXd(4);
  for (auto& a : f.coefficients) a = g(rng);
  f.squared_norm = dense_oracle(f, b, k);
  const KernelExpansion before = f;
  okl::step_approx(f, b, k, 1, 0.4, Eigen::VectorXd::Zero(4));
  CHECK(f.coefficients == before.coefficients);
  CHECK(f.squared_norm == doctest::Approx(before.squared_norm));

  Eigen::VectorXd beta(4);
  for (auto& v : beta) v = g(rng);
  okl::step_approx(f, b, k, -1, 0.4, beta);
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(f.coefficients[i] == doctest::Approx(before.coefficients[i] - 0.4 * beta[i]));
  CHECK(std::abs(f.squared_norm - dense_oracle(f, b, k)) <= 1e-9);
  CHECK_THROWS(okl::step_approx(f, b, k, 1, 0.1, Eigen::VectorXd::Zero(3)));

  const BudgetSet one = plain_budget({pts[0]}, 2);
  KernelExpansion z(25.0);
  z.coefficients = Eigen::VectorXd::Zero(1);
  okl::step_approx(z, one, k, -1, 0.3, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(z.coefficients[0] == doctest::Approx(-0.3));
}

TEST_CASE("ball projection") {
  std::mt19937_64 rng(73);
  const Kernel k = Kernel::gaussian(1.0);
  const auto pts = oracle::random_points(6, 2, rng);
  const BudgetSet b = plain_budget(pts, 10);
  KernelExpansion f(2.0);
  f.coefficients = Eigen::VectorXd::Constant(1, 1.0);
  f.squared_norm = 1.0;
  okl::project_to_ball(f);
  CHECK(f.coefficients[0] == 1.0);
  f.coefficients[0] = 4.0;
  f.squared_norm = 16.0;
  okl::project_to_ball(f);
  CHECK(f.coefficients[0] == doctest::Approx(2.0));
  CHECK(f.squared_norm == doctest::Approx(4.0));

  KernelExpansion h(1.5);
  h.coefficients = Eigen::VectorXd::Constant(6, 3.0);
  h.squared_norm = dense_oracle(h, b, k);
  REQUIRE(h.norm() > 1.5);
  okl::project_to_ball(h);
  CHECK(std::abs(std::sqrt(dense_oracle(h, b, k)) - 1.5) <= 1e-9);
}

TEST_CASE("halving with two members") {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 0.3, 0.3, 1.0;
  const Kernel k = Kernel::precomputed(m);
  BudgetSet b(BudgetMode::plain, 2);
  b.insert_plain(Instance::index(0), 1, 1);
  b.insert_plain(Instance::index(1), -1, 2);
  KernelExpansion f(5.0);
  f.coefficients = Eigen::Vector2d(0.4, -1.0);
  f.squared_norm = okl::dense_squared_norm(f, b, k);
  const auto res = okl::halve_and_redistribute(f, b, k);
  CHECK(res.removed == 1);
  REQUIRE(b.size() == 1);
  const double sum = 0.4 - 1.0;
  CHECK(f.coefficients[0] == doctest::Approx(sum * 5.0 / (std::abs(sum) * std::sqrt(2.0))));
  CHECK(f.squared_norm == doctest::Approx(25.0));
}

TEST_CASE("halving a zero expansion skips the rescale") {
  std::mt19937_64 rng(79);
  const Kernel k = Kernel::gaussian(1.0);
  BudgetSet b = plain_budget(oracle::random_points(4, 2, rng), 4);
  KernelExpansion f(3.0);
  f.coefficients = Eigen::VectorXd::Zero(4);
  okl::halve_and_redistribute(f, b, k);
  CHECK(b.size() == 2);
  CHECK(f.coefficients == Eigen::VectorXd::Zero(2));
  CHECK(f.squared_norm == 0.0);
}

TEST_CASE("halving a four-member budget against a hand computation") {
  // Members 3 and 4 are most similar to 2 and 1 respectively.
  Eigen::MatrixXd m(4, 4);
  m << 1.0, 0.2, 0.1, 0.6,
       0.2, 1.0, 0.7, 0.3,
       0.1, 0.7, 1.0, 0.0,
       0.6, 0.3, 0.0, 1.0;
  const Kernel k = Kernel::precomputed(m);
  BudgetSet b(BudgetMode::plain, 4);
  for (std::size_t i = 0; i < 4; ++i) b.insert_plain(Instance::index(i), 1, i + 1);
  KernelExpansion f(2.0);
  f.coefficients = Eigen::Vector4d(1.0, -0.5, 0.25, 0.75);
  f.squared_norm = okl::dense_squared_norm(f, b, k);
  const auto res = okl::halve_and_redistribute(f, b, k);
  // Kept: a1 = 1 + 0.75 = 1.75, a2 = -0.5 + 0.25 = -0.25.
  const double q = 1.75 * 1.75 + 0.25 * 0.25 - 2.0 * 1.75 * 0.25 * 0.2;
  CHECK(res.norm_before_rescale == doctest::Approx(std::sqrt(q)));
  const double s = 2.0 / std::sqrt(q);
  CHECK(f.coefficients[0] == doctest::Approx(1.75 * s));
  CHECK(f.coefficients[1] == doctest::Approx(-0.25 * s));
  CHECK(std::abs(okl::dense_squared_norm(f, b, k) - 4.0) <= 1e-8 * 4.0);
}

TEST_CASE("halving ties go to the smaller index") {
  Eigen::MatrixXd m(4, 4);
  m << 1.0, 0.0, 0.5, 0.0,
       0.0, 1.0, 0.5, 0.0,
       0.5, 0.5, 1.0, 0.0,
       0.0, 0.0, 0.0, 1.0;
  const Kernel k = Kernel::precomputed(m);
  BudgetSet b(BudgetMode::plain, 4);
  for (std::size_t i = 0; i < 4; ++i) b.insert_plain(Instance::index(i), 1, i + 1);
  KernelExpansion f(100.0);
  f.coefficients = Eigen::Vector4d(0.0, 0.0, 1.0, 1.0);
  const auto res = okl::halve_and_redistribute(f, b, k);
  // Both removed members land on member 1 (x3 ties, x4 ties at 0).
  CHECK(res.norm_before_rescale == doctest::Approx(2.0));
  CHECK(f.coefficients[0] > 0.0);
  CHECK(f.coefficients[1] == 0.0);
}

TEST_CASE("halving preserves coefficient mass before the rescale") {
  std::mt19937_64 rng(83);
  const Kernel k = Kernel::gaussian(1.0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    BudgetSet b = plain_budget(oracle::random_points(10, 3, rng), 10);
    KernelExpansion f(4.0);
    f.coefficients = Eigen::VectorXd(10);
    for (auto& a : f.coefficients) a = g(rng);
    const double mass = f.coefficients.sum();
    const auto res = okl::halve_and_redistribute(f, b, k);
    REQUIRE(res.norm_before_rescale > 0.0);
    const double unscaled = f.coefficients.sum() * res.norm_before_rescale / 4.0;
    CHECK(unscaled == doctest::Approx(mass).epsilon(1e-10));
    CHECK(std::abs(std::sqrt(okl::dense_squared_norm(f, b, k)) - 4.0) <= 1e-8 * 4.0);
  }
}

TEST_CASE("halving requires a full budget") {
  std::mt19937_64 rng(89);
  const Kernel k = Kernel::gaussian(1.0);
  BudgetSet b = plain_budget(oracle::random_points(3, 2, rng), 4);
  KernelExpansion f(1.0);
  f.coefficients = Eigen::VectorXd::Zero(3);
  CHECK_THROWS(okl::halve_and_redistribute(f, b, k));
}

TEST_CASE("norm cache survives long random operation sequences") {
  std::mt19937_64 rng(97);
  const Kernel k = Kernel::gaussian(0.8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BudgetSet b(BudgetMode::plain, 40);
  KernelExpansion f(3.0);
  std::size_t arrival = 0;
  for (int op = 0; op < 1000; ++op) {
    const int y = u(rng) < 0.5 ? 1 : -1;
    const double lambda = u(rng);
    if (b.size() == b.capacity()) {
      okl::halve_and_redistribute(f, b, k);
    } else if (b.empty() || u(rng) < 0.5) {
      const auto x = oracle::random_points(1, 2, rng).front();
      b.insert_plain(x, y, ++arrival);
      okl::step_exact(f, b, k, x, y, lambda);
    } else {
      Eigen::VectorXd beta(static_cast<Eigen::Index>(b.size()));
      for (auto& v : beta) v = u(rng) - 0.5;
      okl::step_approx(f, b, k, y, lambda, beta);
    }
    const double dense = okl::dense_squared_norm(f, b, k);
    CHECK(std::abs(f.squared_norm - dense) <= 1e-6 * std::max(1.0, dense));
    CHECK(std::sqrt(dense) <= 3.0 + 1e-6);
  }
}
