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

#include "okl/pomdr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "okl/errors.hpp"

namespace okl {

namespace {
constexpr double kDegenerateResidual = 1e-12;
}  // namespace

std::size_t auto_b0(std::size_t T) {
  if (T <= 1) return 1;
  const auto b0 = static_cast<std::size_t>(std::ceil(15.0 * std::log(static_cast<double>(T))));
  return b0 == 0 ? 1 : b0;
}

void PomdrConfig::validate() const {
  if (!(U > 0.0)) throw ConfigError("U must be positive");
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ConfigError("zeta must lie in (0, 1]");
  if (B == 0 || B % 2 != 0) throw ConfigError("B must be a positive even count");
  if (M == 0) throw ConfigError("M must be positive");
  if (!(lr_scale > 0.0)) throw ConfigError("learning-rate scale c must be positive");
  if (!(ald_scale > 0.0)) throw ConfigError("ALD scale must be positive");
  if (T == 0) throw ConfigError("horizon T must be positive");
  const std::size_t b0 = resolved_B0();
  if (b0 == 0) throw ConfigError("B0 must be positive");
  if (b0 >= B)
    throw ConfigError("B0 (" + std::to_string(b0) + ") must be smaller than B (" +
                      std::to_string(B) + ")");
}

std::size_t PomdrConfig::resolved_B0() const { return B0 ? *B0 : auto_b0(T); }

double PomdrConfig::ald_threshold() const {
  return ald_scale * std::pow(static_cast<double>(T), -zeta);
}

FrozenHypothesis::FrozenHypothesis(Kernel kernel, std::vector<Instance> members,
                                   Eigen::VectorXd coefficients,
                                   std::vector<Instance> window_points,
                                   std::vector<int> window_labels, double lambda)
    : kernel_(std::move(kernel)),
      members_(std::move(members)),
      coefficients_(std::move(coefficients)),
      window_points_(std::move(window_points)),
      window_labels_(std::move(window_labels)),
      lambda_(lambda) {}

double FrozenHypothesis::value(const Instance& x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < members_.size(); ++i)
    f += coefficients_[static_cast<Eigen::Index>(i)] * kernel_(members_[i], x);
  if (window_points_.empty()) return f;
  double opt = 0.0;
  for (std::size_t r = 0; r < window_points_.size(); ++r)
    opt += window_labels_[r] * kernel_(window_points_[r], x);
  return f + lambda_ * opt / static_cast<double>(window_points_.size());
}

PomdrLearner::PomdrLearner(PomdrConfig cfg, Kernel kernel)
    : cfg_(cfg),
      kernel_(std::move(kernel)),
      b0_((cfg.validate(), cfg.resolved_B0())),
      threshold_(cfg.ald_threshold()),
      budget_(BudgetMode::tracked, b0_),
      f_prime_(cfg.U),
      window_(cfg.M) {
  budget_.set_consistency_check(cfg_.check_inverse);
}

double PomdrLearner::learning_rate() const {
  return cfg_.lr_scale * cfg_.U / std::sqrt(epsilon_ + delta_sum_);
}

std::optional<double> PomdrLearner::dense_norm() const {
  return std::sqrt(std::max(0.0, dense_squared_norm(f_prime_, budget_, kernel_)));
}

RoundOutcome PomdrLearner::step(const Instance& x, int y) {
  if (t_ >= cfg_.T)
    throw std::logic_error("pomdr: step beyond the configured horizon T=" +
                           std::to_string(cfg_.T));
  if (y != 1 && y != -1) throw std::invalid_argument("pomdr: label must be +1 or -1");
  const std::size_t round = t_ + 1;

  const double lambda = learning_rate();
  const Eigen::VectorXd window_values = window_.kernel_values(kernel_, x);
  const double optimistic = window_.weighted_mean(window_values);

  Eigen::VectorXd column(static_cast<Eigen::Index>(budget_.size()));
  kernel_.column(budget_.instances(), x, std::span<double>(column.data(), budget_.size()));
  const double previous = evaluate_with_column(f_prime_, column);

  RoundOutcome out;
  out.margin = previous + lambda * optimistic;
  out.prediction = sign_of(out.margin);
  out.hinge_loss = hinge(out.margin, y);

  DeltaRecord delta = make_delta(0.0, true);
  bool inserted = false;
  bool switch_phase = false;
  bool halved = false;
  const double self = kernel_.diagonal(x);

  if (out.hinge_loss > 0.0) {
    out.updated = true;
    if (phase_ == Phase::pomd) {
      AldResult ald =
          budget_.ald_from_column(column, self, kernel_.upper_bound(), threshold_);
      // A residual too small for a stable inverse update is linear dependence
      // for all practical purposes.
      const bool approximate = ald.holds || ald.residual < kDegenerateResidual;
      if (approximate) {
        const double beta_gram_beta = budget_.empty() ? 0.0 : ald.beta.dot(column);
        const Eigen::VectorXd beta =
            budget_.empty() ? Eigen::VectorXd() : Eigen::VectorXd(ald.beta);
        step_approx(f_prime_, y, lambda, beta, beta_gram_beta, previous);
        delta = make_delta(beta_gram_beta - 2.0 * y * window_.budget_inner(beta), false);
      } else {
        if (budget_.empty()) ald.beta.resize(0);
        budget_.insert_tracked(kernel_, x, y, round, ald);
        step_exact(f_prime_, budget_, self, previous, y, lambda);
        delta = make_delta(self - 2.0 * y * optimistic, true);
        window_.extend_budget_columns(window_values);
        inserted = true;
        switch_phase = budget_.size() == b0_;
      }
    } else {
      budget_.insert_plain(x, y, round);
      step_exact(f_prime_, budget_, self, previous, y, lambda);
      delta = make_delta(self - 2.0 * y * optimistic, true);
      if (budget_.size() == cfg_.B) {
        halve_and_redistribute(f_prime_, budget_, kernel_);
        halved = true;
      }
    }
  }
  out.delta = delta.delta;

  if (phase_ == Phase::pomd) {
    Eigen::VectorXd own = column;
    if (inserted) {
      own.conservativeResize(own.size() + 1);
      own[own.size() - 1] = self;
    }
    window_.push(x, y, std::move(own));
  } else {
    window_.push(x, y);
  }

  delta_sum_ += delta.delta;
  total_delta_ += delta.delta;
  t_ = round;

  // The segment that ends at a switch or restart keeps this round's delta.
  if (switch_phase) {
    phase_ = Phase::omdr;
    t_bar_ = round + 1;
    budget_.to_plain(cfg_.B);
    window_.clear_budget_columns();
    delta_sum_ = 0.0;
    epsilon_ = 4.0 * kernel_.upper_bound();
    out.phase_event = PhaseEvent::switched;
  }
  if (halved) {
    restart_times_.push_back(round);
    delta_sum_ = 0.0;
    out.phase_event = PhaseEvent::halved;
  }

  record(out, y);
  return out;
}

FrozenHypothesis PomdrLearner::snapshot() const {
  std::vector<Instance> members(budget_.instances().begin(), budget_.instances().end());
  std::vector<Instance> points;
  std::vector<int> labels;
  for (const auto& e : window_.entries()) {
    points.push_back(e.x);
    labels.push_back(e.label);
  }
  return FrozenHypothesis(kernel_, std::move(members), f_prime_.coefficients,
                          std::move(points), std::move(labels), learning_rate());
}

}  // namespace okl
