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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "okl/budget.hpp"
#include "okl/hypothesis.hpp"
#include "okl/kernel.hpp"
#include "okl/learner.hpp"

namespace okl {

// Stepsize grid 10^{-3..3} / sqrt(T).
std::vector<double> stepsize_grid(std::size_t T);

// Unbudgeted kernel online gradient descent, f <- Pi_U(f + eta y kappa(x, .))
// on rounds with positive hinge loss.
class OgdLearner final : public OnlineLearner {
 public:
  OgdLearner(Kernel kernel, double eta, double U);

  std::string name() const override { return "ogd"; }
  RoundOutcome step(const Instance& x, int y) override;
  std::size_t support_size() const override { return support_.size(); }
  std::optional<double> dense_norm() const override;

  const BudgetSet& support() const { return support_; }
  const KernelExpansion& hypothesis() const { return f_; }

 private:
  Kernel kernel_;
  double eta_;
  BudgetSet support_;
  KernelExpansion f_;
};

/// Random Fourier features for the Gaussian kernel:
///   z_i(x) = sqrt(2/B) cos(w_i . x + b_i),  w_i ~ N(0, sigma^-2 I),  b_i ~ U[0, 2pi).
class FourierFeatureMap {
 public:
  FourierFeatureMap(std::size_t num_features, std::size_t dimension, double sigma,
                    std::uint64_t seed);

  std::size_t num_features() const { return static_cast<std::size_t>(phases_.size()); }
  std::size_t dimension() const { return static_cast<std::size_t>(frequencies_.cols()); }
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }
  const Eigen::VectorXd& phases() const { return phases_; }

  Eigen::VectorXd features(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd frequencies_;  // B x d
  Eigen::VectorXd phases_;
  double scale_;
};

class FogdLearner final : public OnlineLearner {
 public:
  FogdLearner(FourierFeatureMap map, double eta);

  std::string name() const override { return "fogd"; }
  RoundOutcome step(const Instance& x, int y) override;
  std::size_t support_size() const override { return map_.num_features(); }
  const Eigen::VectorXd& weights() const { return w_; }

 private:
  FourierFeatureMap map_;
  double eta_;
  Eigen::VectorXd w_;
};

/// Nystrom feature map z(x) = Lambda_k^{-1/2} V_k^T k_L(x) built from the top-k
/// eigenpairs of the landmark Gram matrix (diagonal regularized by 1e-10).
class NystromMap {
 public:
  NystromMap(const Kernel& kernel, std::vector<Instance> landmarks, std::size_t rank);

  std::size_t rank() const { return static_cast<std::size_t>(factor_.rows()); }
  std::size_t num_landmarks() const { return landmarks_.size(); }
  const Eigen::MatrixXd& factor() const { return factor_; }
  // Lambda_k^{1/2} V_k^T, maps expansion coefficients over the landmarks to
  // feature-space weights.
  const Eigen::MatrixXd& coefficient_map() const { return coefficient_map_; }

  Eigen::VectorXd landmark_column(const Instance& x) const;
  Eigen::VectorXd features(const Instance& x) const;
  double approximate_kernel(const Instance& x, const Instance& v) const;

 private:
  Kernel kernel_;
  std::vector<Instance> landmarks_;
  Eigen::MatrixXd factor_;
  Eigen::MatrixXd coefficient_map_;
};

// Runs kernel OGD until B support points are stored, then freezes them as
// Nystrom landmarks and continues with linear updates in feature space.
class NogdLearner final : public OnlineLearner {
 public:
  // rank == 0 selects the default 0.2 B.
  NogdLearner(Kernel kernel, double eta, double U, std::size_t B, std::size_t rank = 0);

  std::string name() const override { return "nogd"; }
  RoundOutcome step(const Instance& x, int y) override;
  std::size_t support_size() const override;
  std::optional<double> dense_norm() const override;

  bool collecting() const { return !map_.has_value(); }
  const std::optional<NystromMap>& map() const { return map_; }
  const Eigen::VectorXd& weights() const { return w_; }

 private:
  Kernel kernel_;
  double eta_;
  std::size_t B_;
  std::size_t rank_;
  BudgetSet support_;
  KernelExpansion f_;
  std::optional<NystromMap> map_;
  Eigen::VectorXd w_;
};

}  // namespace okl
