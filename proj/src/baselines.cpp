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

#include "okl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace okl {

std::vector<double> stepsize_grid(std::size_t T) {
  if (T == 0) throw std::invalid_argument("stepsize grid: T must be positive");
  std::vector<double> grid;
  const double root = std::sqrt(static_cast<double>(T));
  for (int e = -3; e <= 3; ++e) grid.push_back(std::pow(10.0, e) / root);
  return grid;
}

OgdLearner::OgdLearner(Kernel kernel, double eta, double U)
    : kernel_(std::move(kernel)),
      eta_(eta),
      support_(BudgetMode::plain, std::numeric_limits<std::size_t>::max()),
      f_(U) {
  if (!(eta > 0.0)) throw std::invalid_argument("ogd: stepsize must be positive");
  if (!(U > 0.0)) throw std::invalid_argument("ogd: radius must be positive");
}

RoundOutcome OgdLearner::step(const Instance& x, int y) {
  RoundOutcome out;
  const double fx = evaluate_at(f_, support_, kernel_, x);
  out.margin = fx;
  out.prediction = sign_of(fx);
  out.hinge_loss = hinge(fx, y);
  if (out.hinge_loss > 0.0) {
    support_.insert_plain(x, y, rounds() + 1);
    step_exact(f_, support_, kernel_.diagonal(x), fx, y, eta_);
    out.updated = true;
  }
  record(out, y);
  return out;
}

std::optional<double> OgdLearner::dense_norm() const {
  return std::sqrt(std::max(0.0, dense_squared_norm(f_, support_, kernel_)));
}

FourierFeatureMap::FourierFeatureMap(std::size_t num_features, std::size_t dimension,
                                     double sigma, std::uint64_t seed)
    : frequencies_(static_cast<Eigen::Index>(num_features),
                   static_cast<Eigen::Index>(dimension)),
      phases_(static_cast<Eigen::Index>(num_features)),
      scale_(num_features ? std::sqrt(2.0 / static_cast<double>(num_features)) : 0.0) {
  if (num_features == 0) throw std::invalid_argument("fourier map: B must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("fourier map: sigma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / sigma);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < frequencies_.rows(); ++i) {
    for (Eigen::Index j = 0; j < frequencies_.cols(); ++j) frequencies_(i, j) = normal(rng);
    phases_[i] = phase(rng);
  }
}

Eigen::VectorXd FourierFeatureMap::features(const Eigen::VectorXd& x) const {
  if (x.size() != frequencies_.cols())
    throw std::invalid_argument("fourier map: dimension mismatch");
  Eigen::VectorXd z = frequencies_ * x + phases_;
  return scale_ * z.array().cos().matrix();
}

FogdLearner::FogdLearner(FourierFeatureMap map, double eta)
    : map_(std::move(map)), eta_(eta), w_(Eigen::VectorXd::Zero(
                                           static_cast<Eigen::Index>(map_.num_features()))) {
  if (!(eta > 0.0)) throw std::invalid_argument("fogd: stepsize must be positive");
}

RoundOutcome FogdLearner::step(const Instance& x, int y) {
  const Eigen::VectorXd z = map_.features(x.features);
  RoundOutcome out;
  out.margin = w_.dot(z);
  out.prediction = sign_of(out.margin);
  out.hinge_loss = hinge(out.margin, y);
  if (out.hinge_loss > 0.0) {
    w_ += (eta_ * y) * z;
    out.updated = true;
  }
  record(out, y);
  return out;
}

NystromMap::NystromMap(const Kernel& kernel, std::vector<Instance> landmarks, std::size_t rank)
    : kernel_(kernel), landmarks_(std::move(landmarks)) {
  if (landmarks_.empty()) throw std::invalid_argument("nystrom: no landmarks");
  if (rank == 0 || rank > landmarks_.size())
    throw std::invalid_argument("nystrom: rank must lie in [1, #landmarks]");
  Eigen::MatrixXd g = gram(kernel_, landmarks_);
  g.diagonal().array() += 1e-10;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("nystrom: eigendecomposition failed");
  // Eigen sorts ascending; keep the top `rank` strictly positive eigenpairs.
  const auto n = g.rows();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = n - 1; i >= 0 && keep.size() < rank; --i)
    if (solver.eigenvalues()[i] > 1e-12) keep.push_back(i);
  if (keep.empty()) throw std::runtime_error("nystrom: landmark Gram matrix is degenerate");
  const auto k = static_cast<Eigen::Index>(keep.size());
  factor_.resize(k, n);
  coefficient_map_.resize(k, n);
  for (Eigen::Index r = 0; r < k; ++r) {
    const double lambda = solver.eigenvalues()[keep[r]];
    const auto v = solver.eigenvectors().col(keep[r]);
    factor_.row(r) = v.transpose() / std::sqrt(lambda);
    coefficient_map_.row(r) = v.transpose() * std::sqrt(lambda);
  }
}

Eigen::VectorXd NystromMap::landmark_column(const Instance& x) const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(landmarks_.size()));
  kernel_.column(landmarks_, x, std::span<double>(c.data(), landmarks_.size()));
  return c;
}

Eigen::VectorXd NystromMap::features(const Instance& x) const {
  return factor_ * landmark_column(x);
}

double NystromMap::approximate_kernel(const Instance& x, const Instance& v) const {
  return features(x).dot(features(v));
}

NogdLearner::NogdLearner(Kernel kernel, double eta, double U, std::size_t B, std::size_t rank)
    : kernel_(std::move(kernel)),
      eta_(eta),
      B_(B),
      rank_(rank == 0 ? std::max<std::size_t>(1, B / 5) : rank),
      support_(BudgetMode::plain, B == 0 ? 1 : B),
      f_(U) {
  if (!(eta > 0.0)) throw std::invalid_argument("nogd: stepsize must be positive");
  if (B == 0) throw std::invalid_argument("nogd: B must be positive");
  if (rank_ > B) throw std::invalid_argument("nogd: rank exceeds B");
}

std::size_t NogdLearner::support_size() const {
  return map_ ? map_->num_landmarks() : support_.size();
}

std::optional<double> NogdLearner::dense_norm() const {
  if (map_) return std::nullopt;
  return std::sqrt(std::max(0.0, dense_squared_norm(f_, support_, kernel_)));
}

RoundOutcome NogdLearner::step(const Instance& x, int y) {
  RoundOutcome out;
  if (map_) {
    const Eigen::VectorXd z = map_->features(x);
    out.margin = w_.dot(z);
    out.prediction = sign_of(out.margin);
    out.hinge_loss = hinge(out.margin, y);
    if (out.hinge_loss > 0.0) {
      w_ += (eta_ * y) * z;
      out.updated = true;
    }
    record(out, y);
    return out;
  }

  const double fx = evaluate_at(f_, support_, kernel_, x);
  out.margin = fx;
  out.prediction = sign_of(fx);
  out.hinge_loss = hinge(fx, y);
  if (out.hinge_loss > 0.0) {
    support_.insert_plain(x, y, rounds() + 1);
    step_exact(f_, support_, kernel_.diagonal(x), fx, y, eta_);
    out.updated = true;
    if (support_.size() == B_) {
      std::vector<Instance> landmarks(support_.instances().begin(), support_.instances().end());
      map_.emplace(kernel_, std::move(landmarks), rank_);
      w_ = map_->coefficient_map() * f_.coefficients;
      out.phase_event = PhaseEvent::switched;
    }
  }
  record(out, y);
  return out;
}

}  // namespace okl
