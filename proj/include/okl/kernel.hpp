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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace okl {

// A point the kernel can be evaluated on. Dense feature vectors are used by
// the Gaussian kernel; precomputed kernels read `row` as an index into their
// matrix, which lets synthetic Gram matrices stand in for data.
struct Instance {
  Eigen::VectorXd features;
  std::size_t row = 0;

  static Instance dense(Eigen::VectorXd v) { return Instance{std::move(v), 0}; }
  static Instance index(std::size_t r) { return Instance{Eigen::VectorXd{}, r}; }
};

enum class KernelKind { gaussian, precomputed };

/// Positive semidefinite kernel with declared diagonal bounds [A, D].
///
/// Copies are cheap: the precomputed matrix is shared. An evaluation counter
/// can be attached for instrumentation; it counts off-diagonal evaluations
/// made through operator() only.
class Kernel {
 public:
  static Kernel gaussian(double sigma);
  // Bounds are read off the matrix diagonal. Throws if the matrix is not
  // square, not symmetric within 1e-12, or has a non-positive diagonal.
  static Kernel precomputed(Eigen::MatrixXd matrix);

  KernelKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  const Eigen::MatrixXd* matrix() const { return matrix_.get(); }

  double operator()(const Instance& x, const Instance& v) const;
  // kappa(x, x); exact and uncounted.
  double diagonal(const Instance& x) const;

  // out[i] = kappa(points[i], x)
  void column(std::span<const Instance> points, const Instance& x,
              std::span<double> out) const;

  void attach_counter(std::shared_ptr<std::atomic<std::uint64_t>> counter) {
    counter_ = std::move(counter);
  }
  std::uint64_t evaluations() const { return counter_ ? counter_->load() : 0; }

 private:
  KernelKind kind_ = KernelKind::gaussian;
  double sigma_ = 1.0;
  double inv_two_sigma_sq_ = 0.5;
  double lower_ = 1.0;
  double upper_ = 1.0;
  std::shared_ptr<const Eigen::MatrixXd> matrix_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;

  double raw(const Instance& x, const Instance& v) const;
};

// Dense Gram matrix, entries(i, j) = kappa(x_i, x_j).
Eigen::MatrixXd gram(const Kernel& k, std::span<const Instance> instances);

// All eigenvalues of a symmetric matrix, descending. Throws
// std::invalid_argument if the input is asymmetric beyond 1e-12 (scaled by the
// largest entry) or larger than kMaxEigenSize.
inline constexpr std::size_t kMaxEigenSize = 5000;
std::vector<double> eigenvalues(const Eigen::MatrixXd& g);

enum class Decay { exponential, polynomial };

// Prescribed spectrum lambda_i = R0 * r^i (exponential) or R0 * i^-p
// (polynomial), i = 1..n.
struct SpectrumProfile {
  Decay decay = Decay::exponential;
  double R0 = 1.0;
  double rate = 0.5;

  void validate() const;
  double eigenvalue(std::size_t i) const;  // 1-based
  std::vector<double> values(std::size_t n) const;
};

// Q diag(lambda) Q^T with Q a seeded Haar-random orthogonal matrix.
Eigen::MatrixXd synthesize_psd(const SpectrumProfile& profile, std::size_t n,
                               std::uint64_t seed);

}  // namespace okl
