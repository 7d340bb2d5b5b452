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

#include "okl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace okl {

Kernel Kernel::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("gaussian kernel: sigma must be positive");
  Kernel k;
  k.kind_ = KernelKind::gaussian;
  k.sigma_ = sigma;
  k.inv_two_sigma_sq_ = 1.0 / (2.0 * sigma * sigma);
  k.lower_ = 1.0;
  k.upper_ = 1.0;
  return k;
}

Kernel Kernel::precomputed(Eigen::MatrixXd matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw std::invalid_argument("precomputed kernel: matrix must be square and nonempty");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("precomputed kernel: matrix is not symmetric");
  const auto diag = matrix.diagonal();
  if (diag.minCoeff() <= 0.0)
    throw std::invalid_argument("precomputed kernel: diagonal must be positive");
  Kernel k;
  k.kind_ = KernelKind::precomputed;
  k.lower_ = diag.minCoeff();
  k.upper_ = diag.maxCoeff();
  k.matrix_ = std::make_shared<const Eigen::MatrixXd>(std::move(matrix));
  return k;
}

double Kernel::raw(const Instance& x, const Instance& v) const {
  if (kind_ == KernelKind::gaussian) {
    if (x.features.size() != v.features.size())
      throw std::invalid_argument("kernel: dimension mismatch (" +
                                  std::to_string(x.features.size()) + " vs " +
                                  std::to_string(v.features.size()) + ")");
    return std::exp(-(x.features - v.features).squaredNorm() * inv_two_sigma_sq_);
  }
  const auto n = static_cast<std::size_t>(matrix_->rows());
  if (x.row >= n || v.row >= n)
    throw std::out_of_range("kernel: instance index out of range");
  return (*matrix_)(static_cast<Eigen::Index>(x.row), static_cast<Eigen::Index>(v.row));
}

double Kernel::operator()(const Instance& x, const Instance& v) const {
  if (counter_) counter_->fetch_add(1, std::memory_order_relaxed);
  return raw(x, v);
}

double Kernel::diagonal(const Instance& x) const {
  if (kind_ == KernelKind::gaussian) return 1.0;
  return raw(x, x);
}

void Kernel::column(std::span<const Instance> points, const Instance& x,
                    std::span<double> out) const {
  if (out.size() != points.size())
    throw std::invalid_argument("kernel column: output size mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = (*this)(points[i], x);
}

Eigen::MatrixXd gram(const Kernel& k, std::span<const Instance> instances) {
  if (instances.empty()) throw std::invalid_argument("gram: empty instance sequence");
  const auto n = static_cast<Eigen::Index>(instances.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = k(instances[i], instances[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = k(instances[i], instances[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

std::vector<double> eigenvalues(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("eigenvalues: matrix not square");
  if (static_cast<std::size_t>(g.rows()) > kMaxEigenSize)
    throw std::invalid_argument("eigenvalues: matrix larger than the dense solver cap");
  if (g.size() == 0) return {};
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("eigenvalues: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues: solver did not converge");
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

void SpectrumProfile::validate() const {
  if (!(R0 > 0.0)) throw std::invalid_argument("spectrum: R0 must be positive");
  if (decay == Decay::exponential && !(rate > 0.0 && rate < 1.0))
    throw std::invalid_argument("spectrum: exponential rate must lie in (0, 1)");
  if (decay == Decay::polynomial && !(rate >= 1.0))
    throw std::invalid_argument("spectrum: polynomial degree must be >= 1");
}

double SpectrumProfile::eigenvalue(std::size_t i) const {
  const double x = static_cast<double>(i);
  return decay == Decay::exponential ? R0 * std::pow(rate, x) : R0 * std::pow(x, -rate);
}

std::vector<double> SpectrumProfile::values(std::size_t n) const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = eigenvalue(i + 1);
  return out;
}

Eigen::MatrixXd synthesize_psd(const SpectrumProfile& profile, std::size_t n,
                               std::uint64_t seed) {
  profile.validate();
  if (n == 0) throw std::invalid_argument("synthesize_psd: n must be positive");
  if (n > kMaxEigenSize) throw std::invalid_argument("synthesize_psd: n too large");
  const auto m = static_cast<Eigen::Index>(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) z(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  // Sign fix against diag(R) makes Q Haar-distributed.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  const auto lambda = profile.values(n);
  const Eigen::Map<const Eigen::VectorXd> diag(lambda.data(), m);
  Eigen::MatrixXd out = q * diag.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace okl
