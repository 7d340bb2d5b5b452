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

// Seeded builders shared by the unit tests and the acceptance binary.
#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "okl/budget.hpp"
#include "okl/data.hpp"
#include "okl/kernel.hpp"
#include "oracles.hpp"

namespace fixture {

// Tracked budget grown by ALD-gated insertion of random Gaussian points; the
// threshold keeps K_S well conditioned. Returns the points that were offered.
inline std::vector<okl::Instance> grow_budget(okl::BudgetSet& b, const okl::Kernel& k,
                                              std::size_t target, std::size_t dim,
                                              std::mt19937_64& rng, double threshold = 0.05) {
  std::vector<okl::Instance> offered;
  std::size_t arrival = b.empty() ? 0 : b.arrivals().back();
  for (int guard = 0; b.size() < target && guard < 100000; ++guard) {
    auto x = oracle::random_points(1, dim, rng, 1.5).front();
    offered.push_back(x);
    const auto ald = b.ald_check(k, x, threshold);
    if (!ald.holds) b.insert_tracked(k, x, 1, ++arrival, ald);
  }
  return offered;
}

// Two Gaussian blobs with a label-dependent mean shift.
inline okl::Dataset blobs(std::size_t n, std::size_t dim, double shift, std::mt19937_64& rng,
                          double flip = 0.0) {
  okl::Dataset ds;
  ds.dimension = dim;
  ds.name = "blobs";
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = (rng() & 1) ? 1 : -1;
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (auto& c : v) c = g(rng);
    v[0] += shift * y;
    const int label = u(rng) < flip ? -y : y;
    ds.examples.push_back({okl::Instance::dense(std::move(v)), label, i});
  }
  return ds;
}

inline okl::Dataset random_stream(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  okl::Dataset ds;
  ds.dimension = dim;
  ds.name = "random";
  const auto pts = oracle::random_points(n, dim, rng);
  const auto ys = oracle::random_labels(n, rng);
  for (std::size_t i = 0; i < n; ++i) ds.examples.push_back({pts[i], ys[i], i});
  return ds;
}

}  // namespace fixture
