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
#include <optional>
#include <string>

#include "okl/kernel.hpp"

namespace okl {

enum class PhaseEvent { none, switched, halved };

struct RoundOutcome {
  int prediction = 1;      // sign of the margin, sign(0) = +1
  double margin = 0.0;     // f_t(x_t)
  double hinge_loss = 0.0;
  bool updated = false;
  double delta = 0.0;
  PhaseEvent phase_event = PhaseEvent::none;
};

inline int sign_of(double margin) { return margin >= 0.0 ? 1 : -1; }
inline double hinge(double margin, int y) {
  const double v = 1.0 - y * margin;
  return v > 0.0 ? v : 0.0;
}

// Common round protocol shared by POMDR and the baselines.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string name() const = 0;
  virtual RoundOutcome step(const Instance& x, int y) = 0;
  // Number of stored support points (or feature dimension for linear models).
  virtual std::size_t support_size() const = 0;
  // ||f||_H recomputed densely, when the learner keeps a kernel expansion.
  virtual std::optional<double> dense_norm() const { return std::nullopt; }

  std::size_t rounds() const { return rounds_; }
  std::size_t mistakes() const { return mistakes_; }
  double cumulative_loss() const { return cumulative_loss_; }

 protected:
  void record(const RoundOutcome& out, int y) {
    ++rounds_;
    if (out.prediction != y) ++mistakes_;
    cumulative_loss_ += out.hinge_loss;
  }

 private:
  std::size_t rounds_ = 0;
  std::size_t mistakes_ = 0;
  double cumulative_loss_ = 0.0;
};

}  // namespace okl
