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

#include <atomic>
#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "okl/errors.hpp"
#include "okl/pomdr.hpp"
#include "oracles.hpp"

using okl::Instance;
using okl::Kernel;
using okl::Phase;
using okl::PhaseEvent;
using okl::PomdrConfig;
using okl::PomdrLearner;

namespace {

PomdrConfig small_config(std::size_t T) {
  PomdrConfig cfg;
  cfg.T = T;
  cfg.B = 12;
  cfg.B0 = 5;
  cfg.M = 4;
  cfg.U = 5.0;
  cfg.lr_scale = 0.5;
  cfg.ald_scale = 0.2;
  cfg.zeta = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("configuration validation") {
  PomdrConfig cfg;
  cfg.T = 1000;
  CHECK_NOTHROW(cfg.validate());
  auto odd = cfg;
  odd.B = 401;
  CHECK_THROWS_AS(odd.validate(), okl::ConfigError);
  auto big_b0 = cfg;
  big_b0.B0 = 400;
  CHECK_THROWS_AS(big_b0.validate(), okl::ConfigError);
  auto zeta = cfg;
  zeta.zeta = 0.0;
  CHECK_THROWS_AS(zeta.validate(), okl::ConfigError);
  zeta.zeta = 1.5;
  CHECK_THROWS_AS(zeta.validate(), okl::ConfigError);
  auto no_t = cfg;
  no_t.T = 0;
  CHECK_THROWS_AS(no_t.validate(), okl::ConfigError);
  CHECK_THROWS_AS(PomdrLearner(odd, Kernel::gaussian(1.0)), okl::ConfigError);
}

TEST_CASE("automatic B0") {
  // 15 ln 8124 = 135.0...
  CHECK(okl::auto_b0(8124) == 136);
  CHECK(okl::auto_b0(19020) == static_cast<std::size_t>(std::ceil(15.0 * std::log(19020.0))));
  CHECK(okl::auto_b0(1) == 1);
  PomdrConfig cfg;
  cfg.T = 8124;
  CHECK(cfg.resolved_B0() == 136);
  CHECK(cfg.ald_threshold() == doctest::Approx(10.0 * std::pow(8124.0, -2.0 / 3.0)));
}

TEST_CASE("initial state and first round") {
  PomdrConfig cfg;
  cfg.T = 100;
  PomdrLearner l(cfg, Kernel::gaussian(1.0));
  CHECK(l.phase() == Phase::pomd);
  CHECK(l.epsilon() == 3.0);
  CHECK(l.learning_rate() == doctest::Approx(0.1 * 25.0 / std::sqrt(3.0)));
  CHECK(l.snapshot().value(Instance::dense(Eigen::Vector2d(1, 2))) == 0.0);
  CHECK(l.snapshot().predict(Instance::dense(Eigen::Vector2d(1, 2))) == 1);

  const auto x = Instance::dense(Eigen::Vector2d(0.5, -0.5));
  const auto out = l.step(x, -1);
  CHECK(out.prediction == 1);
  CHECK(out.margin == 0.0);
  CHECK(out.hinge_loss == 1.0);
  CHECK(out.updated);
  CHECK(out.delta == 1.0);
  CHECK(l.budget().size() == 1);
  CHECK(l.mistakes() == 1);
  CHECK(l.t() == 1);
}

TEST_CASE("zero-loss rounds leave the state alone") {
  // T = 100 keeps the ALD threshold below sqrt(D), so the first point is stored.
  PomdrConfig cfg;
  cfg.T = 100;
  cfg.lr_scale = 1.0;
  PomdrLearner l(cfg, Kernel::gaussian(1.0));
  const auto x = Instance::dense(Eigen::Vector2d(0.0, 1.0));
  l.step(x, 1);
  const double norm = l.hypothesis().squared_norm;
  const double sum = l.delta_sum();
  const auto out = l.step(x, 1);
  CHECK(out.hinge_loss == 0.0);
  CHECK_FALSE(out.updated);
  CHECK(out.delta == 0.0);
  CHECK(l.budget().size() == 1);
  CHECK(l.hypothesis().squared_norm == norm);
  CHECK(l.delta_sum() == sum);
  CHECK(l.window().size() == 2);
}

TEST_CASE("steps beyond the horizon are rejected") {
  PomdrConfig cfg;
  cfg.T = 2;
  PomdrLearner l(cfg, Kernel::gaussian(1.0));
  const auto x = Instance::dense(Eigen::Vector2d(0.0, 1.0));
  l.step(x, 1);
  l.step(x, -1);
  CHECK_THROWS(l.step(x, 1));
  PomdrConfig other;
  other.T = 5;
  PomdrLearner m(other, Kernel::gaussian(1.0));
  CHECK_THROWS(m.step(x, 0));
}

TEST_CASE("fast-path deltas equal the dense formulas") {
  std::mt19937_64 rng(127);
  const auto ds = fixture::blobs(400, 3, 0.6, rng, 0.1);
  PomdrConfig cfg;
  cfg.T = ds.size();
  cfg.B = 200;
  cfg.B0 = 150;
  cfg.M = 7;
  cfg.ald_scale = 3.0;
  cfg.zeta = 0.5;
  const Kernel k = Kernel::gaussian(1.0);
  PomdrLearner l(cfg, k);
  std::size_t approx_rounds = 0;
  std::size_t exact_rounds = 0;
  for (const auto& e : ds.examples) {
    if (l.phase() != Phase::pomd) break;
    const auto ald = l.budget().ald_check(k, e.x, cfg.ald_threshold());
    const auto expected_exact = okl::delta_exact(l.window(), k, e.x, e.label);
    okl::DeltaRecord expected_approx;
    if (ald.holds) expected_approx = okl::delta_approx(l.window(), k, l.budget(), ald.beta, e.label);
    const double margin = okl::evaluate_at(l.hypothesis(), l.budget(), k, e.x) +
                          l.learning_rate() * okl::optimistic_value_at(l.window(), k, e.x);
    const auto out = l.step(e.x, e.label);
    CHECK(std::abs(out.margin - margin) <= 1e-10);
    if (!out.updated) continue;
    if (ald.holds) {
      ++approx_rounds;
      CHECK(std::abs(out.delta - expected_approx.delta) <= 1e-10);
    } else {
      ++exact_rounds;
      CHECK(std::abs(out.delta - expected_exact.delta) <= 1e-10);
    }
    CHECK(std::abs(l.hypothesis().squared_norm -
                   okl::dense_squared_norm(l.hypothesis(), l.budget(), k)) <=
          1e-6 * std::max(1.0, l.hypothesis().squared_norm));
  }
  CHECK(approx_rounds > 10);
  CHECK(exact_rounds > 10);
}

TEST_CASE("per-round kernel evaluations stay within |S| + |W|") {
  std::mt19937_64 rng(131);
  const auto ds = fixture::blobs(600, 2, 0.3, rng, 0.2);
  Kernel k = Kernel::gaussian(0.5);
  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
  k.attach_counter(counter);
  auto cfg = small_config(ds.size());
  cfg.B = 40;
  cfg.B0 = 15;
  PomdrLearner l(cfg, k);
  bool saw_halving = false;
  for (const auto& e : ds.examples) {
    const std::size_t allowed = l.budget().size() + l.window().size();
    const auto before = counter->load();
    const auto out = l.step(e.x, e.label);
    if (out.phase_event == PhaseEvent::halved) {
      saw_halving = true;
      continue;  // O(B^2) halving rounds are amortized
    }
    CHECK(counter->load() - before <= allowed);
  }
  CHECK(saw_halving);
}

TEST_CASE("phase switch, restarts and invariants") {
  std::mt19937_64 rng(137);
  const auto ds = fixture::random_stream(800, 4, rng);
  const auto cfg = small_config(ds.size());
  const Kernel k = Kernel::gaussian(1.0);
  PomdrLearner l(cfg, k);
  double last_lambda = l.learning_rate();
  std::size_t switches = 0;
  for (const auto& e : ds.examples) {
    const double lambda = l.learning_rate();
    const auto out = l.step(e.x, e.label);
    CHECK(lambda <= last_lambda + 1e-15);
    last_lambda = lambda;
    if (out.phase_event != PhaseEvent::none) last_lambda = l.learning_rate();
    if (out.phase_event == PhaseEvent::switched) {
      ++switches;
      CHECK(l.t_bar() == l.t() + 1);
      CHECK(l.budget().size() == cfg.B0.value());
      CHECK(l.epsilon() == 4.0);
      CHECK(l.delta_sum() == 0.0);
      CHECK(l.budget().mode() == okl::BudgetMode::plain);
    }
    if (out.phase_event == PhaseEvent::halved) {
      CHECK(l.budget().size() == cfg.B / 2);
      CHECK(l.delta_sum() == 0.0);
      CHECK(l.hypothesis().norm() == doctest::Approx(cfg.U));
    }
    CHECK(l.budget().size() < cfg.B);
    if (l.phase() == Phase::pomd) CHECK(l.budget().size() <= cfg.B0.value());
    CHECK(l.phase() == (l.t_bar() && l.t() + 1 >= *l.t_bar() ? Phase::omdr : Phase::pomd));
    CHECK(*l.dense_norm() <= cfg.U + 1e-6);
  }
  CHECK(switches == 1);
  CHECK(l.restart_times().size() >= 2);
  CHECK(static_cast<double>(l.restart_times().size()) <=
        2.0 * static_cast<double>(ds.size()) / static_cast<double>(cfg.B) - 1.0);
}

TEST_CASE("identical inputs give identical runs") {
  std::mt19937_64 rng(139);
  const auto ds = fixture::random_stream(300, 3, rng);
  const auto cfg = small_config(ds.size());
  PomdrLearner a(cfg, Kernel::gaussian(1.0));
  PomdrLearner b(cfg, Kernel::gaussian(1.0));
  for (const auto& e : ds.examples) {
    const auto oa = a.step(e.x, e.label);
    const auto ob = b.step(e.x, e.label);
    CHECK(oa.prediction == ob.prediction);
    CHECK(oa.margin == ob.margin);
  }
  CHECK(a.restart_times() == b.restart_times());
  CHECK(a.t_bar() == b.t_bar());
  CHECK(a.hypothesis().coefficients == b.hypothesis().coefficients);
}

TEST_CASE("snapshots are immutable and match a replay") {
  std::mt19937_64 rng(149);
  const auto ds = fixture::blobs(250, 2, 1.0, rng, 0.05);
  const auto probes = oracle::random_points(10, 2, rng);
  const auto cfg = small_config(ds.size());
  const Kernel k = Kernel::gaussian(1.0);
  PomdrLearner l(cfg, k);
  const std::size_t r = 120;
  for (std::size_t i = 0; i < r; ++i) l.step(ds.examples[i].x, ds.examples[i].label);
  const auto snap = l.snapshot();
  std::vector<double> before;
  for (const auto& p : probes) before.push_back(snap.value(p));
  for (std::size_t i = r; i < ds.size(); ++i) l.step(ds.examples[i].x, ds.examples[i].label);
  for (std::size_t j = 0; j < probes.size(); ++j) CHECK(snap.value(probes[j]) == before[j]);

  // The margin the replayed learner would use at round r + 1 is f_{r+1}(x).
  for (std::size_t j = 0; j < probes.size(); ++j) {
    PomdrLearner replay(cfg, k);
    for (std::size_t i = 0; i < r; ++i) replay.step(ds.examples[i].x, ds.examples[i].label);
    const auto out = replay.step(probes[j], 1);
    CHECK(std::abs(out.margin - before[j]) <= 1e-12);
  }
}

TEST_CASE("inverse checking keeps the tracked inverse consistent") {
  std::mt19937_64 rng(151);
  const auto ds = fixture::blobs(400, 3, 0.5, rng, 0.1);
  PomdrConfig cfg;
  cfg.T = ds.size();
  cfg.check_inverse = true;
  cfg.ald_scale = 2.0;
  cfg.B0 = 390;
  const Kernel k = Kernel::gaussian(0.8);
  PomdrLearner l(cfg, k);
  for (const auto& e : ds.examples) l.step(e.x, e.label);
  REQUIRE(l.phase() == Phase::pomd);
  CHECK(l.budget().inverse_consistency_error(k) <= 1e-6);
}
