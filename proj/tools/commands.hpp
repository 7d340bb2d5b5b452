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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "okl/data.hpp"
#include "okl/evaluation.hpp"
#include "okl/pomdr.hpp"

namespace okl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// Seed used when a command is given none.
inline constexpr std::uint64_t kDefaultSeed = 7;

// Runs one subcommand. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Pool width from OKL_THREADS, else the hardware concurrency. Throws
// ConfigError for a malformed value.
std::size_t worker_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers; the first exception
// is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

struct DataSpec {
  std::string path;
  std::optional<DataFormat> format;  // inferred from the file name when empty
  CsvOptions csv;
  bool scale = false;
};
DataFormat infer_format(const std::string& path);
Dataset load(const DataSpec& spec);

// sigma in 2^{-2..6}
std::vector<double> default_sigma_grid();

struct ExperimentSpec {
  std::string algo = "pomdr";  // pomdr | ogd | fogd | nogd
  std::vector<double> sigmas;
  PomdrConfig pomdr;           // T is taken from the dataset; B doubles as the baseline budget
  bool b0_auto = true;
  std::vector<double> lr_scales{0.05, 0.1};
  std::vector<double> etas;    // baselines; empty selects stepsize_grid(T)
  std::size_t perms = 10;
  std::uint64_t seed = kDefaultSeed;
  std::size_t nogd_rank = 0;
  std::size_t norm_check_every = 100;
  bool alignment = false;
  std::size_t threads = 1;
};

struct GridPoint {
  double sigma = 0.0;
  double c = 0.0;  // lr scale (pomdr) or stepsize (baselines)
  std::vector<RunReport> runs;  // one per permutation
  double amr_mean = 0.0;
  double amr_sd = 0.0;
  double time_mean = 0.0;
  double time_sd = 0.0;
};

struct ExperimentResult {
  std::vector<GridPoint> grid;
  std::size_t best = 0;  // lowest mean AMR, first on ties
  std::vector<std::uint64_t> perm_seeds;
  std::vector<std::optional<double>> alignment;  // per sigma when requested
  std::size_t T = 0;
  std::size_t B0 = 0;
};

std::uint64_t permutation_seed(std::uint64_t seed, std::size_t perm);
ExperimentResult run_experiment(const Dataset& ds, const ExperimentSpec& spec);

nlohmann::json experiment_config_json(const ExperimentSpec& spec, const Dataset& ds,
                                      const ExperimentResult& res);

}  // namespace okl::cli
