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
#include <string>

#include <json.hpp>

#include "okl/evaluation.hpp"

namespace okl {

inline constexpr const char* kReportSchema = "okl-report/1";

// One CSV row; column order is fixed by csv_header().
struct CsvRow {
  std::string algo;
  std::string dataset;
  double sigma = 0.0;
  double zeta = 0.0;
  std::size_t B = 0;
  std::size_t B0 = 0;
  std::size_t M = 0;
  double U = 0.0;
  double c = 0.0;  // lr scale for pomdr, stepsize for the baselines
  std::uint64_t seed = 0;
  std::size_t perm = 0;
  double amr = 0.0;
  std::optional<double> time_s;
  std::optional<double> A_T;
  std::optional<std::size_t> t_bar;
  std::size_t restarts = 0;
};

std::string csv_header();
std::string csv_line(const CsvRow& row);

// Shortest text that parses back to the same double.
std::string format_double(double v);

// Wall time is left out when `timing` is false so repeated runs compare equal.
nlohmann::json to_json(const RunReport& r, bool timing = true);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const BudgetBoundReport& r);
nlohmann::json to_json(const BatchResult& r);

}  // namespace okl
