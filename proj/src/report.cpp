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

#include "okl/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace okl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "algo,dataset,sigma,zeta,B,B0,M,U,c,seed,perm,amr,time_s,A_T,t_bar,restarts";
}

std::string csv_line(const CsvRow& row) {
  std::ostringstream os;
  os << row.algo << ',' << row.dataset << ',' << format_double(row.sigma) << ','
     << format_double(row.zeta) << ',' << row.B << ',' << row.B0 << ',' << row.M << ','
     << format_double(row.U) << ',' << format_double(row.c) << ',' << row.seed << ','
     << row.perm << ',' << format_double(row.amr) << ',';
  if (row.time_s) os << format_double(*row.time_s);
  os << ',';
  if (row.A_T) os << format_double(*row.A_T);
  os << ',';
  // An empty t_bar means the switch never happened.
  if (row.t_bar) os << *row.t_bar;
  else os << "inf";
  os << ',' << row.restarts;
  return os.str();
}

nlohmann::json to_json(const RunReport& r, bool timing) {
  nlohmann::json j;
  j["algo"] = r.algo;
  j["dataset"] = r.dataset;
  j["T"] = r.T;
  j["mistakes"] = r.mistakes;
  j["amr"] = r.amr;
  j["cumulative_loss"] = r.cumulative_loss;
  j["alignment_A_T"] = r.alignment ? nlohmann::json(*r.alignment) : nlohmann::json(nullptr);
  j["delta_sum"] = r.delta_sum;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [round, size] : r.budget_trace) trace.push_back({round, size});
  j["budget_trace"] = std::move(trace);
  j["t_bar"] = r.t_bar ? nlohmann::json(*r.t_bar) : nlohmann::json(nullptr);
  j["restart_times"] = r.restart_times;
  j["restarts"] = r.restart_times.size();
  j["max_support"] = r.max_support;
  j["max_sampled_norm"] = r.max_sampled_norm;
  j["norm_checks"] = r.norm_checks;
  if (timing) j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"empirical_value", r.empirical_value},
          {"bound_value", r.bound_value},
          {"satisfied", r.satisfied},
          {"slack", r.slack}};
}

nlohmann::json to_json(const BudgetBoundReport& r) {
  nlohmann::json j = to_json(r.report);
  j["decay"] = r.profile.decay == Decay::exponential ? "exp" : "poly";
  j["R0"] = r.profile.R0;
  j[r.profile.decay == Decay::exponential ? "r" : "p"] = r.profile.rate;
  j["n"] = r.n;
  j["alpha"] = r.alpha;
  j["A"] = r.A;
  j["D"] = r.D;
  j["budget_size"] = r.budget_size;
  j["degenerate_skips"] = r.degenerate_skips;
  return j;
}

nlohmann::json to_json(const BatchResult& r) {
  return {{"r", r.r},
          {"test_hinge_risk", r.test_hinge_risk},
          {"test_error_rate", r.test_error_rate},
          {"online_amr", r.online_amr}};
}

}  // namespace okl
