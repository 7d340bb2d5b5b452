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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "okl/data.hpp"

namespace fs = std::filesystem;
using okl::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("okl_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_blobs(const fs::path& dir, std::size_t n, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const okl::Dataset ds = fixture::blobs(n, 4, shift, rng);
  const fs::path file = dir / "blobs.libsvm";
  std::ofstream f(file);
  okl::write_libsvm(ds, f);
  return file.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("exit codes: help, parse errors, bad config, missing data") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"run", "--help"}).code == 0);
  CHECK(cli({}).code == okl::cli::kExitConfig);
  CHECK(cli({"frobnicate"}).code == okl::cli::kExitConfig);
  CHECK(cli({"run", "--data", "x"}).code == okl::cli::kExitConfig);
  CHECK(cli({"verify-budget", "--n", "abc"}).code == okl::cli::kExitConfig);
  CHECK(cli({"verify-budget", "--decay", "linear"}).code == okl::cli::kExitConfig);
  CHECK(cli({"verify-budget", "--decay", "exp", "--r", "1.5"}).code == okl::cli::kExitConfig);

  const auto dir = scratch("codes");
  const auto data = write_blobs(dir, 60, 3.0, 1);
  const auto out = (dir / "out").string();
  CHECK(cli({"run", "--data", (dir / "missing.libsvm").string(), "--out", out}).code ==
        okl::cli::kExitData);
  CHECK(cli({"run", "--data", data, "--out", out, "--algo", "svm"}).code == okl::cli::kExitConfig);
  CHECK(cli({"run", "--data", data, "--out", out, "--B", "7"}).code == okl::cli::kExitConfig);
  CHECK(cli({"run", "--data", data, "--out", out, "--B0", "many"}).code == okl::cli::kExitConfig);
  CHECK(cli({"run", "--data", data, "--out", out, "--sigma", "-1"}).code == okl::cli::kExitConfig);
  CHECK(cli({"run", "--data", data, "--out", out, "--perms", "0"}).code == okl::cli::kExitConfig);
  CHECK(cli({"batch", "--data", data, "--sigma", "1", "--r", "0"}).code == okl::cli::kExitConfig);

  std::ofstream(dir / "garbage.libsvm") << "+1 1:0.5\nnot a line\n";
  CHECK(cli({"run", "--data", (dir / "garbage.libsvm").string(), "--out", out}).code ==
        okl::cli::kExitData);
}

TEST_CASE("run writes byte-identical reports for a fixed seed without timing") {
  const auto dir = scratch("determinism");
  const auto data = write_blobs(dir, 300, 2.0, 3);
  std::vector<std::string> base{"run",  "--data", data,      "--sigma",       "1", "2",
                                "--perms", "1",   "--seed",  "7",             "--omit-timing"};
  for (const char* algo : {"pomdr", "ogd", "fogd", "nogd"}) {
    CAPTURE(algo);
    // Small budgets so that POMDR switches phase and restarts within 300 rounds.
    const std::vector<std::string> sizes{"--B", "20", "--B0", "6", "--ald-scale", "0.5"};
    auto a = base;
    a.insert(a.end(), sizes.begin(), sizes.end());
    a.insert(a.end(), {"--algo", algo, "--out", (dir / "a").string()});
    auto b = base;
    b.insert(b.end(), sizes.begin(), sizes.end());
    b.insert(b.end(), {"--algo", algo, "--out", (dir / "b").string()});
    const auto ra = cli(a);
    INFO(ra.err);
    REQUIRE(ra.code == 0);
    REQUIRE(cli(b).code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      ++files;
      const auto other = dir / "b" / e.path().filename();
      REQUIRE(fs::exists(other));
      CHECK(slurp(e.path()) == slurp(other));
    }
    CHECK(files >= 3);
    fs::remove_all(dir / "a");
    fs::remove_all(dir / "b");
  }
}

TEST_CASE("thread count does not change results") {
  const auto dir = scratch("threads");
  const auto data = write_blobs(dir, 200, 2.0, 5);
  std::vector<std::string> args{"run", "--data", data, "--sigma", "1", "--perms", "3", "--omit-timing"};
  auto one = args;
  one.insert(one.end(), {"--out", (dir / "one").string()});
  auto many = args;
  many.insert(many.end(), {"--out", (dir / "many").string()});
  ::setenv("OKL_THREADS", "1", 1);
  REQUIRE(cli(one).code == 0);
  ::setenv("OKL_THREADS", "4", 1);
  REQUIRE(cli(many).code == 0);
  ::setenv("OKL_THREADS", "zero", 1);
  CHECK(cli(one).code == okl::cli::kExitConfig);
  ::unsetenv("OKL_THREADS");
  CHECK(slurp(dir / "one" / "aggregate.json") == slurp(dir / "many" / "aggregate.json"));
  CHECK(slurp(dir / "one" / "runs.csv") == slurp(dir / "many" / "runs.csv"));
}

TEST_CASE("aggregate matches the per-permutation reports") {
  const auto dir = scratch("aggregate");
  const auto data = write_blobs(dir, 250, 1.5, 9);
  const auto out = dir / "out";
  REQUIRE(cli({"run", "--data", data, "--sigma", "0.5", "2", "--lr-scale", "0.05", "0.1",
               "--perms", "4", "--alignment", "--out", out.string()})
              .code == 0);
  const auto agg = read_json(out / "aggregate.json");
  CHECK(agg["schema"] == "okl-report/1");
  REQUIRE(agg["grid"].size() == 4);
  double best = 2.0;
  for (const auto& g : agg["grid"]) {
    std::vector<double> amr;
    for (const auto& e : fs::directory_iterator(out)) {
      if (e.path().extension() != ".json" || e.path().filename() == "aggregate.json") continue;
      const auto j = read_json(e.path());
      if (j["sigma"] == g["sigma"] && j["c"] == g["c"]) {
        amr.push_back(j["report"]["amr"].get<double>());
        CHECK(j["report"].contains("wall_time_seconds"));
        CHECK(j["report"]["alignment_A_T"].get<double>() == doctest::Approx(g["A_T"].get<double>()));
      }
    }
    REQUIRE(amr.size() == 4);
    const auto [m, sd] = okl::mean_and_stddev(amr);
    CHECK(g["amr_mean"].get<double>() == doctest::Approx(m).epsilon(1e-12));
    CHECK(g["amr_sd"].get<double>() == doctest::Approx(sd).epsilon(1e-12));
    best = std::min(best, m);
  }
  CHECK(agg["best"]["amr_mean"].get<double>() == doctest::Approx(best));

  std::istringstream csv(slurp(out / "runs.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "algo,dataset,sigma,zeta,B,B0,M,U,c,seed,perm,amr,time_s,A_T,t_bar,restarts");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 16);
}

TEST_CASE("verify-budget reports satisfied bounds and an empty budget for large alpha") {
  const auto dir = scratch("verify");
  auto r = cli({"verify-budget", "--decay", "exp", "--r", "0.5", "--n", "512", "--zeta", "1",
                "--out", (dir / "exp.json").string()});
  REQUIRE(r.code == 0);
  auto j = read_json(dir / "exp.json");
  CHECK(j["all_satisfied"] == true);
  CHECK(j["results"][0]["satisfied"] == true);

  r = cli({"verify-budget", "--decay", "poly", "--p", "2", "--n", "256", "--out",
           (dir / "poly.json").string()});
  REQUIRE(r.code == 0);
  CHECK(read_json(dir / "poly.json")["all_satisfied"] == true);

  r = cli({"verify-budget", "--decay", "exp", "--r", "0.5", "--n", "128", "--alpha", "1e9",
           "--out", (dir / "big.json").string()});
  REQUIRE(r.code == 0);
  CHECK(read_json(dir / "big.json")["results"][0]["budget_size"] == 0);
}

TEST_CASE("alignment of two tight clusters equals T / 2") {
  const auto dir = scratch("alignment");
  // Two far-apart tight clusters give K ~ (yy' + 11') / 2 for balanced labels, so A_T ~ T - T/2.
  okl::Dataset ds;
  ds.dimension = 1;
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2 ? 1 : -1;
    Eigen::VectorXd v(1);
    v[0] = 100.0 * y + 1e-4 * i;
    ds.examples.push_back({okl::Instance::dense(v), y, static_cast<std::size_t>(i)});
  }
  {
    std::ofstream f(dir / "toy.libsvm");
    okl::write_libsvm(ds, f);
  }
  auto r = cli({"alignment", "--data", (dir / "toy.libsvm").string(), "--sigma", "1", "--perms",
                "2", "--out", (dir / "a.json").string()});
  REQUIRE(r.code == 0);
  const auto j = read_json(dir / "a.json");
  CHECK(j["results"][0]["A_T"].get<double>() == doctest::Approx(20.0).epsilon(1e-4));
  CHECK(j["results"][0]["t_bar"].size() == 2);
}

TEST_CASE("batch on separable blobs has zero test error and r = 1 has unit hinge risk") {
  const auto dir = scratch("batch");
  const auto data = write_blobs(dir, 400, 6.0, 11);
  auto r = cli({"batch", "--data", data, "--sigma", "2", "--r-seeds", "3", "--out",
                (dir / "b.json").string()});
  REQUIRE(r.code == 0);
  auto j = read_json(dir / "b.json");
  CHECK(j["aggregate"]["test_error_mean"].get<double>() <= 0.01);

  r = cli({"batch", "--data", data, "--sigma", "2", "--r", "1", "--r-seeds", "1", "--out",
           (dir / "r1.json").string()});
  REQUIRE(r.code == 0);
  j = read_json(dir / "r1.json");
  CHECK(j["results"][0]["r"] == 1);
  CHECK(j["results"][0]["test_hinge_risk"].get<double>() == doctest::Approx(1.0));
}
