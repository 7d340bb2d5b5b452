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

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "okl/baselines.hpp"
#include "okl/errors.hpp"
#include "okl/report.hpp"

namespace okl::cli {

namespace {

namespace fs = std::filesystem;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::unique_ptr<OnlineLearner> make_learner(const ExperimentSpec& spec, const PomdrConfig& cfg,
                                            double sigma, double c, std::size_t dimension,
                                            std::uint64_t perm_seed) {
  const Kernel k = Kernel::gaussian(sigma);
  if (spec.algo == "pomdr") {
    PomdrConfig run = cfg;
    run.lr_scale = c;
    return std::make_unique<PomdrLearner>(run, k);
  }
  if (spec.algo == "ogd") return std::make_unique<OgdLearner>(k, c, cfg.U);
  if (spec.algo == "fogd")
    return std::make_unique<FogdLearner>(FourierFeatureMap(cfg.B, dimension, sigma, perm_seed), c);
  if (spec.algo == "nogd")
    return std::make_unique<NogdLearner>(k, c, cfg.U, cfg.B, spec.nogd_rank);
  throw ConfigError("unknown algorithm '" + spec.algo + "' (expected pomdr, ogd, fogd or nogd)");
}

void require_positive(const std::vector<double>& values, const std::string& what) {
  if (values.empty()) throw ConfigError(what + " list is empty");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + " values must be positive");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed for " + path.string());
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json optional_json(const std::optional<std::size_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// Options shared by every subcommand that builds a POMDR learner.
struct LearnerOptions {
  double zeta = 2.0 / 3.0;
  std::size_t B = 400;
  std::string B0 = "auto";
  std::size_t M = 15;
  double U = 25.0;
  double ald_scale = 10.0;
  bool check_inverse = false;

  void add(CLI::App* app) {
    app->add_option("--zeta", zeta, "ALD threshold exponent, threshold = ald_scale * T^-zeta")
        ->capture_default_str();
    app->add_option("--B", B, "budget size (even); feature count for fogd, landmarks for nogd")
        ->capture_default_str();
    app->add_option("--B0", B0, "phase-switch budget size, or 'auto' for ceil(15 ln T)")
        ->capture_default_str();
    app->add_option("--M", M, "optimistic window length")->capture_default_str();
    app->add_option("--U", U, "hypothesis ball radius")->capture_default_str();
    app->add_option("--ald-scale", ald_scale, "ALD threshold scale")->capture_default_str();
    app->add_flag("--check-inverse", check_inverse, "verify the tracked inverse after insertions");
  }

  PomdrConfig config(bool& b0_auto) const {
    PomdrConfig cfg;
    cfg.zeta = zeta;
    cfg.B = B;
    cfg.M = M;
    cfg.U = U;
    cfg.ald_scale = ald_scale;
    cfg.check_inverse = check_inverse;
    b0_auto = B0 == "auto";
    if (!b0_auto) {
      std::size_t pos = 0;
      long long v = -1;
      try {
        v = std::stoll(B0, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != B0.size() || v <= 0) throw ConfigError("--B0 must be 'auto' or a positive count");
      cfg.B0 = static_cast<std::size_t>(v);
    }
    return cfg;
  }
};

struct DataOptions {
  std::string path;
  std::string format;
  std::size_t label_column = 0;
  bool label_last = false;
  bool header = false;
  bool scale = false;

  void add(CLI::App* app, const std::string& flag, bool required) {
    auto* o = app->add_option(flag, path, "dataset path (.gz is decompressed)");
    if (required) o->required();
    app->add_option("--format", format, "libsvm | csv (default: from the file name)");
    app->add_option("--label-column", label_column, "csv label column (0-based)");
    app->add_flag("--label-last", label_last, "csv label is the last column");
    app->add_flag("--header", header, "csv has a header row");
    app->add_flag("--scale", scale, "min-max scale features to [0, 1]");
  }

  DataSpec spec(const std::string& p) const {
    DataSpec s;
    s.path = p;
    if (!format.empty()) {
      if (format == "libsvm") s.format = DataFormat::libsvm;
      else if (format == "csv") s.format = DataFormat::csv;
      else throw ConfigError("--format must be libsvm or csv");
    }
    s.csv.label_column = label_column;
    s.csv.label_last = label_last;
    s.csv.has_header = header;
    s.scale = scale;
    return s;
  }
};

nlohmann::json data_json(const DataSpec& spec, const Dataset& ds) {
  return {{"path", spec.path},
          {"format", infer_format(spec.path) == DataFormat::csv && !spec.format ? "csv"
                     : spec.format == DataFormat::csv                          ? "csv"
                                                                               : "libsvm"},
          {"name", ds.name},
          {"T", ds.size()},
          {"dimension", ds.dimension},
          {"scaled", spec.scale}};
}

// ---------------------------------------------------------------- run

int cmd_run(const ExperimentSpec& spec, const DataSpec& data, const std::string& out_dir,
            bool timing, std::ostream& out) {
  const Dataset ds = load(data);
  const ExperimentResult res = run_experiment(ds, spec);
  nlohmann::json config = experiment_config_json(spec, ds, res);
  config["data"] = data_json(data, ds);

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir + ": " + ec.message());

  std::ostringstream csv;
  csv << csv_header() << '\n';
  nlohmann::json grid = nlohmann::json::array();
  for (std::size_t g = 0; g < res.grid.size(); ++g) {
    const auto& gp = res.grid[g];
    const std::size_t sigma_index = g / (res.grid.size() / spec.sigmas.size());
    for (std::size_t p = 0; p < gp.runs.size(); ++p) {
      const auto& rep = gp.runs[p];
      nlohmann::json j = {{"schema", kReportSchema}, {"kind", "run"},     {"config", config},
                          {"sigma", gp.sigma},       {"c", gp.c},         {"perm", p},
                          {"perm_seed", res.perm_seeds[p]},
                          {"report", to_json(rep, timing)}};
      const std::string name = spec.algo + "-" + ds.name + "-s" + format_double(gp.sigma) +
                               "-c" + format_double(gp.c) + "-p" + std::to_string(p) + ".json";
      write_text(dir / name, dump(j));

      CsvRow row;
      row.algo = spec.algo;
      row.dataset = ds.name;
      row.sigma = gp.sigma;
      row.zeta = spec.pomdr.zeta;
      row.B = spec.pomdr.B;
      row.B0 = res.B0;
      row.M = spec.pomdr.M;
      row.U = spec.pomdr.U;
      row.c = gp.c;
      row.seed = spec.seed;
      row.perm = p;
      row.amr = rep.amr;
      if (timing) row.time_s = rep.wall_time_seconds;
      row.A_T = res.alignment[sigma_index];
      row.t_bar = rep.t_bar;
      row.restarts = rep.restart_times.size();
      csv << csv_line(row) << '\n';
    }
    nlohmann::json entry = {{"sigma", gp.sigma}, {"c", gp.c},        {"perms", gp.runs.size()},
                            {"amr_mean", gp.amr_mean}, {"amr_sd", gp.amr_sd}};
    if (timing) {
      entry["time_mean"] = gp.time_mean;
      entry["time_sd"] = gp.time_sd;
    }
    if (res.alignment[sigma_index]) entry["A_T"] = *res.alignment[sigma_index];
    grid.push_back(std::move(entry));
  }
  write_text(dir / "runs.csv", csv.str());

  const auto& best = res.grid[res.best];
  nlohmann::json agg = {{"schema", kReportSchema},
                        {"kind", "aggregate"},
                        {"config", config},
                        {"grid", grid},
                        {"best", {{"sigma", best.sigma},
                                  {"c", best.c},
                                  {"amr_mean", best.amr_mean},
                                  {"amr_sd", best.amr_sd}}}};
  write_text(dir / "aggregate.json", dump(agg));

  out << "algo " << spec.algo << "  dataset " << ds.name << "  T " << ds.size() << "  perms "
      << spec.perms << "  seed " << spec.seed << '\n';
  for (std::size_t g = 0; g < res.grid.size(); ++g) {
    const auto& gp = res.grid[g];
    out << (g == res.best ? "* " : "  ") << "sigma " << format_double(gp.sigma) << "  "
        << (spec.algo == "pomdr" ? "c " : "eta ") << format_double(gp.c) << "  AMR "
        << fixed(100.0 * gp.amr_mean, 2) << "% +- " << fixed(100.0 * gp.amr_sd, 2) << "%";
    if (timing) out << "  time " << fixed(gp.time_mean, 3) << "s +- " << fixed(gp.time_sd, 3) << "s";
    out << '\n';
  }
  out << "reports written to " << out_dir << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- alignment

int cmd_alignment(const ExperimentSpec& spec, const DataSpec& data, std::size_t chunk,
                  const std::string& out_file, std::ostream& out) {
  const Dataset ds = load(data);
  require_positive(spec.sigmas, "--sigma");
  PomdrConfig cfg = spec.pomdr;
  cfg.T = ds.size();
  if (spec.b0_auto) cfg.B0.reset();
  cfg.lr_scale = spec.lr_scales.empty() ? 0.1 : spec.lr_scales.front();
  cfg.validate();

  nlohmann::json results = nlohmann::json::array();
  out << "dataset " << ds.name << "  T " << ds.size() << "  B0 " << cfg.resolved_B0() << '\n';
  out << "sigma        A_T            t_bar\n";
  for (double sigma : spec.sigmas) {
    const Kernel k = Kernel::gaussian(sigma);
    const double a = kernel_alignment(ds, k, chunk, spec.threads);
    std::vector<std::optional<std::size_t>> tbars(spec.perms);
    parallel_for(spec.perms, spec.threads, [&](std::size_t p) {
      const Dataset perm = permute(ds, permutation_seed(spec.seed, p));
      PomdrLearner learner(cfg, k);
      for (const auto& e : perm.examples) {
        learner.step(e.x, e.label);
        if (learner.t_bar()) break;
      }
      tbars[p] = learner.t_bar();
    });
    nlohmann::json tb = nlohmann::json::array();
    std::string text;
    for (const auto& t : tbars) {
      tb.push_back(optional_json(t));
      text += (text.empty() ? "" : ",") + (t ? std::to_string(*t) : std::string("inf"));
    }
    results.push_back({{"sigma", sigma}, {"A_T", a}, {"t_bar", tb}});
    char line[128];
    std::snprintf(line, sizeof line, "%-12s %-14s ", format_double(sigma).c_str(),
                  fixed(a, 3).c_str());
    out << line << text << '\n';
  }
  if (!out_file.empty()) {
    nlohmann::json config = {{"data", data_json(data, ds)},
                             {"sigmas", spec.sigmas},
                             {"zeta", cfg.zeta},
                             {"B", cfg.B},
                             {"B0", cfg.resolved_B0()},
                             {"B0_auto", spec.b0_auto},
                             {"M", cfg.M},
                             {"U", cfg.U},
                             {"lr_scale", cfg.lr_scale},
                             {"ald_scale", cfg.ald_scale},
                             {"perms", spec.perms},
                             {"seed", spec.seed},
                             {"chunk", chunk}};
    write_text(out_file, dump({{"schema", kReportSchema},
                               {"kind", "alignment"},
                               {"config", config},
                               {"results", results}}));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify-budget

struct BudgetOptions {
  std::vector<std::string> decays{"exp"};
  std::vector<double> rs{0.5};
  std::vector<double> ps{2.0};
  std::vector<std::size_t> ns{512};
  std::optional<double> R0;
  double zeta = 1.0;
  std::optional<double> alpha;
  std::uint64_t seed = kDefaultSeed;
  std::string out_file;
};

int cmd_verify_budget(const BudgetOptions& o, std::size_t threads, std::ostream& out) {
  struct Job {
    SpectrumProfile profile;
    std::size_t n;
  };
  std::vector<Job> jobs;
  for (const auto& d : o.decays) {
    const bool exp = d == "exp" || d == "exponential";
    if (!exp && d != "poly" && d != "polynomial")
      throw ConfigError("--decay must be exp or poly");
    for (double rate : exp ? o.rs : o.ps)
      for (std::size_t n : o.ns) {
        if (n == 0 || n > kMaxEigenSize)
          throw ConfigError("--n must lie in [1, " + std::to_string(kMaxEigenSize) + "]");
        SpectrumProfile prof{exp ? Decay::exponential : Decay::polynomial,
                             o.R0 ? *o.R0 : static_cast<double>(n), rate};
        try {
          prof.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        jobs.push_back({prof, n});
      }
  }
  if (!(o.zeta > 0.0)) throw ConfigError("--zeta must be positive");
  if (o.alpha && !(*o.alpha > 0.0)) throw ConfigError("--alpha must be positive");

  std::vector<BudgetBoundReport> reports(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto& j = jobs[i];
    reports[i] = o.alpha ? budget_bound_harness(j.profile, j.n, *o.alpha, o.seed)
                         : budget_bound_harness_relative(
                               j.profile, j.n,
                               std::pow(static_cast<double>(j.n), -2.0 * o.zeta), o.seed);
  });

  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.report.satisfied;
    arr.push_back(to_json(r));
    const bool exp = r.profile.decay == Decay::exponential;
    out << (exp ? "exp  r=" : "poly p=") << format_double(r.profile.rate) << "  n=" << r.n
        << "  alpha=" << format_double(r.alpha) << "  |S|=" << r.budget_size
        << "  bound=" << fixed(r.report.bound_value, 3) << "  slack=" << fixed(r.report.slack, 3)
        << "  " << (r.report.satisfied ? "satisfied" : "VIOLATED") << '\n';
  }
  out << (all ? "all bounds satisfied" : "some bounds violated") << '\n';
  if (!o.out_file.empty()) {
    nlohmann::json config = {{"decays", o.decays}, {"r", o.rs},       {"p", o.ps},
                             {"n", o.ns},          {"zeta", o.zeta},  {"seed", o.seed},
                             {"R0", o.R0 ? nlohmann::json(*o.R0) : nlohmann::json("n")},
                             {"alpha", o.alpha ? nlohmann::json(*o.alpha)
                                               : nlohmann::json("D*n^(-2*zeta)")}};
    write_text(o.out_file, dump({{"schema", kReportSchema},
                                 {"kind", "verify-budget"},
                                 {"config", config},
                                 {"results", arr},
                                 {"all_satisfied", all}}));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- batch

struct BatchOptions {
  std::string test_path;
  double split = 0.8;
  std::size_t r_seeds = 5;
  std::optional<std::size_t> r;
  std::string out_file;
};

int cmd_batch(const ExperimentSpec& spec, const DataSpec& data, const DataOptions& dopt,
              const BatchOptions& b, std::ostream& out) {
  if (spec.sigmas.size() != 1) throw ConfigError("batch takes exactly one --sigma");
  require_positive(spec.sigmas, "--sigma");
  if (b.r_seeds == 0) throw ConfigError("--r-seeds must be positive");
  Dataset train;
  Dataset test;
  if (!b.test_path.empty()) {
    train = permute(load(data), spec.seed);
    test = load(dopt.spec(b.test_path));
    const std::size_t d = std::max(train.dimension, test.dimension);
    pad_to_dimension(train, d);
    pad_to_dimension(test, d);
  } else {
    std::tie(train, test) = split(permute(load(data), spec.seed), b.split);
  }
  PomdrConfig cfg = spec.pomdr;
  cfg.T = train.size();
  if (spec.b0_auto) cfg.B0.reset();
  cfg.lr_scale = spec.lr_scales.empty() ? 0.1 : spec.lr_scales.front();
  cfg.validate();
  const Kernel k = Kernel::gaussian(spec.sigmas.front());

  std::vector<BatchResult> results(b.r_seeds);
  parallel_for(b.r_seeds, spec.threads, [&](std::size_t i) {
    results[i] = online_to_batch(cfg, k, train, test, spec.seed + i, b.r);
  });
  std::vector<double> errors;
  std::vector<double> risks;
  nlohmann::json arr = nlohmann::json::array();
  out << "train " << train.size() << "  test " << test.size() << '\n';
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    errors.push_back(r.test_error_rate);
    risks.push_back(r.test_hinge_risk);
    auto j = to_json(r);
    j["r_seed"] = spec.seed + i;
    arr.push_back(std::move(j));
    out << "r_seed " << spec.seed + i << "  r " << r.r << "  test error "
        << fixed(100.0 * r.test_error_rate, 2) << "%  hinge risk " << fixed(r.test_hinge_risk, 4)
        << '\n';
  }
  const auto [em, es] = mean_and_stddev(errors);
  const auto [hm, hs] = mean_and_stddev(risks);
  out << "mean test error " << fixed(100.0 * em, 2) << "% +- " << fixed(100.0 * es, 2)
      << "%  mean hinge risk " << fixed(hm, 4) << " +- " << fixed(hs, 4) << '\n';
  if (!b.out_file.empty()) {
    nlohmann::json config = {{"data", data_json(data, train)},
                             {"test", b.test_path.empty() ? nlohmann::json(nullptr)
                                                          : nlohmann::json(b.test_path)},
                             {"split", b.test_path.empty() ? nlohmann::json(b.split)
                                                           : nlohmann::json(nullptr)},
                             {"sigma", spec.sigmas.front()},
                             {"zeta", cfg.zeta},
                             {"B", cfg.B},
                             {"B0", cfg.resolved_B0()},
                             {"M", cfg.M},
                             {"U", cfg.U},
                             {"lr_scale", cfg.lr_scale},
                             {"ald_scale", cfg.ald_scale},
                             {"seed", spec.seed},
                             {"r_seeds", b.r_seeds},
                             {"r", b.r ? nlohmann::json(*b.r) : nlohmann::json(nullptr)}};
    write_text(b.out_file, dump({{"schema", kReportSchema},
                                 {"kind", "batch"},
                                 {"config", config},
                                 {"results", arr},
                                 {"aggregate",
                                  {{"test_error_mean", em},
                                   {"test_error_sd", es},
                                   {"hinge_risk_mean", hm},
                                   {"hinge_risk_sd", hs}}}}));
  }
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------- shared pieces

std::size_t worker_count() {
  if (const char* env = std::getenv("OKL_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) throw ConfigError("OKL_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t width = std::min(std::max<std::size_t>(threads, 1), n);
  for (std::size_t t = 1; t < width; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

DataFormat infer_format(const std::string& path) {
  std::string p = path;
  if (p.size() > 3 && p.ends_with(".gz")) p.resize(p.size() - 3);
  return p.ends_with(".csv") || p.ends_with(".data") ? DataFormat::csv : DataFormat::libsvm;
}

Dataset load(const DataSpec& spec) {
  Dataset ds = load_dataset(spec.path, spec.format.value_or(infer_format(spec.path)), spec.csv);
  return spec.scale ? minmax_scale(ds) : ds;
}

std::vector<double> default_sigma_grid() {
  std::vector<double> g;
  for (int e = -2; e <= 6; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

std::uint64_t permutation_seed(std::uint64_t seed, std::size_t perm) { return seed + perm; }

ExperimentResult run_experiment(const Dataset& ds, const ExperimentSpec& spec) {
  if (ds.empty()) throw DataError("dataset is empty");
  if (spec.perms == 0) throw ConfigError("--perms must be positive");
  require_positive(spec.sigmas, "--sigma");
  const bool pomdr = spec.algo == "pomdr";
  if (!pomdr && spec.algo != "ogd" && spec.algo != "fogd" && spec.algo != "nogd")
    throw ConfigError("unknown algorithm '" + spec.algo + "' (expected pomdr, ogd, fogd or nogd)");

  PomdrConfig cfg = spec.pomdr;
  cfg.T = ds.size();
  if (spec.b0_auto) cfg.B0.reset();
  if (pomdr) {
    cfg.validate();
  } else {
    if (!(cfg.U > 0.0)) throw ConfigError("U must be positive");
    if (cfg.B == 0) throw ConfigError("B must be positive");
    if (spec.algo == "nogd" && spec.nogd_rank > cfg.B) throw ConfigError("--nogd-rank exceeds B");
  }
  const std::vector<double> cs =
      pomdr ? spec.lr_scales : (spec.etas.empty() ? stepsize_grid(ds.size()) : spec.etas);
  require_positive(cs, pomdr ? "--lr-scale" : "--eta");

  ExperimentResult res;
  res.T = ds.size();
  res.B0 = pomdr ? cfg.resolved_B0() : 0;
  for (double s : spec.sigmas)
    for (double c : cs) {
      GridPoint gp;
      gp.sigma = s;
      gp.c = c;
      gp.runs.resize(spec.perms);
      res.grid.push_back(std::move(gp));
    }
  for (std::size_t p = 0; p < spec.perms; ++p)
    res.perm_seeds.push_back(permutation_seed(spec.seed, p));
  res.alignment.assign(spec.sigmas.size(), std::nullopt);
  if (spec.alignment)
    for (std::size_t s = 0; s < spec.sigmas.size(); ++s)
      res.alignment[s] = kernel_alignment(ds, Kernel::gaussian(spec.sigmas[s]), 1024, spec.threads);

  RunOptions options;
  options.norm_check_every = spec.norm_check_every;
  parallel_for(spec.perms, spec.threads, [&](std::size_t p) {
    const Dataset perm = permute(ds, res.perm_seeds[p]);
    for (std::size_t g = 0; g < res.grid.size(); ++g) {
      auto& gp = res.grid[g];
      auto learner = make_learner(spec, cfg, gp.sigma, gp.c, ds.dimension, res.perm_seeds[p]);
      RunReport rep = run_stream(*learner, perm, options);
      rep.dataset = ds.name;
      rep.alignment = res.alignment[g / cs.size()];
      gp.runs[p] = std::move(rep);
    }
  });

  for (std::size_t g = 0; g < res.grid.size(); ++g) {
    auto& gp = res.grid[g];
    std::vector<double> amr;
    std::vector<double> time;
    for (const auto& r : gp.runs) {
      amr.push_back(r.amr);
      time.push_back(r.wall_time_seconds);
    }
    std::tie(gp.amr_mean, gp.amr_sd) = mean_and_stddev(amr);
    std::tie(gp.time_mean, gp.time_sd) = mean_and_stddev(time);
    if (gp.amr_mean < res.grid[res.best].amr_mean) res.best = g;
  }
  return res;
}

nlohmann::json experiment_config_json(const ExperimentSpec& spec, const Dataset& ds,
                                      const ExperimentResult& res) {
  const bool pomdr = spec.algo == "pomdr";
  nlohmann::json cs = nlohmann::json::array();
  for (std::size_t g = 0; g < res.grid.size() / std::max<std::size_t>(1, spec.sigmas.size()); ++g)
    cs.push_back(res.grid[g].c);
  nlohmann::json j = {{"algo", spec.algo},
                      {"dataset", ds.name},
                      {"T", ds.size()},
                      {"sigmas", spec.sigmas},
                      {"zeta", spec.pomdr.zeta},
                      {"B", spec.pomdr.B},
                      {"M", spec.pomdr.M},
                      {"U", spec.pomdr.U},
                      {"ald_scale", spec.pomdr.ald_scale},
                      {"perms", spec.perms},
                      {"seed", spec.seed},
                      {"perm_seeds", res.perm_seeds},
                      {"norm_check_every", spec.norm_check_every},
                      {"alignment", spec.alignment}};
  if (pomdr) {
    j["B0"] = res.B0;
    j["B0_auto"] = spec.b0_auto;
    j["lr_scales"] = cs;
    j["ald_threshold"] = spec.pomdr.ald_scale * std::pow(static_cast<double>(ds.size()), -spec.pomdr.zeta);
    j["check_inverse"] = spec.pomdr.check_inverse;
  } else {
    j["etas"] = cs;
    if (spec.algo == "fogd") j["feature_seed"] = "perm_seed";
    if (spec.algo == "nogd")
      j["nogd_rank"] = spec.nogd_rank == 0 ? std::max<std::size_t>(1, spec.pomdr.B / 5) : spec.nogd_rank;
  }
  return j;
}

// ---------------------------------------------------------------- entry point

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budgeted online kernel learning with optimistic mirror descent"};
  app.require_subcommand(1);

  LearnerOptions learner;
  DataOptions data;
  std::string algo = "pomdr";
  std::vector<double> sigmas;
  std::vector<double> lr_scales;
  std::vector<double> etas;
  std::size_t perms = 10;
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
  std::size_t nogd_rank = 0;
  std::size_t norm_every = 100;
  bool with_alignment = false;
  bool omit_timing = false;
  std::size_t chunk = 1024;
  BudgetOptions budget;
  BatchOptions batch;

  auto* run = app.add_subcommand("run", "run a learner over seeded permutations of a dataset");
  run->add_option("--algo", algo, "pomdr | ogd | fogd | nogd")->capture_default_str();
  data.add(run, "--data", true);
  run->add_option("--sigma", sigmas, "Gaussian kernel width(s); default 2^-2 .. 2^6");
  learner.add(run);
  run->add_option("--lr-scale", lr_scales, "POMDR learning-rate scale(s) c; default 0.05 0.1");
  run->add_option("--eta", etas, "baseline stepsize(s); default 10^-3..3 / sqrt(T)");
  run->add_option("--perms", perms, "number of permutations")->capture_default_str();
  run->add_option("--seed", seed, "base seed; permutation p uses seed + p")->capture_default_str();
  run->add_option("--out", out_path, "output directory")->required();
  run->add_option("--nogd-rank", nogd_rank, "Nystrom rank (default B/5)");
  run->add_option("--norm-check-every", norm_every, "dense norm recheck period, 0 disables")
      ->capture_default_str();
  run->add_flag("--alignment", with_alignment, "also compute A_T (O(T^2) kernel evaluations)");
  run->add_flag("--omit-timing", omit_timing, "leave wall time out of reports");

  auto* align = app.add_subcommand("alignment", "A_T and the phase-switch round per sigma");
  data.add(align, "--data", true);
  align->add_option("--sigma", sigmas, "Gaussian kernel width(s); default 2^-2 .. 2^6");
  learner.add(align);
  align->add_option("--lr-scale", lr_scales, "learning-rate scale c (default 0.1)");
  align->add_option("--perms", perms, "permutations for the t_bar pass")->capture_default_str();
  align->add_option("--seed", seed, "base seed")->capture_default_str();
  align->add_option("--chunk", chunk, "row block size for A_T")->capture_default_str();
  align->add_option("--out", out_path, "JSON report file");

  auto* verify = app.add_subcommand("verify-budget", "ALD budget size against the eigen-decay bound");
  verify->add_option("--decay", budget.decays, "exp | poly (repeatable)")->capture_default_str();
  verify->add_option("--r", budget.rs, "exponential rate(s)")->capture_default_str();
  verify->add_option("--p", budget.ps, "polynomial degree(s)")->capture_default_str();
  verify->add_option("--n", budget.ns, "matrix size(s)")->capture_default_str();
  verify->add_option("--R0", budget.R0, "spectrum scale (default n)");
  verify->add_option("--zeta", budget.zeta, "alpha = D * n^(-2 zeta) unless --alpha is given")
      ->capture_default_str();
  verify->add_option("--alpha", budget.alpha, "absolute ALD projection-error level");
  verify->add_option("--seed", budget.seed, "seed of the random eigenbasis")->capture_default_str();
  verify->add_option("--out", budget.out_file, "JSON report file");

  auto* bat = app.add_subcommand("batch", "online-to-batch conversion with held-out risk");
  data.add(bat, "--data", true);
  bat->add_option("--test", batch.test_path, "held-out set (default: split --data)");
  bat->add_option("--split", batch.split, "train fraction when --test is absent")
      ->capture_default_str();
  bat->add_option("--sigma", sigmas, "Gaussian kernel width")->required();
  learner.add(bat);
  bat->add_option("--lr-scale", lr_scales, "learning-rate scale c (default 0.1)");
  bat->add_option("--r-seeds", batch.r_seeds, "number of r draws")->capture_default_str();
  bat->add_option("--r", batch.r, "fixed round r in [1, T] instead of a random draw");
  bat->add_option("--seed", seed, "seed for the split permutation and r draws")
      ->capture_default_str();
  bat->add_option("--out", batch.out_file, "JSON report file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (app.get_subcommands().empty()) err << app.help();
    return kExitConfig;
  }

  try {
    ExperimentSpec spec;
    spec.threads = worker_count();
    spec.algo = algo;
    spec.sigmas = sigmas.empty() ? default_sigma_grid() : sigmas;
    spec.pomdr = learner.config(spec.b0_auto);
    if (!lr_scales.empty()) spec.lr_scales = lr_scales;
    spec.etas = etas;
    spec.perms = perms;
    spec.seed = seed;
    spec.nogd_rank = nogd_rank;
    spec.norm_check_every = norm_every;
    spec.alignment = with_alignment;

    if (run->parsed()) return cmd_run(spec, data.spec(data.path), out_path, !omit_timing, out);
    if (align->parsed()) {
      if (lr_scales.empty()) spec.lr_scales = {0.1};
      return cmd_alignment(spec, data.spec(data.path), chunk, out_path, out);
    }
    if (verify->parsed()) return cmd_verify_budget(budget, spec.threads, out);
    if (lr_scales.empty()) spec.lr_scales = {0.1};
    return cmd_batch(spec, data.spec(data.path), data, batch, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace okl::cli
