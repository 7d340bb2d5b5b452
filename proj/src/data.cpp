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

#include "okl/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "okl/errors.hpp"

namespace okl {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_index(std::string_view s, std::size_t& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void fail_line(const std::string& what, std::size_t line) {
  throw DataError(what + " at line " + std::to_string(line));
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         std::string_view(s).substr(s.size() - suffix.size()) == suffix;
}

Dataset assemble(std::vector<std::vector<std::pair<std::size_t, double>>>& rows,
                 const std::vector<double>& raw_labels, std::size_t dimension,
                 const std::string& name) {
  const auto labels = normalize_labels(raw_labels);
  Dataset ds;
  ds.name = name;
  ds.dimension = dimension;
  ds.examples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
    for (const auto& [idx, v] : rows[i]) x[static_cast<Eigen::Index>(idx)] = v;
    ds.examples.push_back(LabeledExample{Instance::dense(std::move(x)), labels[i], i});
  }
  return ds;
}

}  // namespace

std::vector<Instance> Dataset::instances() const {
  std::vector<Instance> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.x);
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.label);
  return out;
}

std::vector<int> normalize_labels(const std::vector<double>& raw) {
  const std::set<double> seen(raw.begin(), raw.end());
  auto within = [&](std::initializer_list<double> allowed) {
    return std::all_of(seen.begin(), seen.end(), [&](double v) {
      return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
    });
  };
  std::vector<int> out(raw.size());
  if (within({-1.0, 1.0})) {
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] > 0 ? 1 : -1;
  } else if (within({1.0, 2.0})) {
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] == 1.0 ? 1 : -1;
  } else if (within({0.0, 1.0})) {
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] == 1.0 ? 1 : -1;
  } else {
    std::ostringstream msg;
    msg << "labels cannot be mapped to {-1,+1}; observed values:";
    std::size_t shown = 0;
    for (double v : seen) {
      if (shown++ == 6) {
        msg << " ...";
        break;
      }
      msg << ' ' << v;
    }
    throw DataError(msg.str());
  }
  return out;
}

Dataset parse_libsvm(std::istream& in, const std::string& name) {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<double> labels;
  std::size_t dimension = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < view.size()) {
      const auto start = view.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto end = view.find_first_of(" \t", start);
      if (end == std::string_view::npos) end = view.size();
      tokens.push_back(view.substr(start, end - start));
      pos = end;
    }
    double label = 0.0;
    if (!parse_double(tokens.front(), label)) fail_line("malformed label", line_no);

    std::vector<std::pair<std::size_t, double>> row;
    std::size_t last = 0;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto colon = tokens[i].find(':');
      if (colon == std::string_view::npos) fail_line("expected <index>:<value>", line_no);
      std::size_t idx = 0;
      double value = 0.0;
      if (!parse_index(tokens[i].substr(0, colon), idx) || idx == 0)
        fail_line("malformed feature index", line_no);
      if (!parse_double(tokens[i].substr(colon + 1), value))
        fail_line("malformed feature value", line_no);
      if (idx <= last) fail_line("feature indices must be ascending", line_no);
      last = idx;
      row.emplace_back(idx - 1, value);
    }
    dimension = std::max(dimension, last);
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw DataError("libsvm input contains no examples");
  return assemble(rows, labels, dimension, name);
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& name) {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<double> labels;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.has_header;
  std::size_t label_column = options.label_column;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
      const auto comma = view.find(',', pos);
      cells.push_back(view.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (width == 0) {
      width = cells.size();
      if (options.label_last) label_column = width - 1;
      if (label_column >= width)
        fail_line("label column " + std::to_string(label_column) +
                      " outside a row of " + std::to_string(width) + " cells",
                  line_no);
    } else if (cells.size() != width) {
      fail_line("ragged row (" + std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(width) + ")",
                line_no);
    }
    std::vector<std::pair<std::size_t, double>> row;
    double label = 0.0;
    std::size_t feature = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v))
        fail_line("non-numeric cell in column " + std::to_string(c), line_no);
      if (c == label_column)
        label = v;
      else
        row.emplace_back(feature++, v);
    }
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw DataError("csv input contains no examples");
  return assemble(rows, labels, width - 1, name);
}

std::string read_file(const std::string& path) {
  if (ends_with(path, ".gz")) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (!file) throw DataError("cannot open " + path);
    std::string out;
    char buffer[1 << 16];
    int n = 0;
    while ((n = gzread(file, buffer, sizeof buffer)) > 0) out.append(buffer, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(file);
    if (failed) throw DataError("corrupt gzip stream in " + path);
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load_dataset(const std::string& path, DataFormat format, const CsvOptions& csv) {
  std::istringstream in(read_file(path));
  std::string name = path.substr(path.find_last_of('/') == std::string::npos
                                     ? 0
                                     : path.find_last_of('/') + 1);
  for (std::string_view ext : {".gz", ".libsvm", ".svm", ".txt", ".csv", ".data"})
    if (ends_with(name, ext)) name.resize(name.size() - ext.size());
  return format == DataFormat::libsvm ? parse_libsvm(in, name) : parse_csv(in, csv, name);
}

void write_libsvm(const Dataset& ds, std::ostream& out) {
  out << std::setprecision(17);
  for (const auto& e : ds.examples) {
    out << (e.label > 0 ? "+1" : "-1");
    for (Eigen::Index j = 0; j < e.x.features.size(); ++j)
      if (e.x.features[j] != 0.0) out << ' ' << (j + 1) << ':' << e.x.features[j];
    out << '\n';
  }
}

void write_csv(const Dataset& ds, std::ostream& out) {
  out << std::setprecision(17);
  for (const auto& e : ds.examples) {
    out << e.label;
    for (Eigen::Index j = 0; j < e.x.features.size(); ++j) out << ',' << e.x.features[j];
    out << '\n';
  }
}

Dataset permute(const Dataset& ds, std::uint64_t seed) {
  Dataset out = ds;
  std::mt19937_64 rng(seed);
  for (std::size_t i = out.examples.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(i, rng));
    std::swap(out.examples[i - 1], out.examples[j]);
  }
  return out;
}

Dataset minmax_scale(const Dataset& ds) {
  Dataset out = ds;
  if (ds.empty()) return out;
  const auto d = static_cast<Eigen::Index>(ds.dimension);
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const auto& e : ds.examples) {
    lo = lo.cwiseMin(e.x.features);
    hi = hi.cwiseMax(e.x.features);
  }
  for (auto& e : out.examples)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double range = hi[j] - lo[j];
      e.x.features[j] = range > 0.0 ? (e.x.features[j] - lo[j]) / range : 0.0;
    }
  return out;
}

void pad_to_dimension(Dataset& ds, std::size_t dimension) {
  if (dimension < ds.dimension) throw std::invalid_argument("pad_to_dimension: would truncate");
  const auto d = static_cast<Eigen::Index>(dimension);
  for (auto& e : ds.examples) {
    const auto old = e.x.features.size();
    if (old == d) continue;
    e.x.features.conservativeResize(d);
    e.x.features.tail(d - old).setZero();
  }
  ds.dimension = dimension;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split fraction must lie in (0, 1)");
  const auto cut = static_cast<std::size_t>(std::round(fraction * static_cast<double>(ds.size())));
  Dataset train{{}, ds.dimension, ds.name + "-train"};
  Dataset test{{}, ds.dimension, ds.name + "-test"};
  train.examples.assign(ds.examples.begin(), ds.examples.begin() + static_cast<std::ptrdiff_t>(cut));
  test.examples.assign(ds.examples.begin() + static_cast<std::ptrdiff_t>(cut), ds.examples.end());
  if (train.empty() || test.empty()) throw ConfigError("split leaves an empty part");
  return {std::move(train), std::move(test)};
}

}  // namespace okl
