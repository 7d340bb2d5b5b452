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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "okl/kernel.hpp"

namespace okl {

struct LabeledExample {
  Instance x;  // dense features
  int label = 1;
  std::size_t source_index = 0;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  std::size_t dimension = 0;
  std::string name;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  std::vector<Instance> instances() const;
  std::vector<int> labels() const;
};

enum class DataFormat { libsvm, csv };

// Maps a raw label set onto {-1, +1}: {-1,+1} kept, {1,2} -> {+1,-1},
// {0,1} -> {-1,+1}. Throws DataError for anything else.
std::vector<int> normalize_labels(const std::vector<double>& raw);

// "<label> <idx>:<val> ..." with 1-based ascending indices; features are
// densified to the largest index seen. Errors name the offending line.
Dataset parse_libsvm(std::istream& in, const std::string& name = "");

struct CsvOptions {
  std::size_t label_column = 0;
  bool label_last = false;  // overrides label_column with the final cell
  bool has_header = false;
};
Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& name = "");

// Reads a file, transparently gunzipping names ending in ".gz".
std::string read_file(const std::string& path);
Dataset load_dataset(const std::string& path, DataFormat format,
                     const CsvOptions& csv = {});

void write_libsvm(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, std::ostream& out);

// Seeded Fisher-Yates shuffle; identical seeds give identical orders.
Dataset permute(const Dataset& ds, std::uint64_t seed);

// Rescales every feature to [0, 1] using the dataset's own min and max.
Dataset minmax_scale(const Dataset& ds);

// Zero-pads every example to `dimension` features; never truncates.
void pad_to_dimension(Dataset& ds, std::size_t dimension);

// First `fraction` of the examples as train, the rest as test.
std::pair<Dataset, Dataset> split(const Dataset& ds, double fraction);

// Uniform integer in [0, bound) from a 64-bit engine by rejection sampling,
// so results do not depend on the standard library's distributions.
template <class Engine>
std::uint64_t uniform_below(std::uint64_t bound, Engine& rng) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace okl
