// Copyright 2026 The vivrom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VIV_CSV_HPP_
#define VIV_CSV_HPP_

#include <string>
#include <vector>

#include "viv/signals.hpp"

namespace viv::csv {

// Column-oriented numeric table. Time-series files use the repo-wide layout
// `time,<channel>[,<channel>...]` with one row per sample.
struct Table {
  std::vector<std::string> channels;
  std::vector<std::vector<double>> columns;  // columns[c][row]

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  bool has_channel(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
};

Table read_table(const std::string& path);

void write_table(const std::string& path, const Table& table);

// Extracts one channel against the `time` column, validating uniform spacing
// with relative tolerance 1e-6.
signals::TimeSeries to_series(const Table& table, const std::string& channel);

// Writes `time,<name>` for a single series.
void write_series(const std::string& path, const std::string& name,
                  const signals::TimeSeries& s);

}  // namespace viv::csv

#endif  // VIV_CSV_HPP_
