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

#include "viv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "viv/errors.hpp"

namespace viv::csv {

bool Table::has_channel(const std::string& name) const {
  for (const auto& c : channels) {
    if (c == name) return true;
  }
  return false;
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == name) return columns[i];
  }
  throw ParameterError("csv: no channel named '" + name + "'");
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  Table t;
  {
    std::stringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) t.channels.push_back(field);
  }
  if (t.channels.empty()) throw ConfigError("csv: missing header in '" + path + "'");
  t.columns.resize(t.channels.size());

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string field;
    std::size_t col = 0;
    while (std::getline(ls, field, ',')) {
      if (col >= t.channels.size()) {
        throw ConfigError("csv: too many fields at row " + std::to_string(row));
      }
      try {
        t.columns[col].push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ConfigError("csv: bad number '" + field + "' at row " +
                          std::to_string(row));
      }
      ++col;
    }
    if (col != t.channels.size()) {
      throw ConfigError("csv: short row " + std::to_string(row));
    }
  }
  return t;
}

void write_table(const std::string& path, const Table& table) {
  if (table.channels.size() != table.columns.size()) {
    throw DimensionError("csv: header/column count mismatch");
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("csv: cannot write '" + path + "'");
  for (std::size_t c = 0; c < table.channels.size(); ++c) {
    std::fprintf(f, "%s%s", c ? "," : "", table.channels[c].c_str());
  }
  std::fprintf(f, "\n");
  const std::size_t n = table.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      std::fprintf(f, "%s%.17g", c ? "," : "", table.columns[c][r]);
    }
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

signals::TimeSeries to_series(const Table& table, const std::string& channel) {
  const auto& time = table.column("time");
  const auto& vals = table.column(channel);
  if (time.size() < 2) throw DimensionError("csv: need at least 2 samples");
  const double dt = time[1] - time[0];
  if (dt <= 0.0) throw ConfigError("csv: non-increasing time column");
  for (std::size_t i = 1; i < time.size(); ++i) {
    const double step = time[i] - time[i - 1];
    if (std::abs(step - dt) > 1e-6 * dt) {
      throw ConfigError("csv: non-uniform sampling at row " +
                        std::to_string(i + 1));
    }
  }
  signals::TimeSeries s;
  s.t0 = time[0];
  s.dt = dt;
  s.values = vals;
  return s;
}

void write_series(const std::string& path, const std::string& name,
                  const signals::TimeSeries& s) {
  Table t;
  t.channels = {"time", name};
  t.columns.resize(2);
  t.columns[0].resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) t.columns[0][i] = s.time(i);
  t.columns[1] = s.values;
  write_table(path, t);
}

}  // namespace viv::csv
