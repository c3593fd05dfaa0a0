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

#include <fstream>

#include <json.hpp>

#include "viv/errors.hpp"
#include "viv/ssmodel.hpp"

namespace viv::ssmodel {

using nlohmann::json;

StateSpaceModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("model: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("model: bad JSON in '" + path + "': " + e.what());
  }
  try {
    const auto n = doc.at("n").get<Eigen::Index>();
    if (n < 0) throw ConfigError("model: /n must be non-negative");
    StateSpaceModel m;
    const auto a = doc.at("A").get<std::vector<double>>();
    const auto b = doc.at("B").get<std::vector<double>>();
    const auto c = doc.at("C").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(a.size()) != n * n ||
        static_cast<Eigen::Index>(b.size()) != n ||
        static_cast<Eigen::Index>(c.size()) != n) {
      throw ConfigError("model: A/B/C sizes inconsistent with /n");
    }
    m.A.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        m.A(i, j) = a[static_cast<std::size_t>(i * n + j)];
      }
    }
    m.B = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
    m.C = Eigen::Map<const Eigen::RowVectorXd>(c.data(), n);
    m.D = doc.at("D").get<double>();
    m.continuous_time = doc.at("continuous_time").get<bool>();
    m.dt = doc.value("dt_identified", 0.0);
    return m;
  } catch (const json::exception& e) {
    throw ConfigError("model: missing or ill-typed field in '" + path +
                      "': " + e.what());
  }
}

void save_model(const std::string& path, const StateSpaceModel& m) {
  const Eigen::Index n = m.order();
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a.push_back(m.A(i, j));
  }
  json doc{{"n", n},
           {"A", a},
           {"B", std::vector<double>(m.B.data(), m.B.data() + n)},
           {"C", std::vector<double>(m.C.data(), m.C.data() + n)},
           {"D", m.D},
           {"continuous_time", m.continuous_time},
           {"dt_identified", m.dt}};
  std::ofstream out(path);
  if (!out) throw ConfigError("model: cannot write '" + path + "'");
  out << doc.dump(2) << "\n";
}

}  // namespace viv::ssmodel
