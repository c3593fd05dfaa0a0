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

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "test_util.hpp"
#include "viv/csv.hpp"
#include "viv/random.hpp"
#include "viv/signals.hpp"
#include "viv/ssmodel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_viv(const fs::path& dir, const std::string& args) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(VIV_BIN) + " " + args + " >" +
                          out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

json synth_config(double dt, double duration, double noise) {
  json j;
  j["synth"]["dt"] = dt;
  j["synth"]["duration"] = duration;
  if (noise > 0.0) j["synth"]["noise"] = noise;
  j["synth"]["motion"]["amplitudes"] = {0.012, 0.008};
  j["synth"]["motion"]["frequencies"] = {6.5, 9.13};
  j["synth"]["motion"]["phases"] = {0.0, 0.8};
  j["synth"]["vdp"] = {{"mu", 68.29},
                       {"amp", 1.18},
                       {"omega0_sq", 2117.0},
                       {"gain", 70.68},
                       {"forcing_kind", "acceleration"}};
  return j;
}

json simulate_config(int n_elements, double dt, double T, double dcm,
                     double initial_x1) {
  json j;
  j["beam"] = {{"E", 8.894e8},   {"A", 5.7e-4},      {"I", 4.2e-8},
               {"J", 4.2e-8},    {"rho", 1630.0},    {"length", 38.0},
               {"tension", 3000.0}, {"n_elements", n_elements},
               {"rayleigh_a", 2.0}, {"rayleigh_b", 1e-3}};
  j["hydro"] = {{"rho_f", 1000.0}, {"U", 1.2}, {"D", 0.027}, {"St", 0.2}};
  j["vdp"] = {{"mu", 68.29},
              {"amp", 1.18},
              {"omega0_sq", 2117.0},
              {"gain", 70.68},
              {"forcing_kind", "acceleration"}};
  if (initial_x1 != 0.0) j["vdp"]["initial_x1"] = initial_x1;
  j["coupling"] = {{"tol", 1e-6}, {"omega0", 0.7}, {"max_subiter", 50},
                   {"dt", dt},    {"T", T},        {"dcm", dcm}};
  j["output"] = {{"snapshot_stride", 50}, {"spectrum_segment", 64}};
  return j;
}

double column_rms(const std::vector<double>& x) {
  double s = 0.0;
  for (const double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

TEST_CASE("synth is deterministic under a fixed seed") {
  const auto dir = viv::testutil::scratch_dir("cli_synth_seed");
  write_file(dir / "synth.json", synth_config(0.005, 3.0, 0.05).dump(2));
  const std::string base = "synth --config " + (dir / "synth.json").string();

  auto r = run_viv(dir, base + " --out " + (dir / "a").string() + " --seed 7");
  CHECK(r.code == 0);
  r = run_viv(dir, base + " --out " + (dir / "b").string() + " --seed 7");
  CHECK(r.code == 0);
  r = run_viv(dir, base + " --out " + (dir / "c").string() + " --seed 8");
  CHECK(r.code == 0);

  const std::string a = slurp(dir / "a" / "dataset.csv");
  CHECK(a == slurp(dir / "b" / "dataset.csv"));
  CHECK(a != slurp(dir / "c" / "dataset.csv"));
  CHECK(a.rfind("time,d_cf,lc,dc_fluct\n", 0) == 0);
}

TEST_CASE("synth noise scales with the channel rms") {
  const auto dir = viv::testutil::scratch_dir("cli_synth_noise");
  write_file(dir / "clean.json", synth_config(0.005, 3.0, 0.0).dump(2));
  write_file(dir / "noisy.json", synth_config(0.005, 3.0, 0.05).dump(2));

  auto r = run_viv(dir, "synth --config " + (dir / "clean.json").string() +
                            " --out " + (dir / "clean").string());
  REQUIRE(r.code == 0);
  r = run_viv(dir, "synth --config " + (dir / "noisy.json").string() +
                       " --out " + (dir / "noisy").string() + " --seed 3");
  REQUIRE(r.code == 0);

  const auto clean = viv::csv::read_table((dir / "clean" / "dataset.csv").string());
  const auto noisy = viv::csv::read_table((dir / "noisy" / "dataset.csv").string());
  const auto& c = clean.column("d_cf");
  const auto& n = noisy.column("d_cf");
  REQUIRE(c.size() == n.size());
  std::vector<double> diff(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) diff[i] = n[i] - c[i];
  const double want_sigma = 0.05 * column_rms(c);
  CHECK(column_rms(diff) == doctest::Approx(want_sigma).epsilon(0.15));
}

TEST_CASE("synth with zero motion leaves the autonomous oscillator") {
  const auto dir = viv::testutil::scratch_dir("cli_synth_quiet");
  json j = synth_config(0.001, 3.0, 0.0);
  j["synth"]["motion"]["amplitudes"] = {0.0};
  j["synth"]["motion"]["frequencies"] = {1.0};
  j["synth"]["motion"]["phases"] = {0.0};
  write_file(dir / "synth.json", j.dump(2));

  const auto r = run_viv(dir, "synth --config " + (dir / "synth.json").string() +
                                  " --out " + dir.string());
  REQUIRE(r.code == 0);
  const auto table = viv::csv::read_table((dir / "dataset.csv").string());
  for (const double v : table.column("d_cf")) CHECK(v == 0.0);
  for (const double v : table.column("dc_fluct")) CHECK(v == 0.0);
  double peak = 0.0;
  for (const double v : table.column("lc")) peak = std::max(peak, std::abs(v));
  CHECK(peak > 1.0);
}

TEST_CASE("unknown config keys are rejected with their location") {
  const auto dir = viv::testutil::scratch_dir("cli_badkey");
  json j = synth_config(0.01, 1.0, 0.0);
  j["synth"]["typo"] = 1;
  write_file(dir / "synth.json", j.dump(2));

  const auto r = run_viv(dir, "synth --config " + (dir / "synth.json").string() +
                                  " --out " + dir.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("/synth/typo") != std::string::npos);
  CHECK(r.err.find("unknown key") != std::string::npos);
}

TEST_CASE("identify recovers the generating oscillator from a dataset") {
  const auto dir = viv::testutil::scratch_dir("cli_identify");
  write_file(dir / "synth.json", synth_config(0.001, 8.0, 0.0).dump(2));
  auto r = run_viv(dir, "synth --config " + (dir / "synth.json").string() +
                            " --out " + dir.string());
  REQUIRE(r.code == 0);

  json ident;
  ident["identify"]["data"] = (dir / "dataset.csv").string();
  write_file(dir / "ident.json", ident.dump(2));
  r = run_viv(dir, "identify --config " + (dir / "ident.json").string() +
                       " --out " + (dir / "fit").string() +
                       " --variant acceleration");
  CHECK(r.code == 0);

  const json rep = json::parse(slurp(dir / "fit" / "report_acceleration.json"));
  CHECK(rep.at("variant") == "acceleration");
  CHECK(rep.at("best_fit_percent").get<double>() >= 99.0);
  CHECK(rep.at("converged").get<bool>());

  const json vdp = json::parse(slurp(dir / "fit" / "vdp_acceleration.json"));
  CHECK(vdp.at("omega0_sq").get<double>() ==
        doctest::Approx(2117.0).epsilon(0.02));
  CHECK(vdp.at("gain").get<double>() == doctest::Approx(70.68).epsilon(0.05));
}

TEST_CASE("identify reports a missing channel as a config error") {
  const auto dir = viv::testutil::scratch_dir("cli_identify_missing");
  viv::signals::TimeSeries s;
  s.t0 = 0.0;
  s.dt = 0.01;
  s.values.assign(200, 0.5);
  viv::csv::write_series((dir / "partial.csv").string(), "d_cf", s);

  json ident;
  ident["identify"]["data"] = (dir / "partial.csv").string();
  write_file(dir / "ident.json", ident.dump(2));
  const auto r = run_viv(dir, "identify --config " +
                                  (dir / "ident.json").string() + " --out " +
                                  dir.string() + " --variant acceleration");
  CHECK(r.code == 1);
  CHECK(r.err.find("no channel 'lc'") != std::string::npos);
}

TEST_CASE("simulate without a lift seed stays quiet") {
  const auto dir = viv::testutil::scratch_dir("cli_sim_quiet");
  write_file(dir / "sim.json", simulate_config(8, 0.01, 0.3, 0.0, 0.0).dump(2));
  const auto r = run_viv(dir, "simulate --config " +
                                  (dir / "sim.json").string() + " --out " +
                                  (dir / "out").string());
  REQUIRE(r.code == 0);

  const auto mid = viv::csv::read_table(
      (dir / "out" / "midpoint_trajectory.csv").string());
  for (const double v : mid.column("d_IL")) CHECK(v == 0.0);
  for (const double v : mid.column("d_CF")) CHECK(v == 0.0);

  const json summary = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(summary.at("static_il_mid").get<double>() == 0.0);
  CHECK(fs::exists(dir / "out" / "nodes_000000.csv"));
  CHECK(fs::exists(dir / "out" / "midpoint_spectrum_cf.csv"));
}

TEST_CASE("simulate reports coupling failure with diagnostics") {
  const auto dir = viv::testutil::scratch_dir("cli_sim_fail");
  json j = simulate_config(4, 0.01, 0.5, 0.0, 0.01);
  j["coupling"]["max_subiter"] = 1;
  j["coupling"]["tol"] = 1e-30;
  write_file(dir / "sim.json", j.dump(2));

  const auto r = run_viv(dir, "simulate --config " +
                                  (dir / "sim.json").string() + " --out " +
                                  (dir / "out").string());
  CHECK(r.code == 3);
  CHECK(r.err.find("coupling failed") != std::string::npos);
  const std::string diag = slurp(dir / "out" / "diagnostics.txt");
  CHECK(diag.find("no convergence") != std::string::npos);
}

TEST_CASE("simulate output is reproducible byte for byte") {
  const auto dir = viv::testutil::scratch_dir("cli_sim_repeat");
  write_file(dir / "sim.json",
             simulate_config(8, 0.005, 0.5, 2.34, 0.01).dump(2));
  const std::string base = "simulate --config " + (dir / "sim.json").string();

  auto r = run_viv(dir, base + " --out " + (dir / "a").string());
  REQUIRE(r.code == 0);
  r = run_viv(dir, base + " --out " + (dir / "b").string());
  REQUIRE(r.code == 0);

  for (const char* name :
       {"midpoint_trajectory.csv", "nodes_000000.csv", "nodes_000001.csv",
        "nodes_000002.csv", "summary.json", "midpoint_spectrum_cf.csv"}) {
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  // The run actually produced motion, so the comparison is not vacuous.
  const auto mid = viv::csv::read_table(
      (dir / "a" / "midpoint_trajectory.csv").string());
  CHECK(column_rms(mid.column("d_IL")) > 0.0);
}

TEST_CASE("spectrum locates a pure tone") {
  const auto dir = viv::testutil::scratch_dir("cli_spectrum");
  viv::signals::TimeSeries s;
  s.t0 = 0.0;
  s.dt = 0.01;
  s.values.resize(4096);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    s.values[i] = std::sin(2.0 * M_PI * 2.0 * s.dt * static_cast<double>(i));
  }
  viv::csv::write_series((dir / "tone.csv").string(), "x", s);

  auto r = run_viv(dir, "spectrum " + (dir / "tone.csv").string() +
                            " --channel x --segment 1024 --out " +
                            (dir / "psd").string());
  REQUIRE(r.code == 0);
  const auto psd =
      viv::csv::read_table((dir / "psd" / "spectrum.csv").string());
  const auto& freq = psd.column("frequency");
  const auto& amp = psd.column("amplitude");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < amp.size(); ++i) {
    if (amp[i] > amp[peak]) peak = i;
  }
  CHECK(freq[peak] == doctest::Approx(2.0).epsilon(0.05));

  r = run_viv(dir, "spectrum " + (dir / "tone.csv").string() +
                       " --channel x --segment 1024 --asd --out " +
                       (dir / "asd").string());
  REQUIRE(r.code == 0);
  const auto asd =
      viv::csv::read_table((dir / "asd" / "spectrum.csv").string());
  const double a = asd.column("amplitude")[peak];
  CHECK(a * a == doctest::Approx(amp[peak]).epsilon(1e-9));
}

TEST_CASE("spectrum rejects unusable inputs") {
  const auto dir = viv::testutil::scratch_dir("cli_spectrum_bad");
  viv::signals::TimeSeries s;
  s.t0 = 0.0;
  s.dt = 0.01;
  s.values.assign(64, 1.0);
  viv::csv::write_series((dir / "tone.csv").string(), "x", s);

  auto r = run_viv(dir, "spectrum " + (dir / "tone.csv").string() +
                            " --channel y --out " + dir.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("no channel 'y'") != std::string::npos);

  write_file(dir / "empty.csv", "");
  r = run_viv(dir, "spectrum " + (dir / "empty.csv").string() +
                       " --channel x --out " + dir.string());
  CHECK(r.code == 1);
}

TEST_CASE("bestfit prints 100 for a perfect candidate") {
  const auto dir = viv::testutil::scratch_dir("cli_bestfit");
  std::string text = "time,a,b\n";
  for (int i = 0; i < 50; ++i) {
    const double t = 0.1 * i;
    const double v = std::sin(t) + 0.2;
    text += std::to_string(t) + "," + std::to_string(v) + "," +
            std::to_string(v) + "\n";
  }
  write_file(dir / "data.csv", text);
  const auto r = run_viv(dir, "bestfit " + (dir / "data.csv").string() +
                                  " --reference a --candidate b");
  CHECK(r.code == 0);
  CHECK(std::stod(r.out) == 100.0);
}

TEST_CASE("hankel-order recovers the true order from clean data") {
  const auto dir = viv::testutil::scratch_dir("cli_hankel");
  viv::ssmodel::StateSpaceModel truth;
  truth.A.resize(2, 2);
  truth.A << 0.55, -0.25, 0.25, 0.55;
  truth.B.resize(2);
  truth.B << 1.0, 0.0;
  truth.C.resize(2);
  truth.C << 1.0, 0.5;
  truth.D = 0.2;
  truth.continuous_time = false;
  truth.dt = 0.02;

  viv::signals::TimeSeries u;
  u.t0 = 0.0;
  u.dt = 0.02;
  u.values.resize(2000);
  viv::Rng rng(11);
  for (auto& v : u.values) v = rng.normal();
  const viv::signals::TimeSeries y =
      viv::ssmodel::simulate(truth, u, Eigen::VectorXd::Zero(2));

  viv::csv::Table t;
  t.channels = {"time", "u", "y"};
  std::vector<double> time(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) time[i] = u.time(i);
  t.columns = {time, u.values, y.values};
  viv::csv::write_table((dir / "data.csv").string(), t);

  const auto r = run_viv(dir, "hankel-order " + (dir / "data.csv").string() +
                                  " --input u --output y");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("order 2\n", 0) == 0);
  CHECK(r.out.find("sigma ") != std::string::npos);
}

TEST_CASE("usage errors exit with the config code") {
  const auto dir = viv::testutil::scratch_dir("cli_usage");
  auto r = run_viv(dir, "");
  CHECK(r.code == 1);
  r = run_viv(dir, "frobnicate");
  CHECK(r.code == 1);
  r = run_viv(dir, "spectrum " + (dir / "nope.csv").string());
  CHECK(r.code == 1);
  r = run_viv(dir, "identify --out " + dir.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("--config is required") != std::string::npos);
}
