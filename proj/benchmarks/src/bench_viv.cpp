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

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "viv/beam.hpp"
#include "viv/coupling.hpp"
#include "viv/random.hpp"
#include "viv/signals.hpp"
#include "viv/ssmodel.hpp"
#include "viv/wake.hpp"

namespace {

viv::beam::BeamModel riser(int n_elements) {
  viv::beam::BeamModel m;
  m.E = 8.894e8;
  m.A = 5.7e-4;
  m.I = 4.2e-8;
  m.J = 4.2e-8;
  m.rho = 1630.0;
  m.length = 38.0;
  m.tension = 3000.0;
  m.n_elements = n_elements;
  return m;
}

viv::signals::TimeSeries zero_series(double dt, double T) {
  viv::signals::TimeSeries s;
  s.t0 = 0.0;
  s.dt = dt;
  s.values.assign(static_cast<std::size_t>(std::llround(T / dt)) + 2, 0.0);
  return s;
}

void BM_WakeIntegration(benchmark::State& state) {
  const viv::wake::VdpParams p{68.29, 1.18, 2117.0, 70.68};
  const viv::signals::TimeSeries motion = zero_series(1e-3, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(viv::wake::integrate_wake(
        p, motion, viv::wake::ForcingKind::kDisplacement, {0.1, 0.0}, 1e-3,
        1.0));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_WakeIntegration);

void BM_BeamAssembly(benchmark::State& state) {
  const viv::beam::BeamModel model = riser(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(viv::beam::assemble(model));
  }
}
BENCHMARK(BM_BeamAssembly)->Arg(50)->Arg(200);

void BM_NewmarkStep(benchmark::State& state) {
  const auto ab = viv::beam::assemble(riser(static_cast<int>(state.range(0))));
  const Eigen::Index n = ab.K.rows();
  const viv::beam::NewmarkSolver solver(ab.M, Eigen::MatrixXd::Zero(n, n),
                                        ab.K, 1e-3);
  viv::beam::NewmarkState s;
  s.d = Eigen::VectorXd::Constant(n, 1e-3);
  s.v = Eigen::VectorXd::Zero(n);
  s.a = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd F = Eigen::VectorXd::Constant(n, 0.5);
  for (auto _ : state) {
    s = solver.step(s, F);
    benchmark::DoNotOptimize(s.d.data());
  }
}
BENCHMARK(BM_NewmarkStep)->Arg(50)->Arg(200);

void BM_StateSpaceSimulate(benchmark::State& state) {
  viv::ssmodel::StateSpaceModel m;
  m.A.resize(2, 2);
  m.A << 0.55, -0.25, 0.25, 0.55;
  m.B.resize(2);
  m.B << 1.0, 0.0;
  m.C.resize(2);
  m.C << 1.0, 0.5;
  m.D = 0.2;
  m.continuous_time = false;
  m.dt = 0.01;

  viv::signals::TimeSeries u;
  u.t0 = 0.0;
  u.dt = 0.01;
  u.values.resize(2000);
  viv::Rng rng(1);
  for (auto& v : u.values) v = rng.normal();

  for (auto _ : state) {
    benchmark::DoNotOptimize(
        viv::ssmodel::simulate(m, u, Eigen::Vector2d::Zero()));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_StateSpaceSimulate);

void BM_MarkovDeconvolution(benchmark::State& state) {
  viv::signals::TimeSeries u, y;
  u.t0 = y.t0 = 0.0;
  u.dt = y.dt = 0.01;
  u.values.resize(2000);
  viv::Rng rng(2);
  for (auto& v : u.values) v = rng.normal();
  viv::ssmodel::StateSpaceModel m;
  m.A = Eigen::MatrixXd::Constant(1, 1, 0.7);
  m.B = Eigen::VectorXd::Constant(1, 1.0);
  m.C = Eigen::RowVectorXd::Constant(1, 1.0);
  m.D = 0.1;
  m.continuous_time = false;
  m.dt = 0.01;
  y = viv::ssmodel::simulate(m, u, Eigen::VectorXd::Zero(1));

  for (auto _ : state) {
    benchmark::DoNotOptimize(viv::ssmodel::markov_from_data(u, y, 40));
  }
}
BENCHMARK(BM_MarkovDeconvolution);

void BM_CoupledRun(benchmark::State& state) {
  const viv::beam::BeamModel model = riser(16);
  viv::coupling::HydroParams hydro;
  hydro.rho_f = 1000.0;
  hydro.U = 1.4;
  hydro.D = 0.027;
  hydro.St = 0.2;
  const viv::coupling::RomForceField rom = viv::coupling::make_uniform_rom(
      model, {68.29, 1.18, 2117.0, 70.68},
      viv::wake::ForcingKind::kAcceleration, viv::ssmodel::StateSpaceModel{},
      2.34, hydro, 0.01);
  viv::coupling::CouplingConfig cfg;
  cfg.dt_c = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        viv::coupling::run_full_scale(model, rom, cfg, 0.1, {2.0, 1e-3}, 0));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_CoupledRun);

}  // namespace

BENCHMARK_MAIN();
