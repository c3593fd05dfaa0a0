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

#include "viv/signals.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "viv/errors.hpp"
#include "viv/random.hpp"

using viv::signals::Spectrum;
using viv::signals::TimeSeries;

namespace {

TimeSeries make_series(double dt, std::vector<double> values) {
  TimeSeries s;
  s.dt = dt;
  s.values = std::move(values);
  return s;
}

TimeSeries sample(double dt, std::size_t n, double (*f)(double)) {
  TimeSeries s;
  s.dt = dt;
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.values[i] = f(dt * static_cast<double>(i));
  return s;
}

double band_power(const Spectrum& sp, double lo, double hi) {
  double p = 0.0;
  const double df = sp.frequencies[1] - sp.frequencies[0];
  for (std::size_t i = 0; i < sp.frequencies.size(); ++i) {
    if (sp.frequencies[i] >= lo && sp.frequencies[i] <= hi) {
      p += sp.amplitudes[i] * df;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("best_fit perfect prediction returns exactly 100") {
  const TimeSeries z = make_series(0.1, {1.0, 2.0, 3.0, 5.0});
  CHECK(viv::signals::best_fit(z, z) == 100.0);
}

TEST_CASE("best_fit mean predictor returns exactly 0") {
  const TimeSeries z = make_series(0.1, {1.0, 2.0, 3.0});
  const TimeSeries zhat = make_series(0.1, {2.0, 2.0, 2.0});
  CHECK(viv::signals::best_fit(z, zhat) == 0.0);
}

TEST_CASE("best_fit hand example (1 - 1/sqrt(2)) * 100") {
  const TimeSeries z = make_series(0.1, {1.0, 2.0, 3.0});
  const TimeSeries zhat = make_series(0.1, {1.0, 2.0, 4.0});
  const double expected = (1.0 - 1.0 / std::sqrt(2.0)) * 100.0;
  const double fit = viv::signals::best_fit(z, zhat);
  CHECK(std::abs(fit - expected) <= 1e-9 * expected);
}

TEST_CASE("best_fit is invariant under a common constant shift") {
  viv::Rng rng(7);
  TimeSeries z = make_series(0.01, {});
  TimeSeries zhat = z;
  for (int i = 0; i < 64; ++i) {
    z.values.push_back(rng.normal());
    zhat.values.push_back(rng.normal());
  }
  const double base = viv::signals::best_fit(z, zhat);
  TimeSeries zs = z, zhs = zhat;
  for (auto& v : zs.values) v += 3.7;
  for (auto& v : zhs.values) v += 3.7;
  CHECK(viv::signals::best_fit(zs, zhs) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("best_fit rejects mismatched and degenerate inputs") {
  const TimeSeries z = make_series(0.1, {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(viv::signals::best_fit(z, make_series(0.1, {1.0, 2.0})),
                  viv::DimensionError);
  CHECK_THROWS_AS(viv::signals::best_fit(z, make_series(0.2, {1.0, 2.0, 3.0})),
                  viv::DimensionError);
  const TimeSeries flat = make_series(0.1, {4.0, 4.0, 4.0});
  CHECK_THROWS_AS(viv::signals::best_fit(flat, z), viv::ParameterError);
}

TEST_CASE("derivative of a constant is zero") {
  const TimeSeries s = make_series(0.1, {2.5, 2.5, 2.5, 2.5, 2.5, 2.5});
  const TimeSeries d = viv::signals::derivative(s, 1);
  REQUIRE(d.size() == s.size());
  for (const double v : d.values) CHECK(v == 0.0);
}

TEST_CASE("derivative of a ramp is one everywhere, endpoints included") {
  TimeSeries s;
  s.dt = 0.1;
  for (int i = 0; i < 12; ++i) s.values.push_back(0.1 * i);
  const TimeSeries d = viv::signals::derivative(s, 1);
  for (const double v : d.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("first derivative is exact on quadratics, second on cubics") {
  // The interior central stencils and the one-sided endpoint stencils are
  // all second order, so they reproduce these polynomials exactly.
  TimeSeries s;
  s.dt = 0.05;
  for (int i = 0; i < 20; ++i) {
    const double t = s.dt * i;
    s.values.push_back(3.0 * t * t - 2.0 * t + 1.0);
  }
  const TimeSeries d1 = viv::signals::derivative(s, 1);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    const double t = s.dt * static_cast<double>(i);
    CHECK(d1.values[i] == doctest::Approx(6.0 * t - 2.0).epsilon(1e-10));
  }

  TimeSeries c;
  c.dt = 0.05;
  for (int i = 0; i < 20; ++i) {
    const double t = c.dt * i;
    c.values.push_back(t * t * t);
  }
  const TimeSeries d2 = viv::signals::derivative(c, 2);
  for (std::size_t i = 0; i < d2.size(); ++i) {
    const double t = c.dt * static_cast<double>(i);
    CHECK(d2.values[i] == doctest::Approx(6.0 * t).epsilon(1e-8));
  }
}

TEST_CASE("second derivative of a sine matches the analytic value") {
  const double w = 2.0 * M_PI;
  TimeSeries s;
  s.dt = 1e-3;
  for (int i = 0; i <= 2000; ++i) s.values.push_back(std::sin(w * s.dt * i));
  const TimeSeries d2 = viv::signals::derivative(s, 2);
  for (std::size_t i = 5; i + 5 < d2.size(); ++i) {
    const double exact = -w * w * std::sin(w * s.dt * static_cast<double>(i));
    CHECK(std::abs(d2.values[i] - exact) < 1e-4 * w * w);
  }
}

TEST_CASE("derivative convergence is second order") {
  auto err = [](double dt) {
    TimeSeries s;
    s.dt = dt;
    const auto n = static_cast<std::size_t>(std::lround(1.0 / dt));
    for (std::size_t i = 0; i <= n; ++i) s.values.push_back(std::sin(5.0 * dt * i));
    const TimeSeries d = viv::signals::derivative(s, 1);
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
      e = std::max(e, std::abs(d.values[i] - 5.0 * std::cos(5.0 * dt * i)));
    }
    return e;
  };
  CHECK(err(0.01) / err(0.005) > 3.0);
}

TEST_CASE("derivative rejects short series and bad order") {
  const TimeSeries s = make_series(0.1, {1.0, 2.0, 3.0, 4.0});
  CHECK_THROWS_AS(viv::signals::derivative(s, 1), viv::DimensionError);
  const TimeSeries ok = make_series(0.1, {1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK_THROWS_AS(viv::signals::derivative(ok, 3), viv::ParameterError);
  CHECK_THROWS_AS(viv::signals::derivative(ok, 0), viv::ParameterError);
}

TEST_CASE("welch_psd locates a single tone") {
  TimeSeries s;
  s.dt = 1e-2;
  for (int i = 0; i < 6000; ++i) s.values.push_back(std::sin(2.0 * M_PI * 2.0 * s.dt * i));
  const Spectrum sp = viv::signals::welch_psd(s, 1024, 0.5);
  const double df = sp.frequencies[1] - sp.frequencies[0];
  CHECK(std::abs(viv::signals::dominant_frequency(sp) - 2.0) <= df);

  // Parseval: integrated PSD recovers the tone variance of 1/2.
  double total = 0.0;
  for (const double a : sp.amplitudes) total += a * df;
  CHECK(total == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("welch_psd separates two tones with a 4:1 power ratio") {
  TimeSeries s;
  s.dt = 1e-2;
  for (int i = 0; i < 60000; ++i) {
    const double t = s.dt * i;
    s.values.push_back(std::sin(2.0 * M_PI * 2.0 * t) +
                       0.5 * std::sin(2.0 * M_PI * 4.0 * t));
  }
  const Spectrum sp = viv::signals::welch_psd(s, 2048, 0.5);
  CHECK(viv::signals::dominant_frequency(sp) == doctest::Approx(2.0).epsilon(0.01));
  const double p2 = band_power(sp, 1.5, 2.5);
  const double p4 = band_power(sp, 3.5, 4.5);
  CHECK(p2 / p4 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("welch_psd of white noise is flat and Parseval-consistent") {
  viv::Rng rng(11);
  TimeSeries s;
  s.dt = 1e-2;
  s.values.resize(60000);
  double mean = 0.0;
  for (auto& v : s.values) {
    v = rng.normal();
    mean += v;
  }
  mean /= static_cast<double>(s.size());
  double var = 0.0;
  for (const double v : s.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(s.size());

  const Spectrum sp = viv::signals::welch_psd(s, 512, 0.5);
  const double df = sp.frequencies[1] - sp.frequencies[0];
  double total = 0.0;
  for (const double a : sp.amplitudes) total += a * df;
  CHECK(total == doctest::Approx(var).epsilon(0.05));

  // No bin far from the median level (the mean-removal notch at DC aside).
  std::vector<double> amps(sp.amplitudes.begin() + 1, sp.amplitudes.end() - 1);
  std::sort(amps.begin(), amps.end());
  const double median = amps[amps.size() / 2];
  CHECK(amps.front() > 0.3 * median);
  CHECK(amps.back() < 3.0 * median);
}

TEST_CASE("welch_psd validates its arguments") {
  const TimeSeries s = sample(0.01, 100, +[](double t) { return std::sin(t); });
  CHECK_THROWS_AS(viv::signals::welch_psd(s, 200, 0.5), viv::DimensionError);
  CHECK_THROWS_AS(viv::signals::welch_psd(s, 50, 1.0), viv::ParameterError);
  CHECK_THROWS_AS(viv::signals::welch_psd(s, 50, -0.1), viv::ParameterError);
}

TEST_CASE("dominant_frequency picks the peak and breaks ties low") {
  Spectrum sp;
  sp.frequencies = {1.0, 2.0, 3.0};
  sp.amplitudes = {1.0, 5.0, 2.0};
  CHECK(viv::signals::dominant_frequency(sp) == 2.0);

  Spectrum tie;
  tie.frequencies = {1.0, 3.0};
  tie.amplitudes = {4.0, 4.0};
  CHECK(viv::signals::dominant_frequency(tie) == 1.0);

  CHECK_THROWS_AS(viv::signals::dominant_frequency(Spectrum{}),
                  viv::DimensionError);
}

TEST_CASE("resample is the identity at the same rate") {
  const TimeSeries s = sample(0.01, 200, +[](double t) { return std::sin(3.0 * t); });
  const TimeSeries r = viv::signals::resample(s, 0.01);
  REQUIRE(r.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(r.values[i] - s.values[i]) <= 1e-12);
  }
}

TEST_CASE("resample reproduces linear data exactly") {
  const TimeSeries s = sample(0.01, 101, +[](double t) { return 2.0 * t - 1.0; });
  const TimeSeries r = viv::signals::resample(s, 0.0137);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r.values[i] ==
          doctest::Approx(2.0 * r.time(i) - 1.0).epsilon(1e-12));
  }
}

TEST_CASE("resample error on a sine stays below the interpolation bound") {
  const TimeSeries s =
      sample(1e-3, 1001, +[](double t) { return std::sin(2.0 * M_PI * t); });
  for (const double dtn : {2e-3, 1.5e-3}) {
    const TimeSeries r = viv::signals::resample(s, dtn);
    double emax = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      emax = std::max(emax, std::abs(r.values[i] - std::sin(2.0 * M_PI * r.time(i))));
    }
    CHECK(emax < 1e-5);
  }
  CHECK_THROWS_AS(viv::signals::resample(s, 0.0), viv::ParameterError);
}
