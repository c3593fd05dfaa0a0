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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "viv/errors.hpp"

namespace viv::signals {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_series(const TimeSeries& s, std::size_t min_len) {
  if (s.dt <= 0.0) throw ParameterError("TimeSeries dt must be positive");
  if (s.size() < min_len) {
    throw DimensionError("TimeSeries too short: need at least " +
                         std::to_string(min_len) + " samples, have " +
                         std::to_string(s.size()));
  }
}

}  // namespace

double best_fit(const TimeSeries& z, const TimeSeries& zhat) {
  require_series(z, 2);
  require_series(zhat, 2);
  if (z.size() != zhat.size()) {
    throw DimensionError("best_fit: series lengths differ");
  }
  if (std::abs(z.dt - zhat.dt) > 1e-9 * z.dt) {
    throw DimensionError("best_fit: series sampling rates differ");
  }
  const double mean =
      std::accumulate(z.values.begin(), z.values.end(), 0.0) /
      static_cast<double>(z.size());
  double err2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double e = z.values[i] - zhat.values[i];
    const double r = z.values[i] - mean;
    err2 += e * e;
    ref2 += r * r;
  }
  if (ref2 == 0.0) {
    throw ParameterError("best_fit: reference series is constant");
  }
  return (1.0 - std::sqrt(err2 / ref2)) * 100.0;
}

TimeSeries derivative(const TimeSeries& s, int order) {
  if (order != 1 && order != 2) {
    throw ParameterError("derivative: order must be 1 or 2");
  }
  require_series(s, 5);
  const std::size_t n = s.size();
  const double dt = s.dt;
  const auto& x = s.values;
  TimeSeries out;
  out.t0 = s.t0;
  out.dt = dt;
  out.values.resize(n);
  if (order == 1) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      out.values[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
    }
    out.values[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt);
    out.values[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * dt);
  } else {
    const double dt2 = dt * dt;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      out.values[i] = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / dt2;
    }
    out.values[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / dt2;
    out.values[n - 1] =
        (2.0 * x[n - 1] - 5.0 * x[n - 2] + 4.0 * x[n - 3] - x[n - 4]) / dt2;
  }
  return out;
}

Spectrum welch_psd(const TimeSeries& s, std::size_t segment_len,
                   double overlap) {
  require_series(s, 2);
  if (segment_len < 2) throw ParameterError("welch_psd: segment too short");
  if (segment_len > s.size()) {
    throw DimensionError("welch_psd: segment longer than series");
  }
  if (overlap < 0.0 || overlap >= 1.0) {
    throw ParameterError("welch_psd: overlap must lie in [0, 1)");
  }
  const std::size_t nseg = segment_len;
  const double fs = 1.0 / s.dt;
  std::size_t hop = static_cast<std::size_t>(
      std::lround(static_cast<double>(nseg) * (1.0 - overlap)));
  hop = std::max<std::size_t>(1, hop);

  std::vector<double> window(nseg);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                      static_cast<double>(nseg - 1)));
    wsum2 += window[i] * window[i];
  }

  const std::size_t nbins = nseg / 2 + 1;
  std::vector<double> psd(nbins, 0.0);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(nseg), out(nseg);

  std::size_t count = 0;
  for (std::size_t start = 0; start + nseg <= s.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < nseg; ++i) mean += s.values[start + i];
    mean /= static_cast<double>(nseg);
    for (std::size_t i = 0; i < nseg; ++i) {
      in[i] = window[i] * (s.values[start + i] - mean);
    }
    fft.fwd(out, in);
    for (std::size_t k = 0; k < nbins; ++k) {
      psd[k] += std::norm(out[k]) / (fs * wsum2);
    }
    ++count;
  }

  Spectrum sp;
  sp.frequencies.resize(nbins);
  sp.amplitudes.resize(nbins);
  const bool even = (nseg % 2 == 0);
  for (std::size_t k = 0; k < nbins; ++k) {
    sp.frequencies[k] = fs * static_cast<double>(k) / static_cast<double>(nseg);
    double v = psd[k] / static_cast<double>(count);
    const bool is_dc = (k == 0);
    const bool is_nyquist = even && (k == nbins - 1);
    if (!is_dc && !is_nyquist) v *= 2.0;  // one-sided spectrum
    sp.amplitudes[k] = v;
  }
  return sp;
}

double dominant_frequency(const Spectrum& sp) {
  if (sp.frequencies.empty() || sp.amplitudes.empty()) {
    throw DimensionError("dominant_frequency: empty spectrum");
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < sp.amplitudes.size(); ++k) {
    if (sp.amplitudes[k] > sp.amplitudes[best]) best = k;
  }
  return sp.frequencies[best];
}

TimeSeries resample(const TimeSeries& s, double dt_new) {
  if (dt_new <= 0.0) throw ParameterError("resample: dt_new must be positive");
  require_series(s, 2);
  const double span = s.duration();
  const std::size_t m =
      static_cast<std::size_t>(std::floor(span / dt_new * (1.0 + 1e-12))) + 1;
  TimeSeries out;
  out.t0 = s.t0;
  out.dt = dt_new;
  out.values.resize(m);
  const std::size_t n = s.size();
  for (std::size_t j = 0; j < m; ++j) {
    const double t = dt_new * static_cast<double>(j);
    double pos = t / s.dt;
    std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i >= n - 1) {
      i = n - 2;
      pos = static_cast<double>(n - 1);
    }
    const double frac = pos - static_cast<double>(i);
    out.values[j] = s.values[i] + frac * (s.values[i + 1] - s.values[i]);
  }
  return out;
}

}  // namespace viv::signals
