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

#ifndef VIV_SIGNALS_HPP_
#define VIV_SIGNALS_HPP_

#include <cstddef>
#include <vector>

namespace viv::signals {

// Uniformly sampled real-valued channel.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double duration() const {
    return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1);
  }
};

struct Spectrum {
  std::vector<double> frequencies;  // Hz, ascending
  std::vector<double> amplitudes;   // PSD (unit^2/Hz) or ASD (unit/sqrt(Hz))
};

// Fit percentage (1 - |z - zhat| / |z - mean(z)|) * 100 in the discrete L2
// norm. May be negative for very poor predictions. Throws DimensionError on
// length/dt mismatch and ParameterError when z is constant.
double best_fit(const TimeSeries& z, const TimeSeries& zhat);

// First or second derivative by second-order central differences, one-sided
// second-order stencils at the endpoints. Output length equals input length.
TimeSeries derivative(const TimeSeries& s, int order);

// Averaged-periodogram power spectral density with a Hann window and
// per-segment mean removal. overlap is the fraction of segment_len shared by
// consecutive segments, in [0, 1).
Spectrum welch_psd(const TimeSeries& s, std::size_t segment_len,
                   double overlap = 0.5);

// Frequency of the maximum-amplitude bin; ties break toward lower frequency.
double dominant_frequency(const Spectrum& sp);

// Linear interpolation onto a new uniform grid spanning the same window.
TimeSeries resample(const TimeSeries& s, double dt_new);

}  // namespace viv::signals

#endif  // VIV_SIGNALS_HPP_
