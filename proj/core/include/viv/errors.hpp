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

#ifndef VIV_ERRORS_HPP_
#define VIV_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace viv {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched lengths, sampling rates, or matrix dimensions.
struct DimensionError : Error {
  using Error::Error;
};

// Invalid argument values (out-of-range parameters, degenerate inputs).
struct ParameterError : Error {
  using Error::Error;
};

// Non-finite values where finiteness is required.
struct NumericError : Error {
  using Error::Error;
};

// Trajectory blow-up; carries the simulated time of failure.
struct DivergenceError : Error {
  DivergenceError(const std::string& msg, double t_fail)
      : Error(msg), time(t_fail) {}
  double time;
};

// Rank-deficient or near-singular least-squares problem.
struct IllConditioningError : Error {
  IllConditioningError(const std::string& msg, double cond)
      : Error(msg), condition_number(cond) {}
  double condition_number;
};

// Continuous-time model passed where discrete was required, or vice versa.
struct ModeError : Error {
  using Error::Error;
};

// Interface point outside its element's natural-coordinate range.
struct MappingError : Error {
  using Error::Error;
};

// Iteration budget exhausted without meeting tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

// Two successive residuals are indistinguishable; the caller should accept
// the current iterate rather than divide by a vanishing difference.
struct StagnationError : Error {
  using Error::Error;
};

// Malformed configuration; message carries a JSON pointer where applicable.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace viv

#endif  // VIV_ERRORS_HPP_
