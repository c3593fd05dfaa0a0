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

#ifndef VIVROM_TOOLS_COMMANDS_HPP_
#define VIVROM_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <string>

namespace viv::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;        // usage, config, or data errors
inline constexpr int kExitNoConvergence = 2; // identification did not converge
inline constexpr int kExitCouplingFailure = 3;

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
};

// Generates an aligned {d_cf, lc, dc_fluct} dataset from a reference
// wake oscillator and drag filter, with optional seeded measurement noise.
int cmd_synth(const CommonArgs& args);

// Runs the identification pipeline on a dataset CSV: all five model
// variants when no variant is named, otherwise just the named one.
// `variant` overrides the config file when non-empty.
int cmd_identify(const CommonArgs& args, const std::string& variant);

// Full-scale coupled simulation; writes node snapshots, the midspan
// trajectory, and midspan spectra.
int cmd_simulate(const CommonArgs& args);

struct SpectrumArgs {
  std::string csv;
  std::string channel;
  std::string out = ".";
  std::size_t segment = 0;  // 0: min(length, 1024)
  double overlap = 0.5;
  bool asd = false;  // emit sqrt(PSD)
};

int cmd_spectrum(const SpectrumArgs& args);

// Prints the best-fit percentage between two channels of one CSV.
int cmd_bestfit(const std::string& csv, const std::string& reference,
                const std::string& candidate);

struct HankelOrderArgs {
  std::string csv;
  std::string input_channel;
  std::string output_channel;
  int markov_count = 40;
  double rel_threshold = 1e-6;
};

// Prints the selected model order and the Hankel singular values.
int cmd_hankel_order(const HankelOrderArgs& args);

}  // namespace viv::cli

#endif  // VIVROM_TOOLS_COMMANDS_HPP_
