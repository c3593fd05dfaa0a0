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

#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order modeling of vortex-induced vibrations"};
  app.require_subcommand(1);
  app.fallthrough();

  viv::cli::CommonArgs common;
  app.add_option("--config", common.config, "JSON configuration file");
  app.add_option("--out", common.out, "output directory");
  app.add_option("--seed", common.seed, "random seed");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");

  std::string variant;
  auto* identify =
      app.add_subcommand("identify", "fit ROM parameters to a dataset");
  identify->add_option("--variant", variant,
                       "restrict to one model variant (displacement, "
                       "velocity, acceleration, lc_squared, lc_times_rate)");

  auto* simulate =
      app.add_subcommand("simulate", "run the coupled full-scale model");

  viv::cli::SpectrumArgs spectrum_args;
  auto* spectrum =
      app.add_subcommand("spectrum", "Welch spectrum of a CSV channel");
  spectrum->add_option("csv", spectrum_args.csv, "input CSV file")->required();
  spectrum->add_option("--channel", spectrum_args.channel, "channel name")
      ->required();
  spectrum->add_option("--segment", spectrum_args.segment,
                       "segment length (default min(N, 1024))");
  spectrum->add_option("--overlap", spectrum_args.overlap,
                       "segment overlap fraction");
  spectrum->add_flag("--asd", spectrum_args.asd,
                     "emit amplitude (sqrt of PSD) instead of PSD");

  std::string bestfit_csv, bestfit_ref, bestfit_cand;
  auto* bestfit =
      app.add_subcommand("bestfit", "best-fit percentage of two channels");
  bestfit->add_option("csv", bestfit_csv, "input CSV file")->required();
  bestfit->add_option("--reference", bestfit_ref, "measured channel")
      ->required();
  bestfit->add_option("--candidate", bestfit_cand, "predicted channel")
      ->required();

  viv::cli::HankelOrderArgs hankel_args;
  auto* hankel = app.add_subcommand(
      "hankel-order", "model order from Hankel singular values");
  hankel->add_option("csv", hankel_args.csv, "input CSV file")->required();
  hankel->add_option("--input", hankel_args.input_channel, "input channel")
      ->required();
  hankel->add_option("--output", hankel_args.output_channel, "output channel")
      ->required();
  hankel->add_option("--markov", hankel_args.markov_count,
                     "number of Markov parameters");
  hankel->add_option("--threshold", hankel_args.rel_threshold,
                     "relative singular-value cutoff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? viv::cli::kExitOk : viv::cli::kExitConfig;
  }

  if (synth->parsed()) return viv::cli::cmd_synth(common);
  if (identify->parsed()) return viv::cli::cmd_identify(common, variant);
  if (simulate->parsed()) return viv::cli::cmd_simulate(common);
  if (spectrum->parsed()) {
    spectrum_args.out = common.out;
    return viv::cli::cmd_spectrum(spectrum_args);
  }
  if (bestfit->parsed()) {
    return viv::cli::cmd_bestfit(bestfit_csv, bestfit_ref, bestfit_cand);
  }
  if (hankel->parsed()) return viv::cli::cmd_hankel_order(hankel_args);
  return viv::cli::kExitConfig;
}
