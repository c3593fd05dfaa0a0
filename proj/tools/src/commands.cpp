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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <vector>

#include <json.hpp>

#include "viv/coupling.hpp"
#include "viv/csv.hpp"
#include "viv/errors.hpp"
#include "viv/random.hpp"
#include "viv/signals.hpp"
#include "viv/ssmodel.hpp"
#include "viv/sysid.hpp"
#include "viv/wake.hpp"

namespace viv::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw ConfigError(ptr.empty() ? msg : ptr + ": " + msg);
}

json load_config(const std::string& path) {
  if (path.empty()) throw ConfigError("--config is required for this command");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) fail("/", "expected a JSON object");
  return j;
}

void check_keys(const json& obj, const std::string& ptr,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      fail(ptr + "/" + it.key(), "unknown key");
    }
  }
}

const json& require_key(const json& obj, const std::string& ptr,
                        const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ptr + "/" + key, "missing required key");
  return *it;
}

const json& require_object(const json& obj, const std::string& ptr,
                           const char* key) {
  const json& v = require_key(obj, ptr, key);
  if (!v.is_object()) fail(ptr + "/" + key, "expected an object");
  return v;
}

double as_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) fail(ptr, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) fail(ptr, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) fail(ptr, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& obj, const std::string& ptr, const char* key) {
  return as_number(require_key(obj, ptr, key), ptr + "/" + key);
}

double get_number_or(const json& obj, const std::string& ptr, const char* key,
                     double dflt) {
  const auto it = obj.find(key);
  return it == obj.end() ? dflt : as_number(*it, ptr + "/" + key);
}

int get_int_or(const json& obj, const std::string& ptr, const char* key,
               int dflt) {
  const auto it = obj.find(key);
  return it == obj.end() ? dflt : as_int(*it, ptr + "/" + key);
}

std::vector<double> get_number_array(const json& obj, const std::string& ptr,
                                     const char* key) {
  const json& v = require_key(obj, ptr, key);
  const std::string p = ptr + "/" + key;
  if (!v.is_array()) fail(p, "expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], p + "/" + std::to_string(i)));
  }
  return out;
}

wake::VdpParams parse_vdp(const json& v, const std::string& ptr,
                          wake::ForcingKind* kind) {
  check_keys(v, ptr, {"mu", "amp", "omega0_sq", "gain", "forcing_kind"});
  wake::VdpParams p;
  p.mu = get_number(v, ptr, "mu");
  p.amp = get_number(v, ptr, "amp");
  p.omega0_sq = get_number(v, ptr, "omega0_sq");
  p.gain = get_number(v, ptr, "gain");
  if (kind != nullptr) {
    const std::string k =
        as_string(require_key(v, ptr, "forcing_kind"), ptr + "/forcing_kind");
    try {
      *kind = wake::forcing_kind_from_string(k);
    } catch (const ParameterError&) {
      fail(ptr + "/forcing_kind", "unknown forcing kind '" + k + "'");
    }
  } else {
    check_keys(v, ptr, {"mu", "amp", "omega0_sq", "gain"});
  }
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
}

json report_to_json(const sysid::FitReport& r) {
  return json{{"variant", r.variant},
              {"best_fit_percent", r.best_fit_percent},
              {"params", r.params},
              {"iterations", r.iterations},
              {"residual_norm", r.residual_norm},
              {"converged", r.converged},
              {"objective_history", r.objective_history},
              {"notes", r.notes}};
}

double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (const double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

signals::TimeSeries tone_sum(const std::vector<double>& amps,
                             const std::vector<double>& freqs,
                             const std::vector<double>& phases, double dt,
                             double duration) {
  signals::TimeSeries s;
  s.t0 = 0.0;
  s.dt = dt;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
  s.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    double v = 0.0;
    for (std::size_t k = 0; k < amps.size(); ++k) {
      v += amps[k] * std::sin(2.0 * M_PI * freqs[k] * t + phases[k]);
    }
    s.values[i] = v;
  }
  return s;
}

signals::TimeSeries apply_drag_forcing(const signals::TimeSeries& lc,
                                       sysid::DragForcing f) {
  signals::TimeSeries u = lc;
  if (f == sysid::DragForcing::kLcSquared) {
    for (auto& v : u.values) v *= v;
  } else {
    const signals::TimeSeries rate = signals::derivative(lc, 1);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      u.values[i] = lc.values[i] * rate.values[i];
    }
  }
  return u;
}

int config_exit(const Error& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return kExitConfig;
}

}  // namespace

int cmd_synth(const CommonArgs& args) {
  try {
    const json root = load_config(args.config);
    check_keys(root, "", {"synth"});
    const json& s = require_object(root, "", "synth");
    const std::string ptr = "/synth";
    check_keys(s, ptr, {"dt", "duration", "noise", "ic", "vdp", "motion",
                        "drag"});
    const double dt = get_number(s, ptr, "dt");
    const double duration = get_number(s, ptr, "duration");
    if (dt <= 0.0) fail(ptr + "/dt", "must be positive");
    if (duration <= 0.0) fail(ptr + "/duration", "must be positive");
    const double noise = get_number_or(s, ptr, "noise", 0.0);
    if (noise < 0.0) fail(ptr + "/noise", "must be >= 0");

    wake::ForcingKind kind{};
    const wake::VdpParams vdp =
        parse_vdp(require_object(s, ptr, "vdp"), ptr + "/vdp", &kind);

    const json& m = require_object(s, ptr, "motion");
    const std::string mptr = ptr + "/motion";
    check_keys(m, mptr, {"amplitudes", "frequencies", "phases"});
    const std::vector<double> amps = get_number_array(m, mptr, "amplitudes");
    const std::vector<double> freqs = get_number_array(m, mptr, "frequencies");
    std::vector<double> phases(amps.size(), 0.0);
    if (m.contains("phases")) phases = get_number_array(m, mptr, "phases");
    if (freqs.size() != amps.size() || phases.size() != amps.size()) {
      fail(mptr, "amplitudes, frequencies, phases must have equal length");
    }
    const signals::TimeSeries motion =
        tone_sum(amps, freqs, phases, dt, duration);

    wake::WakeState ic{0.1, 0.0};
    if (s.contains("ic")) {
      const std::vector<double> v = get_number_array(s, ptr, "ic");
      if (v.size() != 2) fail(ptr + "/ic", "expected [x1, x2]");
      ic = {v[0], v[1]};
    }

    signals::TimeSeries lc =
        wake::integrate_wake(vdp, motion, kind, ic, dt, duration);

    signals::TimeSeries dc = lc;
    std::fill(dc.values.begin(), dc.values.end(), 0.0);
    if (s.contains("drag")) {
      const json& d = require_object(s, ptr, "drag");
      const std::string dptr = ptr + "/drag";
      check_keys(d, dptr, {"model", "forcing"});
      const std::string model_path =
          as_string(require_key(d, dptr, "model"), dptr + "/model");
      sysid::DragForcing forcing = sysid::DragForcing::kLcSquared;
      if (d.contains("forcing")) {
        forcing = sysid::drag_forcing_from_string(
            as_string(d["forcing"], dptr + "/forcing"));
      }
      const ssmodel::StateSpaceModel model = ssmodel::load_model(model_path);
      const signals::TimeSeries u = apply_drag_forcing(lc, forcing);
      dc = ssmodel::simulate(model, u,
                             Eigen::VectorXd::Zero(model.order()));
    }

    signals::TimeSeries d_cf = motion;
    if (noise > 0.0) {
      Rng rng(args.seed);
      for (signals::TimeSeries* ch : {&d_cf, &lc, &dc}) {
        const double sigma = noise * rms(ch->values);
        for (auto& v : ch->values) v += sigma * rng.normal();
      }
    }

    fs::create_directories(args.out);
    csv::Table table;
    table.channels = {"time", "d_cf", "lc", "dc_fluct"};
    std::vector<double> time(lc.size());
    for (std::size_t i = 0; i < lc.size(); ++i) time[i] = lc.time(i);
    table.columns = {std::move(time), d_cf.values, lc.values, dc.values};
    csv::write_table(args.out + "/dataset.csv", table);
    return kExitOk;
  } catch (const Error& e) {
    return config_exit(e);
  }
}

int cmd_identify(const CommonArgs& args, const std::string& variant_flag) {
  bool config_phase = true;
  try {
    const json root = load_config(args.config);
    check_keys(root, "", {"identify"});
    const json& s = require_object(root, "", "identify");
    const std::string ptr = "/identify";
    check_keys(s, ptr, {"data", "variant", "p0", "markov_count",
                        "rel_threshold", "order"});
    const std::string data_path =
        as_string(require_key(s, ptr, "data"), ptr + "/data");
    std::string variant = variant_flag;
    if (variant.empty() && s.contains("variant")) {
      variant = as_string(s["variant"], ptr + "/variant");
    }
    sysid::InlineOptions opts;
    opts.markov_count = get_int_or(s, ptr, "markov_count", 40);
    opts.rel_threshold = get_number_or(s, ptr, "rel_threshold", 1e-6);
    opts.order_override = get_int_or(s, ptr, "order", -1);

    const csv::Table table = csv::read_table(data_path);
    fs::create_directories(args.out);

    const auto load_channel = [&](const char* name) {
      if (!table.has_channel(name)) {
        throw ConfigError("dataset '" + data_path + "' has no channel '" +
                          std::string(name) + "'");
      }
      return csv::to_series(table, name);
    };

    const auto save_crossflow = [&](const wake::VdpParams& p,
                                    const sysid::FitReport& rep) {
      const json pj{{"mu", p.mu},
                    {"amp", p.amp},
                    {"omega0_sq", p.omega0_sq},
                    {"gain", p.gain},
                    {"forcing_kind", rep.variant}};
      write_text(args.out + "/vdp_" + rep.variant + ".json",
                 pj.dump(2) + "\n");
      write_text(args.out + "/report_" + rep.variant + ".json",
                 report_to_json(rep).dump(2) + "\n");
    };

    const auto run_crossflow = [&](wake::ForcingKind kind) {
      const signals::TimeSeries motion = load_channel("d_cf");
      const signals::TimeSeries lc = load_channel("lc");
      wake::VdpParams p0;
      if (s.contains("p0")) {
        p0 = parse_vdp(s["p0"], ptr + "/p0", nullptr);
      } else {
        p0 = sysid::vdp_equation_error_seed(motion, lc, kind);
      }
      auto [params, rep] = sysid::identify_crossflow(motion, lc, kind, p0);
      save_crossflow(params, rep);
      return rep;
    };

    const auto run_inline = [&](sysid::DragForcing f) {
      const signals::TimeSeries lc = load_channel("lc");
      const signals::TimeSeries dc = load_channel("dc_fluct");
      auto [model, rep] = sysid::identify_inline(lc, dc, f, opts);
      ssmodel::save_model(args.out + "/model_" + rep.variant + ".json", model);
      write_text(args.out + "/report_" + rep.variant + ".json",
                 report_to_json(rep).dump(2) + "\n");
      return rep;
    };

    config_phase = false;

    if (variant.empty()) {
      std::vector<sysid::FitReport> lift, drag;
      for (const auto kind :
           {wake::ForcingKind::kDisplacement, wake::ForcingKind::kVelocity,
            wake::ForcingKind::kAcceleration}) {
        lift.push_back(run_crossflow(kind));
      }
      for (const auto f : {sysid::DragForcing::kLcSquared,
                           sysid::DragForcing::kLcTimesRate}) {
        drag.push_back(run_inline(f));
      }
      const auto by_fit = [](const sysid::FitReport& a,
                             const sysid::FitReport& b) {
        return a.best_fit_percent > b.best_fit_percent;
      };
      std::sort(lift.begin(), lift.end(), by_fit);
      std::sort(drag.begin(), drag.end(), by_fit);
      json cmp;
      for (const auto& r : lift) cmp["lift_ranking"].push_back(r.variant);
      for (const auto& r : drag) cmp["drag_ranking"].push_back(r.variant);
      cmp["lift_winner"] = lift.front().variant;
      cmp["drag_winner"] = drag.front().variant;
      write_text(args.out + "/comparison.json", cmp.dump(2) + "\n");
      return lift.front().converged && drag.front().converged
                 ? kExitOk
                 : kExitNoConvergence;
    }

    sysid::FitReport rep;
    if (variant == "displacement" || variant == "velocity" ||
        variant == "acceleration") {
      rep = run_crossflow(wake::forcing_kind_from_string(variant));
    } else if (variant == "lc_squared" || variant == "lc_times_rate") {
      rep = run_inline(sysid::drag_forcing_from_string(variant));
    } else {
      fail(ptr + "/variant", "unknown variant '" + variant + "'");
    }
    return rep.converged ? kExitOk : kExitNoConvergence;
  } catch (const ConfigError& e) {
    return config_exit(e);
  } catch (const Error& e) {
    if (config_phase) return config_exit(e);
    std::fprintf(stderr, "identification failed: %s\n", e.what());
    return kExitNoConvergence;
  }
}

int cmd_simulate(const CommonArgs& args) {
  bool config_phase = true;
  std::string out_dir = args.out;
  try {
    const json root = load_config(args.config);
    check_keys(root, "",
               {"beam", "hydro", "vdp", "ssmodel", "coupling", "output"});

    const json& b = require_object(root, "", "beam");
    check_keys(b, "/beam",
               {"E", "A", "I", "J", "rho", "length", "tension", "n_elements",
                "rayleigh_a", "rayleigh_b"});
    beam::BeamModel model;
    model.E = get_number(b, "/beam", "E");
    model.A = get_number(b, "/beam", "A");
    model.I = get_number(b, "/beam", "I");
    model.J = get_number(b, "/beam", "J");
    model.rho = get_number(b, "/beam", "rho");
    model.length = get_number(b, "/beam", "length");
    model.tension = get_number(b, "/beam", "tension");
    model.n_elements = as_int(require_key(b, "/beam", "n_elements"),
                              "/beam/n_elements");
    beam::RayleighDamping damping;
    damping.mass_coeff = get_number_or(b, "/beam", "rayleigh_a", 0.0);
    damping.stiffness_coeff = get_number_or(b, "/beam", "rayleigh_b", 0.0);

    const json& h = require_object(root, "", "hydro");
    check_keys(h, "/hydro", {"rho_f", "U", "D", "St"});
    coupling::HydroParams hydro;
    hydro.rho_f = get_number(h, "/hydro", "rho_f");
    hydro.U = get_number(h, "/hydro", "U");
    hydro.D = get_number(h, "/hydro", "D");
    hydro.St = get_number_or(h, "/hydro", "St", 0.2);

    wake::ForcingKind kind{};
    json vj = require_object(root, "", "vdp");
    double initial_lift = 0.0;
    if (vj.contains("initial_x1")) {
      initial_lift = as_number(vj["initial_x1"], "/vdp/initial_x1");
      vj.erase("initial_x1");
    }
    const wake::VdpParams vdp = parse_vdp(vj, "/vdp", &kind);

    ssmodel::StateSpaceModel drag;
    drag.continuous_time = true;  // order-0 zero model unless a file is given
    if (root.contains("ssmodel")) {
      const json& ss = root["ssmodel"];
      if (!ss.is_object()) fail("/ssmodel", "expected an object");
      check_keys(ss, "/ssmodel", {"path"});
      drag = ssmodel::load_model(
          as_string(require_key(ss, "/ssmodel", "path"), "/ssmodel/path"));
    }

    const json& c = require_object(root, "", "coupling");
    check_keys(c, "/coupling",
               {"tol", "omega0", "max_subiter", "dt", "T", "dcm"});
    coupling::CouplingConfig cfg;
    cfg.tol = get_number_or(c, "/coupling", "tol", 1e-6);
    cfg.omega0 = get_number_or(c, "/coupling", "omega0", 0.7);
    cfg.max_subiter = get_int_or(c, "/coupling", "max_subiter", 50);
    cfg.dt_c = get_number(c, "/coupling", "dt");
    const double T = get_number(c, "/coupling", "T");
    const double dcm = get_number(c, "/coupling", "dcm");

    int snapshot_stride = 1000;
    std::size_t spectrum_segment = 4096;
    if (root.contains("output")) {
      const json& o = root["output"];
      if (!o.is_object()) fail("/output", "expected an object");
      check_keys(o, "/output", {"snapshot_stride", "spectrum_segment"});
      snapshot_stride = get_int_or(o, "/output", "snapshot_stride", 1000);
      spectrum_segment = static_cast<std::size_t>(
          get_int_or(o, "/output", "spectrum_segment", 4096));
    }

    const coupling::RomForceField rom = coupling::make_uniform_rom(
        model, vdp, kind, drag, dcm, hydro, initial_lift);

    fs::create_directories(out_dir);
    config_phase = false;

    const coupling::FullScaleResult res =
        coupling::run_full_scale(model, rom, cfg, T, damping, snapshot_stride);

    csv::Table mid;
    mid.channels = {"time", "d_IL", "d_CF"};
    mid.columns = {res.time, res.mid_il, res.mid_cf};
    csv::write_table(out_dir + "/midpoint_trajectory.csv", mid);

    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
      const auto& snap = res.snapshots[k];
      csv::Table t;
      t.channels = {"z", "displacement_IL", "displacement_CF", "velocity_IL",
                    "velocity_CF"};
      t.columns = {res.z, snap.d_il, snap.d_cf, snap.v_il, snap.v_cf};
      char name[32];
      std::snprintf(name, sizeof(name), "/nodes_%06zu.csv", k);
      csv::write_table(out_dir + name, t);
    }

    json summary{{"mean_subiterations", res.mean_subiterations},
                 {"max_subiterations", res.max_subiterations},
                 {"static_il_mid", res.static_il_mid}};
    for (const auto& [suffix, channel] :
         {std::pair<const char*, const std::vector<double>*>{"cf",
                                                             &res.mid_cf},
          {"il", &res.mid_il}}) {
      signals::TimeSeries s;
      s.t0 = 0.0;
      s.dt = cfg.dt_c;
      s.values = *channel;
      const std::size_t seg = std::min(spectrum_segment, s.size());
      const signals::Spectrum sp = signals::welch_psd(s, seg);
      csv::Table t;
      t.channels = {"frequency", "amplitude"};
      t.columns = {sp.frequencies, sp.amplitudes};
      csv::write_table(out_dir + "/midpoint_spectrum_" + suffix + ".csv", t);
      summary[std::string("dominant_frequency_") + suffix] =
          signals::dominant_frequency(sp);
    }
    write_text(out_dir + "/summary.json", summary.dump(2) + "\n");
    return kExitOk;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "coupling failed: %s\n", e.what());
    if (!config_phase) {
      write_text(out_dir + "/diagnostics.txt", std::string(e.what()) + "\n");
    }
    return kExitCouplingFailure;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "coupling failed: %s\n", e.what());
    if (!config_phase) {
      write_text(out_dir + "/diagnostics.txt", std::string(e.what()) + "\n");
    }
    return kExitCouplingFailure;
  } catch (const Error& e) {
    return config_exit(e);
  }
}

int cmd_spectrum(const SpectrumArgs& args) {
  try {
    const csv::Table table = csv::read_table(args.csv);
    if (!table.has_channel(args.channel)) {
      throw ConfigError("'" + args.csv + "' has no channel '" + args.channel +
                        "'");
    }
    const signals::TimeSeries s = csv::to_series(table, args.channel);
    const std::size_t seg =
        args.segment > 0 ? args.segment : std::min<std::size_t>(s.size(), 1024);
    signals::Spectrum sp = signals::welch_psd(s, seg, args.overlap);
    if (args.asd) {
      for (auto& a : sp.amplitudes) a = std::sqrt(a);
    }
    fs::create_directories(args.out);
    csv::Table t;
    t.channels = {"frequency", "amplitude"};
    t.columns = {sp.frequencies, sp.amplitudes};
    csv::write_table(args.out + "/spectrum.csv", t);
    return kExitOk;
  } catch (const Error& e) {
    return config_exit(e);
  }
}

int cmd_bestfit(const std::string& csv_path, const std::string& reference,
                const std::string& candidate) {
  try {
    const csv::Table table = csv::read_table(csv_path);
    for (const std::string& ch : {reference, candidate}) {
      if (!table.has_channel(ch)) {
        throw ConfigError("'" + csv_path + "' has no channel '" + ch + "'");
      }
    }
    const double fit = signals::best_fit(csv::to_series(table, reference),
                                         csv::to_series(table, candidate));
    std::printf("%.12g\n", fit);
    return kExitOk;
  } catch (const Error& e) {
    return config_exit(e);
  }
}

int cmd_hankel_order(const HankelOrderArgs& args) {
  try {
    const csv::Table table = csv::read_table(args.csv);
    for (const std::string& ch : {args.input_channel, args.output_channel}) {
      if (!table.has_channel(ch)) {
        throw ConfigError("'" + args.csv + "' has no channel '" + ch + "'");
      }
    }
    const signals::TimeSeries u = csv::to_series(table, args.input_channel);
    const signals::TimeSeries y = csv::to_series(table, args.output_channel);
    const ssmodel::MarkovEstimate est =
        ssmodel::markov_from_data(u, y, args.markov_count);
    const int half = std::min(args.markov_count / 2, 40);
    const ssmodel::HankelMatrix H =
        ssmodel::build_hankel(est.markov, half, half);
    const ssmodel::OrderSelection sel =
        ssmodel::select_order(H, args.rel_threshold);
    std::printf("order %d\n", sel.order);
    for (Eigen::Index i = 0; i < sel.singular_values.size(); ++i) {
      std::printf("sigma %.17g\n", sel.singular_values(i));
    }
    return kExitOk;
  } catch (const Error& e) {
    return config_exit(e);
  }
}

}  // namespace viv::cli
