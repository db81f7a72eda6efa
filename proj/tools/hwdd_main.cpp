// hwdd: build, inspect and simulate Heisenberg-Weyl dynamical-decoupling
// sequences on d-level qudits.
//
// Subcommands:
//   hw dump          print Heisenberg-Weyl operators as JSON
//   seq emit         print a pulse-sequence timeline as JSON
//   analyze scaling  tau sweep + log-log infidelity fit (config-driven)
//   run <experiment> preserve | crosskerr | bell (config-driven)
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-invariant violation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwdd/config.hpp"
#include "hwdd/heisenberg_weyl.hpp"
#include "hwdd/output.hpp"
#include "hwdd/sequences.hpp"
#include "hwdd/version.hpp"

namespace {

using hwdd::ConfigError;
using hwdd::NumericError;
using nlohmann::json;

json matrix_json(const hwdd::Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

int cmd_hw_dump(int d, const std::string& label) {
  json out;
  out["d"] = d;
  if (label.empty()) {
    // the generators and the full group
    out["X"] = matrix_json(hwdd::shift_op(d).matrix());
    out["Z"] = matrix_json(hwdd::phase_op(d).matrix());
    json group = json::array();
    for (const hwdd::HwLabel& l : hwdd::hw_labels(d)) {
      json e;
      e["label"] = {l.alpha, l.beta};
      e["matrix"] = matrix_json(hwdd::hw_element(l).matrix());
      group.push_back(std::move(e));
    }
    out["group"] = std::move(group);
  } else {
    auto comma = label.find(',');
    if (comma == std::string::npos)
      throw ConfigError("--label: expected 'a,b', got '" + label + "'");
    int a, b;
    try {
      a = std::stoi(label.substr(0, comma));
      b = std::stoi(label.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("--label: expected integers 'a,b', got '" + label + "'");
    }
    hwdd::HwLabel l{a, b, d};
    out["label"] = {a, b};
    out["matrix"] = matrix_json(hwdd::hw_element(l).matrix());
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_seq_emit(const std::string& name, int d, double tau) {
  hwdd::PulseSequence seq;
  if (name == "dxd") seq = hwdd::dxd_sequence(d, tau, 1);
  else if (name == "universal") seq = hwdd::universal_sequence(d, tau);
  else if (name == "ckdd") seq = hwdd::ckdd_sequence(d, tau);
  else if (name == "spectator") seq = hwdd::spectator_ckdd_sequence(d, tau);
  else if (name == "simultaneous") seq = hwdd::simultaneous_sequence(d, tau);
  else throw ConfigError("--name: unknown sequence name '" + name + "'");

  json out;
  out["name"] = name;
  out["d"] = d;
  out["register_dims"] = seq.register_dims;
  out["tau_us"] = seq.tau;
  json timeline = json::array();
  for (const hwdd::Segment& s : seq.segments) {
    json seg;
    seg["interval_us"] = s.interval;
    json pulses = json::object();
    for (const hwdd::Pulse& p : s.pulses)
      pulses[std::to_string(p.qudit)] = matrix_json(p.op.matrix());
    seg["pulses"] = std::move(pulses);
    timeline.push_back(std::move(seg));
  }
  out["timeline"] = std::move(timeline);
  out["total_us"] = seq.total_duration();
  out["pulse_count"] = seq.pulse_count();
  out["native_pulse_count"] = seq.native_pulse_count();
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_analyze_scaling(const std::string& config_path, const GlobalFlags& gf) {
  hwdd::RunConfig rc = hwdd::load_config(config_path);
  if (rc.experiment != "scaling")
    throw ConfigError(config_path + ": experiment: 'analyze scaling' needs a scaling config");
  if (gf.seed) rc.scaling.seed = *gf.seed;
  if (gf.out) rc.output_dir = *gf.out;

  hwdd::ScalingResult r = hwdd::run_scaling(rc.scaling);
  std::string label = rc.scaling.sequence + " d=" + std::to_string(rc.scaling.d);
  hwdd::emit_scaling_outputs(r, label, rc.exp.config_json, rc.scaling.seed, rc.output_dir);

  json summary = {{"slope", r.slope},
                  {"intercept", r.intercept},
                  {"r_squared", r.r_squared},
                  {"points_used", r.points_used},
                  {"output_dir", rc.output_dir}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_run(const std::string& experiment, const std::string& config_path,
            const GlobalFlags& gf) {
  hwdd::RunConfig rc = hwdd::load_config(config_path);
  if (rc.experiment != experiment)
    throw ConfigError(config_path + ": experiment: config is for '" + rc.experiment +
                      "' but the subcommand asked for '" + experiment + "'");
  if (gf.seed) rc.exp.seed = *gf.seed;
  if (gf.threads) rc.exp.threads = *gf.threads;
  if (gf.out) rc.output_dir = *gf.out;

  hwdd::ExperimentResult r = hwdd::run_experiment(rc);
  hwdd::emit_outputs(r, rc.output_dir);
  std::cout << "wrote " << rc.output_dir << "/result.csv (" << r.curves.size()
            << " curves x " << r.times.size() << " points)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg-Weyl dynamical decoupling toolkit"};
  app.set_version_flag("--version", std::string(hwdd::kVersion));
  app.require_subcommand(1);
  // let --seed/--threads/--out appear after any subcommand (fallthrough is set
  // on every subcommand as it is created, see make_sub below)
  auto make_sub = [](CLI::App* parent, const std::string& name, const std::string& desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  GlobalFlags gf;
  std::uint64_t seed_val = 0;
  int threads_val = 1;
  std::string out_val;
  auto* seed_opt = app.add_option("--seed", seed_val, "Override the config seed");
  auto* threads_opt = app.add_option("--threads", threads_val, "Override worker thread count");
  auto* out_opt = app.add_option("--out", out_val, "Override the output directory");

  // hw dump
  auto* hw = make_sub(&app, "hw", "Heisenberg-Weyl operator utilities");
  hw->require_subcommand(1);
  auto* dump = make_sub(hw, "dump", "Print operators as JSON");
  int dump_d = 3;
  std::string dump_label;
  dump->add_option("--d", dump_d, "Qudit dimension")->required()->check(CLI::Range(2, 64));
  dump->add_option("--label", dump_label, "Single element 'a,b' instead of the whole group");

  // seq emit
  auto* sq = make_sub(&app, "seq", "Pulse-sequence utilities");
  sq->require_subcommand(1);
  auto* emit = make_sub(sq, "emit", "Print a sequence timeline as JSON");
  std::string emit_name = "dxd";
  int emit_d = 3;
  double emit_tau = 0.1;
  emit->add_option("--name", emit_name, "dxd|universal|ckdd|spectator|simultaneous")->required();
  emit->add_option("--d", emit_d, "Qudit dimension")->required()->check(CLI::Range(2, 64));
  emit->add_option("--tau", emit_tau, "Pulse interval (us)")->required()
      ->check(CLI::PositiveNumber);

  // analyze scaling
  auto* an = make_sub(&app, "analyze", "Decoupling analysis");
  an->require_subcommand(1);
  auto* sc = make_sub(an, "scaling", "Tau sweep with log-log infidelity fit");
  std::string sc_config;
  sc->add_option("--config", sc_config, "Scaling config JSON")->required();

  // run preserve|crosskerr|bell
  auto* run = make_sub(&app, "run", "Config-driven simulation experiments");
  run->require_subcommand(1);
  struct RunCmd {
    CLI::App* cmd;
    std::string config;
  };
  std::vector<std::pair<std::string, RunCmd>> run_cmds;
  run_cmds.reserve(3);  // CLI11 keeps pointers into the stored config strings
  for (const char* name : {"preserve", "crosskerr", "bell"}) {
    auto* c = make_sub(run, name, std::string("Run the ") + name + " experiment");
    run_cmds.push_back({name, {c, {}}});
    run_cmds.back().second.cmd->add_option("--config", run_cmds.back().second.config,
                                           "Experiment config JSON")
        ->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*seed_opt) gf.seed = seed_val;
  if (*threads_opt) gf.threads = threads_val;
  if (*out_opt) gf.out = out_val;

  try {
    if (dump->parsed()) return cmd_hw_dump(dump_d, dump_label);
    if (emit->parsed()) return cmd_seq_emit(emit_name, emit_d, emit_tau);
    if (sc->parsed()) return cmd_analyze_scaling(sc_config, gf);
    for (auto& [name, rcmd] : run_cmds)
      if (rcmd.cmd->parsed()) return cmd_run(name, rcmd.config, gf);
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
