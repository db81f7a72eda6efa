#pragma once

#include <string>

#include "hwdd/analysis.hpp"
#include "hwdd/simulator.hpp"

namespace hwdd {

// Scaling-run parameters (analyze scaling subcommand).
struct ScalingSpec {
  int d = 3;
  std::string sequence = "universal";  // universal | dxd | ckdd | simultaneous | free
  std::string hamiltonian = "random_hw";  // random_hw | cross_kerr
  std::string rates_key;               // device-rates key for cross_kerr
  int bath_dim = 1;
  double scale = 1.0;
  double bath_scale = 0.0;  // optional extra random system-bath term for cross_kerr runs
  double tau_min = 1e-4;    // us
  double tau_max = 1e-2;    // us
  int points = 16;
  std::uint64_t seed = 42;
};

struct RunConfig {
  int version = 1;
  std::string experiment;  // preserve | crosskerr | bell | scaling
  ExperimentConfig exp;    // preserve/crosskerr/bell payload
  ScalingSpec scaling;     // scaling payload
  std::string output_dir = "out";
};

// Parse + validate a config file; unknown keys are rejected, defaults filled,
// messages name the offending key. Throws ConfigError.
RunConfig load_config(const std::string& path);

// Same, from a JSON string (testable without touching the filesystem).
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Bundled device rate table lookup, key like "qutrit/Q1-Q2". Search order:
// HWDD_DATA env var, ./device_rates.json, compiled-in source data directory.
CrossKerrMatrix load_device_rates(const std::string& key);

// Path the rates would be loaded from (diagnostics / provenance).
std::string device_rates_path();

// Dispatch a parsed preserve/crosskerr/bell config to its runner.
ExperimentResult run_experiment(const RunConfig& rc);

// Tau sweep for a scaling spec: one fixed Hamiltonian realization, one cycle of
// the sequence per tau, global-phase-invariant infidelity fitted on log-log axes.
ScalingResult run_scaling(const ScalingSpec& spec);

}  // namespace hwdd
