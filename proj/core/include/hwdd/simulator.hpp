#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hwdd/hamiltonians.hpp"
#include "hwdd/operator.hpp"
#include "hwdd/sequences.hpp"

namespace hwdd {

// One requested sequence variant of an experiment.
struct SequenceSpec {
  std::string name = "none";  // none | dxd | universal | ckdd | spectator | simultaneous
  int reps = 1;
  std::string label;  // display label; defaulted from name/reps when empty

  std::string display() const;
};

struct ExperimentConfig {
  std::vector<int> register_dims;
  std::vector<SequenceSpec> sequences;
  NoiseModel noise;
  std::vector<double> time_grid;      // total evolution times, us, strictly increasing
  std::string tau_mode = "scaled";    // scaled: tau = T / intervals; fixed: reps grow with T
  double tau = 0.0;                   // base interval for fixed mode, us
  double pulse_error = 0.0;
  int shots = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config_json;  // serialized config echo for provenance outputs
};

struct Curve {
  std::string label;     // e.g. sequence display name or spectator state "|i,j>"
  std::string sequence;  // sequence variant name
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct ExperimentResult {
  std::string experiment;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<double> times;  // us
  std::vector<Curve> curves;
  std::string config_json;

  // final-time two-qudit density matrices (Bell experiment only), one per curve
  std::vector<Operator> final_rho;
};

// Alternate e^{-i h dt} and pulse application in timeline order. h lives on
// register (x) optional bath factor; pulses touch only the register slots.
Operator evolve_sequence(const Operator& h, const PulseSequence& seq);

// |+>_d preservation under quasi-static dephasing, one curve per sequence variant.
ExperimentResult run_state_preservation(const ExperimentConfig& cfg);

// Spectator-conditioned main-qudit coherence under cross-Kerr couplings; one curve
// per spectator basis preparation per sequence variant.
ExperimentResult run_cross_kerr(const ExperimentConfig& cfg);

// Two-qutrit maximally entangled state under cross-Kerr + optional dephasing.
ExperimentResult run_bell(const ExperimentConfig& cfg);

// Mean and standard error per grid point over seeded shots. The closure maps a
// per-shot sub-seed to the full grid of fidelities; accumulation uses
// pre-assigned slots so the result is independent of thread count.
std::pair<std::vector<double>, std::vector<double>> ensemble_average(
    const std::function<std::vector<double>(std::uint64_t)>& run, int shots,
    std::uint64_t seed, int threads = 1);

}  // namespace hwdd
