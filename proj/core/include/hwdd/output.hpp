#pragma once

#include <string>

#include "hwdd/analysis.hpp"
#include "hwdd/simulator.hpp"

namespace hwdd {

// double -> shortest exact decimal (17 significant digits), round-trip safe
std::string format_g17(double v);

// CSV with header time_us,fidelity_mean,fidelity_stderr,label,sequence,d,seed
std::string result_csv(const ExperimentResult& r);

// Writes result.csv, result.json (provenance: config echo, seed, library version)
// and plot.svg into dir. Throws ConfigError on empty grids, NumericError on bad
// fidelities, std::runtime_error with path context on I/O failure.
void emit_outputs(const ExperimentResult& r, const std::string& dir);

// Scaling run outputs: result.csv (tau_us, infidelity), result.json (fit), and a
// log-log plot.svg with the fitted slope annotated.
void emit_scaling_outputs(const ScalingResult& r, const std::string& label,
                          const std::string& config_json, std::uint64_t seed,
                          const std::string& dir);

}  // namespace hwdd
