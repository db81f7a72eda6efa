#include <cmath>

#include "hwdd/config.hpp"

namespace hwdd {

namespace {

// H for one scaling run; dims are {d, bath} or {d, d, bath}
Operator scaling_hamiltonian(const ScalingSpec& s) {
  if (s.hamiltonian == "random_hw")
    return random_hw_hamiltonian(s.d, s.bath_dim, s.scale, s.seed);

  // cross_kerr: device rates on two qudits, plus an optional system-bath
  // dephasing term on the first qudit (bath_scale == 0 keeps it purely diagonal)
  CrossKerrMatrix rates = load_device_rates(s.rates_key);
  if (rates.d != s.d)
    throw ConfigError("scaling.rates_key: '" + s.rates_key + "' is a d=" +
                      std::to_string(rates.d) + " table but scaling.d=" + std::to_string(s.d));
  int d = s.d, m = s.bath_dim;
  Operator h = kron(cross_kerr_hamiltonian(rates), Operator::identity({m}));
  h = h.with_dims({d, d, m});
  if (s.bath_scale > 0.0) {
    Prng g(sub_seed(s.seed, 1));
    DephasingSpec spec;
    spec.sigma = s.bath_scale;
    Operator zb = sample_bath_dephasing(d, m, spec, g);         // on {qudit0, bath}
    h = h + embed_operator(zb, {0, 2}, {d, d, m});              // qudit0 (x) I (x) bath
  }
  return h;
}

PulseSequence scaling_sequence(const ScalingSpec& s, double tau) {
  if (s.sequence == "free") {
    PulseSequence seq;
    seq.register_dims = {s.d};
    seq.tau = tau;
    Segment seg;
    seg.interval = tau;
    seq.segments.push_back(std::move(seg));
    return seq;
  }
  if (s.sequence == "universal") return universal_sequence(s.d, tau);
  if (s.sequence == "dxd") return dxd_sequence(s.d, tau, 1);
  if (s.sequence == "ckdd") return ckdd_sequence(s.d, tau);
  if (s.sequence == "simultaneous") return simultaneous_sequence(s.d, tau);
  throw ConfigError("scaling.sequence: unknown sequence name '" + s.sequence + "'");
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& rc) {
  if (rc.experiment == "preserve") return run_state_preservation(rc.exp);
  if (rc.experiment == "crosskerr") return run_cross_kerr(rc.exp);
  if (rc.experiment == "bell") return run_bell(rc.exp);
  throw ConfigError("experiment: '" + rc.experiment + "' is not a curve experiment");
}

ScalingResult run_scaling(const ScalingSpec& spec) {
  Operator h = scaling_hamiltonian(spec);
  std::vector<std::pair<double, double>> points;
  double ratio = spec.tau_max / spec.tau_min;
  for (int k = 0; k < spec.points; ++k) {
    double tau = spec.tau_min * std::pow(ratio, k / double(spec.points - 1));
    Operator u = evolve_sequence(h, scaling_sequence(spec, tau));
    points.push_back({tau, unitary_infidelity(u)});
  }
  return scaling_fit(points);
}

}  // namespace hwdd
