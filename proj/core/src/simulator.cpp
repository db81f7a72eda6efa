#include "hwdd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "hwdd/heisenberg_weyl.hpp"

namespace hwdd {

namespace {

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

void check_grid(const ExperimentConfig& cfg) {
  if (cfg.time_grid.empty()) throw ConfigError("time_grid: must not be empty");
  for (size_t k = 1; k < cfg.time_grid.size(); ++k)
    if (cfg.time_grid[k] <= cfg.time_grid[k - 1])
      throw ConfigError("time_grid: must be strictly increasing");
  if (cfg.shots < 1) throw ConfigError("shots: must be >= 1");
}

// intervals in one cycle of the named sequence
int cycle_intervals(const std::string& name, int d, int reps) {
  if (name == "dxd") return d * reps;
  if (name == "universal") return d * d;
  if (name == "ckdd" || name == "spectator") return d * d;
  if (name == "simultaneous") return d;
  throw ConfigError("sequence: unknown name '" + name + "'");
}

// one block of the named sequence (dxd: `reps` pulse groups back to back)
PulseSequence build_cycle(const std::string& name, int d, double tau, int reps) {
  if (name == "dxd") return dxd_sequence(d, tau, reps);
  if (name == "universal") return universal_sequence(d, tau);
  if (name == "ckdd") return ckdd_sequence(d, tau);
  if (name == "spectator") return spectator_ckdd_sequence(d, tau);
  if (name == "simultaneous") return simultaneous_sequence(d, tau);
  throw ConfigError("sequence: unknown name '" + name + "'");
}

// materialize a sequence variant for total time T on the given register
PulseSequence realize_sequence(const ExperimentConfig& cfg, const SequenceSpec& spec, double T) {
  const std::vector<int>& reg = cfg.register_dims;
  int d = reg[0];

  PulseSequence seq;
  if (spec.name == "none") {
    seq.register_dims = reg;
    seq.tau = T;
    Segment s;
    s.interval = T;
    seq.segments.push_back(std::move(s));
  } else if (cfg.tau_mode == "scaled") {
    // pulse spacing shrinks with T so the whole grid uses one cycle of the sequence
    int n = cycle_intervals(spec.name, d, spec.reps);
    seq = build_cycle(spec.name, d, T / double(n), spec.reps);
    if (seq.register_dims != reg)
      throw ConfigError("sequence: '" + spec.name + "' does not fit this register");
  } else if (cfg.tau_mode == "fixed") {
    // pulse spacing is held at cfg.tau; longer times mean more cycles
    if (cfg.tau <= 0.0) throw ConfigError("tau_us: must be > 0 in fixed mode");
    double cycle_time = cycle_intervals(spec.name, d, spec.reps) * cfg.tau;
    int cycles = static_cast<int>(std::llround(T / cycle_time));
    if (std::abs(T - cycles * cycle_time) > 1e-9 * std::max(1.0, T))
      throw ConfigError("time_grid: time " + std::to_string(T) +
                        " is not a whole number of sequence cycles in fixed mode");
    PulseSequence cycle = build_cycle(spec.name, d, cfg.tau, spec.reps);
    if (cycle.register_dims != reg)
      throw ConfigError("sequence: '" + spec.name + "' does not fit this register");
    seq = repeat_sequence(cycle, cycles);
  } else {
    throw ConfigError("tau_mode: must be 'scaled' or 'fixed'");
  }

  if (cfg.pulse_error != 0.0) seq = apply_pulse_error(seq, cfg.pulse_error);
  return seq;
}

// quasi-static noise realization for one shot (dephasing resampled, couplings static)
Operator shot_hamiltonian(const ExperimentConfig& cfg, std::uint64_t sub) {
  Prng g(sub);
  std::vector<std::pair<std::vector<int>, Operator>> parts;
  for (const CouplingSpec& c : cfg.noise.couplings)
    parts.push_back({{c.a, c.b}, cross_kerr_hamiltonian(c.rates)});
  for (const DephasingSpec& spec : cfg.noise.dephasing) {
    if (spec.qudit < 0 || spec.qudit >= static_cast<int>(cfg.register_dims.size()))
      throw ConfigError("dephasing: qudit index out of range");
    int d = cfg.register_dims[spec.qudit];
    parts.push_back({{spec.qudit}, dephasing_hamiltonian(d, sample_dephasing(d, spec, g))});
  }
  return compose_register(cfg.register_dims, parts);
}

void validate_result(const ExperimentResult& r) {
  for (const Curve& c : r.curves) {
    for (double v : c.mean)
      if (!(v >= -1e-9 && v <= 1.0 + 1e-9))
        throw NumericError("fidelity outside [0,1]: " + std::to_string(v));
    for (double v : c.stderr_)
      if (!(v >= 0.0)) throw NumericError("negative stderr");
  }
}

std::string dxd_label(int d, int reps) {
  return std::to_string(reps) + "x" + std::to_string(d) + "X" + std::to_string(d);
}

std::string variant_label(const SequenceSpec& spec, int d) {
  if (!spec.label.empty()) return spec.label;
  if (spec.name == "none") return "no-dd";
  if (spec.name == "dxd") return dxd_label(d, spec.reps);
  if (spec.name == "spectator") return "spectator-ckdd";
  return spec.name;
}

}  // namespace

std::string SequenceSpec::display() const {
  if (!label.empty()) return label;
  if (name == "dxd" && reps != 1) return std::to_string(reps) + "x dxd";
  return name;
}

Operator evolve_sequence(const Operator& h, const PulseSequence& seq) {
  int sys = product(seq.register_dims);
  if (h.side() % sys != 0)
    throw NumericError("evolve_sequence: register does not divide the Hamiltonian dimension");
  int bath = h.side() / sys;
  if (!h.is_hermitian(1e-12)) throw NumericError("evolve_sequence: Hamiltonian not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw NumericError("evolve_sequence: eigendecomposition failed");

  std::map<double, Matrix> free_cache;
  auto free_for = [&](double t) -> const Matrix& {
    auto it = free_cache.find(t);
    if (it != free_cache.end()) return it->second;
    Vector ph(h.side());
    for (int k = 0; k < h.side(); ++k) ph(k) = std::polar(1.0, -t * es.eigenvalues()(k));
    Matrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    return free_cache.emplace(t, std::move(u)).first->second;
  };

  Matrix u = Matrix::Identity(h.side(), h.side());
  for (const Segment& s : seq.segments) {
    if (s.interval != 0.0) u = free_for(s.interval) * u;
    if (!s.pulses.empty()) {
      Operator p = slot_pulse(s, seq.register_dims);
      if (bath > 1) p = kron(p, Operator::identity({bath}));
      u = p.matrix() * u;
    }
  }

  Operator out(std::move(u), h.dims());
  if (!out.is_unitary(1e-10)) throw NumericError("evolve_sequence: evolution lost unitarity");
  return out;
}

std::pair<std::vector<double>, std::vector<double>> ensemble_average(
    const std::function<std::vector<double>(std::uint64_t)>& run, int shots, std::uint64_t seed,
    int threads) {
  if (shots < 1) throw ConfigError("shots: must be >= 1");
  std::vector<std::vector<double>> rows(shots);

  auto work = [&](int begin, int step) {
    for (int s = begin; s < shots; s += step) rows[s] = run(sub_seed(seed, s));
  };

  int n_threads = std::max(1, std::min(threads, shots));
  if (n_threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
    for (auto& t : pool) t.join();
  }

  size_t grid = rows[0].size();
  for (const auto& r : rows)
    if (r.size() != grid) throw NumericError("ensemble_average: ragged shot results");

  std::vector<double> mean(grid, 0.0), se(grid, 0.0);
  for (size_t g = 0; g < grid; ++g) {
    double acc = 0.0;
    for (int s = 0; s < shots; ++s) acc += rows[s][g];  // fixed order: thread-count invariant
    mean[g] = acc / shots;
  }
  if (shots > 1) {
    for (size_t g = 0; g < grid; ++g) {
      double acc = 0.0;
      for (int s = 0; s < shots; ++s) {
        double dv = rows[s][g] - mean[g];
        acc += dv * dv;
      }
      se[g] = std::sqrt(acc / (double(shots) * double(shots - 1)));
    }
  }
  return {std::move(mean), std::move(se)};
}

ExperimentResult run_state_preservation(const ExperimentConfig& cfg) {
  if (cfg.register_dims.size() != 1)
    throw ConfigError("register: state preservation needs a single qudit");
  check_grid(cfg);
  if (cfg.sequences.empty()) throw ConfigError("sequences: at least one variant required");
  if (!cfg.noise.couplings.empty())
    throw ConfigError("cross_kerr: not applicable to a single-qudit register");

  int d = cfg.register_dims[0];
  int m = cfg.noise.bath_dim;
  StateVector plus = StateVector::plus_state(d);

  ExperimentResult out;
  out.experiment = "preserve";
  out.d = d;
  out.seed = cfg.seed;
  out.times = cfg.time_grid;
  out.config_json = cfg.config_json;

  for (const SequenceSpec& spec : cfg.sequences) {
    auto shot = [&](std::uint64_t sub) {
      Prng g(sub);
      Operator h = Operator::zeros({d, m});
      if (m == 1) {
        std::vector<std::pair<std::vector<int>, Operator>> parts;
        for (const DephasingSpec& dspec : cfg.noise.dephasing) {
          if (dspec.qudit != 0) throw ConfigError("dephasing: qudit index out of range");
          parts.push_back({{0}, dephasing_hamiltonian(d, sample_dephasing(d, dspec, g))});
        }
        h = compose_register({d}, parts).with_dims({d, 1});
      } else {
        for (const DephasingSpec& dspec : cfg.noise.dephasing) {
          if (dspec.qudit != 0) throw ConfigError("dephasing: qudit index out of range");
          h = h + sample_bath_dephasing(d, m, dspec, g);
        }
      }

      std::vector<double> fids;
      fids.reserve(cfg.time_grid.size());
      for (double T : cfg.time_grid) {
        PulseSequence seq = realize_sequence(cfg, spec, T);
        Operator u = evolve_sequence(h, seq);
        if (m == 1) {
          Cx a = (plus.amplitudes().adjoint() * u.matrix() * plus.amplitudes())(0, 0);
          fids.push_back(std::norm(a));
        } else {
          // bath starts maximally mixed: average over bath basis states,
          // then keep the |+><+| (x) I_bath population of the evolved state
          double f = 0.0;
          for (int bidx = 0; bidx < m; ++bidx) {
            Vector psi0 = Vector::Zero(d * m);
            for (int k = 0; k < d; ++k) psi0(k * m + bidx) = plus.amplitudes()(k);
            Vector psiT = u.matrix() * psi0;
            for (int bp = 0; bp < m; ++bp) {
              Cx amp = 0.0;
              for (int k = 0; k < d; ++k)
                amp += std::conj(plus.amplitudes()(k)) * psiT(k * m + bp);
              f += std::norm(amp) / m;
            }
          }
          fids.push_back(f);
        }
      }
      return fids;
    };

    auto [mean, se] = ensemble_average(shot, cfg.shots, cfg.seed, cfg.threads);
    Curve c;
    c.label = variant_label(spec, d);
    c.sequence = spec.name;
    c.mean = std::move(mean);
    c.stderr_ = std::move(se);
    out.curves.push_back(std::move(c));
  }

  validate_result(out);
  return out;
}

ExperimentResult run_cross_kerr(const ExperimentConfig& cfg) {
  size_t nq = cfg.register_dims.size();
  if (nq != 2 && nq != 3) throw ConfigError("register: cross-Kerr experiment needs 2 or 3 qudits");
  check_grid(cfg);
  if (cfg.noise.couplings.empty()) throw ConfigError("cross_kerr: at least one coupling required");
  if (cfg.noise.bath_dim != 1)
    throw ConfigError("bath_dim: cross-Kerr experiment is classical (bath_dim = 1)");
  for (size_t k = 1; k < nq; ++k)
    if (cfg.register_dims[k] != cfg.register_dims[0])
      throw ConfigError("register: cross-Kerr experiment expects equal qudit dimensions");
  for (const CouplingSpec& c : cfg.noise.couplings) {
    if (c.a < 0 || c.b < 0 || c.a >= static_cast<int>(nq) || c.b >= static_cast<int>(nq) ||
        c.a == c.b)
      throw ConfigError("cross_kerr: pair indices out of range");
    if (c.rates.d != cfg.register_dims[0])
      throw ConfigError("cross_kerr: rate table dimension does not match the register");
  }

  int d = cfg.register_dims[0];
  const int main_q = 1;  // the qudit held in |+>: second slot for 2 qudits, middle for 3
  StateVector plus = StateVector::plus_state(d);

  // spectator preparations: |i> (2-qudit) or |i,j> (3-qudit)
  std::vector<std::vector<int>> preps;
  if (nq == 2) {
    for (int i = 0; i < d; ++i) preps.push_back({i});
  } else {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) preps.push_back({i, j});
  }

  ExperimentResult out;
  out.experiment = "crosskerr";
  out.d = d;
  out.seed = cfg.seed;
  out.times = cfg.time_grid;
  out.config_json = cfg.config_json;

  // initial state per prep: spectators in basis levels, main qudit in |+>
  std::vector<StateVector> inits;
  for (const std::vector<int>& prep : preps) {
    std::vector<int> levels(nq, 0);
    levels[0] = prep[0];
    if (nq == 3) levels[2] = prep[1];

    Vector psi0 = Vector::Zero(product(cfg.register_dims));
    int stride_main = 1;
    for (size_t k = main_q + 1; k < nq; ++k) stride_main *= cfg.register_dims[k];
    int base = 0;
    for (size_t k = 0; k < nq; ++k) {
      int digit = (static_cast<int>(k) == main_q) ? 0 : levels[k];
      int stride = 1;
      for (size_t j = k + 1; j < nq; ++j) stride *= cfg.register_dims[j];
      base += digit * stride;
    }
    for (int level = 0; level < d; ++level)
      psi0(base + level * stride_main) = plus.amplitudes()(level);
    inits.emplace_back(std::move(psi0), cfg.register_dims);
  }

  for (const SequenceSpec& spec : cfg.sequences) {
    if (spec.name != "none") {
      if (nq == 2 && spec.name != "ckdd" && spec.name != "simultaneous")
        throw ConfigError("sequences: '" + spec.name + "' does not fit a 2-qudit register");
      if (nq == 3 && spec.name != "spectator")
        throw ConfigError("sequences: '" + spec.name + "' does not fit a 3-qudit register");
    }

    // one evolution per (shot, time); every prep is scored from the same unitary
    auto shot = [&](std::uint64_t sub) {
      Operator h = shot_hamiltonian(cfg, sub);
      std::vector<double> fids;  // flattened [time][prep]
      fids.reserve(cfg.time_grid.size() * preps.size());
      for (double T : cfg.time_grid) {
        PulseSequence seq = realize_sequence(cfg, spec, T);
        Operator u = evolve_sequence(h, seq);
        for (const StateVector& init : inits) {
          StateVector psiT = apply(u, init);
          Operator rho_main = partial_trace(projector(psiT), {main_q});
          fids.push_back(state_fidelity(rho_main, plus));
        }
      }
      return fids;
    };

    auto [mean, se] = ensemble_average(shot, cfg.shots, cfg.seed, cfg.threads);

    for (size_t p = 0; p < preps.size(); ++p) {
      const std::vector<int>& prep = preps[p];
      Curve c;
      std::string prep_label =
          (nq == 2) ? "|" + std::to_string(prep[0]) + ">"
                    : "|" + std::to_string(prep[0]) + "," + std::to_string(prep[1]) + ">";
      c.label = variant_label(spec, d) + " " + prep_label;
      c.sequence = spec.name;
      for (size_t t = 0; t < cfg.time_grid.size(); ++t) {
        c.mean.push_back(mean[t * preps.size() + p]);
        c.stderr_.push_back(se[t * preps.size() + p]);
      }
      out.curves.push_back(std::move(c));
    }
  }

  validate_result(out);
  return out;
}

ExperimentResult run_bell(const ExperimentConfig& cfg) {
  if (cfg.register_dims != std::vector<int>{3, 3})
    throw ConfigError("register: Bell experiment runs on two qutrits");
  check_grid(cfg);
  if (cfg.noise.couplings.size() != 1)
    throw ConfigError("cross_kerr: Bell experiment needs exactly one coupling");
  if (cfg.noise.bath_dim != 1) throw ConfigError("bath_dim: Bell experiment is classical");

  int d = 3;
  StateVector bell = StateVector::maximally_entangled(d);

  ExperimentResult out;
  out.experiment = "bell";
  out.d = d;
  out.seed = cfg.seed;
  out.times = cfg.time_grid;
  out.config_json = cfg.config_json;

  for (const SequenceSpec& spec : cfg.sequences) {
    if (spec.name != "none" && spec.name != "ckdd" && spec.name != "simultaneous")
      throw ConfigError("sequences: '" + spec.name + "' does not fit the Bell experiment");

    auto shot = [&](std::uint64_t sub) {
      Operator h = shot_hamiltonian(cfg, sub);
      std::vector<double> fids;
      fids.reserve(cfg.time_grid.size());
      for (double T : cfg.time_grid) {
        PulseSequence seq = realize_sequence(cfg, spec, T);
        Operator u = evolve_sequence(h, seq);
        StateVector psiT = apply(u, bell);
        fids.push_back(std::norm(overlap(bell, psiT)));
      }
      return fids;
    };

    auto [mean, se] = ensemble_average(shot, cfg.shots, cfg.seed, cfg.threads);
    Curve c;
    c.label = variant_label(spec, d);
    c.sequence = spec.name;
    c.mean = std::move(mean);
    c.stderr_ = std::move(se);
    out.curves.push_back(std::move(c));

    // ensemble-mean density matrix at the final grid point (histogram material)
    double T = cfg.time_grid.back();
    Matrix rho = Matrix::Zero(9, 9);
    for (int s = 0; s < cfg.shots; ++s) {
      Operator h = shot_hamiltonian(cfg, sub_seed(cfg.seed, s));
      PulseSequence seq = realize_sequence(cfg, spec, T);
      Operator u = evolve_sequence(h, seq);
      StateVector psiT = apply(u, bell);
      rho += psiT.amplitudes() * psiT.amplitudes().adjoint();
    }
    rho /= double(cfg.shots);
    out.final_rho.push_back(Operator(std::move(rho), {3, 3}));
  }

  validate_result(out);
  return out;
}

}  // namespace hwdd
