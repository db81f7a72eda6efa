#include "hwdd/sequences.hpp"

#include <cmath>

#include "hwdd/heisenberg_weyl.hpp"

namespace hwdd {

namespace {

// factor list for a pulse proportional to the Heisenberg-Weyl element (a, b):
// identity -> none; pure shift X_d -> the ladder; anything else -> ladder + (0,1)
std::vector<int> hw_error_factors(int d, int a, int b) {
  if (a == 0 && b == 0) return {};
  std::vector<int> f;
  for (int i = 0; i < d - 1; ++i) f.push_back(i);
  if (!(a == 1 && b == 0)) f.push_back(0);
  return f;
}

std::vector<int> ladder_factors(int d) {
  std::vector<int> f;
  for (int i = 0; i < d - 1; ++i) f.push_back(i);
  return f;
}

bool proportional_to_identity(const Operator& p, double tol = 1e-12) {
  Cx s = p.trace() / double(p.side());
  Operator diff = p - s * Operator::identity(p.dims());
  return diff.max_abs() <= tol;
}

Pulse make_pulse(int qudit, Operator op, std::vector<int> factors) {
  Pulse p;
  p.qudit = qudit;
  p.op = std::move(op);
  p.error_factors = std::move(factors);
  return p;
}

}  // namespace

double PulseSequence::total_duration() const {
  double t = 0.0;
  for (const Segment& s : segments) t += s.interval;
  return t;
}

Operator slot_pulse(const Segment& s, const std::vector<int>& register_dims) {
  std::vector<Operator> factors;
  for (int q = 0; q < static_cast<int>(register_dims.size()); ++q) {
    const Pulse* found = nullptr;
    for (const Pulse& p : s.pulses)
      if (p.qudit == q) found = &p;
    if (found) {
      if (found->op.side() != register_dims[q])
        throw NumericError("slot_pulse: pulse dimension does not match its register slot");
      factors.push_back(found->op);
    } else {
      factors.push_back(Operator::identity({register_dims[q]}));
    }
  }
  Operator slot = factors[0];
  for (size_t k = 1; k < factors.size(); ++k) slot = kron(slot, factors[k]);
  return slot.with_dims(register_dims);
}

PulseSequence repeat_sequence(const PulseSequence& seq, int reps) {
  if (reps < 0) throw NumericError("repeat_sequence: reps must be >= 0");
  PulseSequence out;
  out.register_dims = seq.register_dims;
  out.tau = seq.tau;
  for (int r = 0; r < reps; ++r)
    out.segments.insert(out.segments.end(), seq.segments.begin(), seq.segments.end());
  return out;
}

Operator PulseSequence::net_pulse_product() const {
  Operator acc = Operator::identity(register_dims);
  for (const Segment& s : segments) {
    if (s.pulses.empty()) continue;
    acc = slot_pulse(s, register_dims) * acc;
  }
  return acc;
}

int PulseSequence::pulse_count() const {
  int n = 0;
  for (const Segment& s : segments) n += static_cast<int>(s.pulses.size());
  return n;
}

int PulseSequence::native_pulse_count() const {
  int n = 0;
  for (const Segment& s : segments)
    for (const Pulse& p : s.pulses) n += 2 * static_cast<int>(p.error_factors.size());
  return n;
}

Operator subspace_sigma_x(int d, int i, int j) {
  if (d < 2 || i < 0 || j < 0 || i >= d || j >= d || i == j)
    throw NumericError("subspace_sigma_x: bad levels");
  Matrix m = Matrix::Identity(d, d);
  m(i, i) = 0.0;
  m(j, j) = 0.0;
  m(i, j) = 1.0;
  m(j, i) = 1.0;
  return Operator(std::move(m), {d});
}

PulseSequence cycle_sequence(const std::vector<Operator>& group, double tau) {
  if (group.empty()) throw NumericError("cycle_sequence: empty group");
  int d = group[0].side();
  if (!proportional_to_identity(group[0]) || std::abs(group[0].trace() - Cx(d, 0)) > 1e-12)
    throw NumericError("cycle_sequence: group[0] must be the identity");
  for (const Operator& g : group) {
    if (g.side() != d) throw NumericError("cycle_sequence: mixed dimensions in group");
    if (!g.is_unitary(1e-10)) throw NumericError("cycle_sequence: non-unitary group element");
  }

  PulseSequence seq;
  seq.register_dims = {d};
  seq.tau = tau;
  int n = static_cast<int>(group.size());
  for (int j = 0; j < n; ++j) {
    Segment s;
    s.interval = tau;
    // composite pulse after interval j: g_{j+1} g_j^dag, final slot g_{n-1}^dag
    Operator p = (j + 1 < n) ? group[j + 1] * group[j].dagger() : group[n - 1].dagger();
    if (n > 1) {
      std::vector<int> fac =
          proportional_to_identity(p) ? std::vector<int>{} : ladder_factors(d);
      s.pulses.push_back(make_pulse(0, std::move(p), std::move(fac)));
    }
    // trivial group {I}: single free interval, no pulses
    seq.segments.push_back(std::move(s));
  }
  return seq;
}

PulseSequence dxd_sequence(int d, double tau, int reps) {
  if (d < 2) throw NumericError("dxd_sequence: dimension must be >= 2");
  if (reps < 1) throw NumericError("dxd_sequence: reps must be >= 1");
  Operator x = shift_op(d);
  PulseSequence seq;
  seq.register_dims = {d};
  seq.tau = tau;
  for (int r = 0; r < reps * d; ++r) {
    Segment s;
    s.interval = tau;
    s.pulses.push_back(make_pulse(0, x, ladder_factors(d)));
    seq.segments.push_back(std::move(s));
  }
  return seq;
}

PulseSequence universal_sequence(int d, double tau) {
  std::vector<HwLabel> labels = hw_labels(d);
  PulseSequence seq = cycle_sequence(hw_group(d), tau);
  // refine the error-factor metadata using label arithmetic: the composite pulse
  // between frames j and j+1 is proportional to the element labeled by the
  // mod-d label difference
  int n = static_cast<int>(labels.size());
  for (int j = 0; j < n; ++j) {
    int da, db;
    if (j + 1 < n) {
      da = (labels[j + 1].alpha - labels[j].alpha + d) % d;
      db = (labels[j + 1].beta - labels[j].beta + d) % d;
    } else {
      da = (d - labels[n - 1].alpha) % d;
      db = (d - labels[n - 1].beta) % d;
    }
    for (Pulse& p : seq.segments[j].pulses) p.error_factors = hw_error_factors(d, da, db);
  }
  return seq;
}

PulseSequence ckdd_sequence(int d, double tau) {
  if (d < 2) throw NumericError("ckdd_sequence: dimension must be >= 2");
  Operator x = shift_op(d);
  PulseSequence seq;
  seq.register_dims = {d, d};
  seq.tau = tau;
  for (int slot = 1; slot <= d * d; ++slot) {
    Segment s;
    s.interval = tau;
    s.pulses.push_back(make_pulse(0, x, ladder_factors(d)));
    if (slot % d == 0) s.pulses.push_back(make_pulse(1, x, ladder_factors(d)));
    seq.segments.push_back(std::move(s));
  }
  return seq;
}

PulseSequence spectator_ckdd_sequence(int d, double tau) {
  if (d < 2) throw NumericError("spectator_ckdd_sequence: dimension must be >= 2");
  Operator x = shift_op(d);
  PulseSequence seq;
  seq.register_dims = {d, d, d};
  seq.tau = tau;
  for (int slot = 1; slot <= d * d; ++slot) {
    Segment s;
    s.interval = tau;
    s.pulses.push_back(make_pulse(0, x, ladder_factors(d)));
    if (slot % d == 0) s.pulses.push_back(make_pulse(1, x, ladder_factors(d)));
    s.pulses.push_back(make_pulse(2, x, ladder_factors(d)));
    seq.segments.push_back(std::move(s));
  }
  return seq;
}

PulseSequence simultaneous_sequence(int d, double tau) {
  if (d < 2) throw NumericError("simultaneous_sequence: dimension must be >= 2");
  Operator x = shift_op(d);
  PulseSequence seq;
  seq.register_dims = {d, d};
  seq.tau = tau;
  for (int slot = 0; slot < d; ++slot) {
    Segment s;
    s.interval = tau;
    s.pulses.push_back(make_pulse(0, x, ladder_factors(d)));
    s.pulses.push_back(make_pulse(1, x, ladder_factors(d)));
    seq.segments.push_back(std::move(s));
  }
  return seq;
}

GateDecomposition compile_shift(int d) {
  if (d < 2) throw NumericError("compile_shift: dimension must be >= 2");
  GateDecomposition g;
  g.target = shift_op(d);
  // X_d = sx(0,1) sx(1,2) ... sx(d-2,d-1): the top-level swap acts first so each
  // amplitude cascades one step; factors stored in application order.
  for (int i = d - 2; i >= 0; --i)
    g.factors.push_back({{i, i + 1}, subspace_sigma_x(d, i, i + 1)});
  g.native_pulse_count = 2 * static_cast<int>(g.factors.size());
  return g;
}

PulseSequence apply_pulse_error(const PulseSequence& seq, double epsilon) {
  if (std::abs(epsilon) >= 0.2) throw NumericError("apply_pulse_error: |epsilon| must be < 0.2");
  if (epsilon == 0.0) return seq;
  PulseSequence out = seq;
  for (Segment& s : out.segments)
    for (Pulse& p : s.pulses) {
      if (p.error_factors.empty()) continue;
      int d = p.op.side();
      Operator gen = Operator::zeros({d});
      for (int i : p.error_factors) {
        Matrix m = Matrix::Zero(d, d);
        m(i, i + 1) = 0.5;
        m(i + 1, i) = 0.5;
        gen = gen + Operator(std::move(m), {d});
      }
      p.op = p.op * expm_hermitian(gen, epsilon);
    }
  return out;
}

}  // namespace hwdd
