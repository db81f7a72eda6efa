#pragma once

#include <utility>
#include <vector>

#include "hwdd/operator.hpp"

namespace hwdd {

// Instantaneous pulse on one register slot. error_factors lists the subspace
// sigma^x_(i,i+1) factors the pulse compiles into; apply_pulse_error builds its
// over-rotation generator from them (X_d pulses: the (d-1)-factor ladder; other
// non-identity Heisenberg-Weyl pulses: ladder plus one extra (0,1) factor).
struct Pulse {
  int qudit = 0;
  Operator op;
  std::vector<int> error_factors;
};

// One timeline slot: free evolution for `interval`, then the slot's pulses
// (at most one per qudit; applied together as a tensor-product pulse).
struct Segment {
  double interval = 0.0;  // us
  std::vector<Pulse> pulses;
};

struct PulseSequence {
  std::vector<int> register_dims;
  std::vector<Segment> segments;
  double tau = 0.0;  // base interval, us

  double total_duration() const;
  // ordered product of all pulses, free evolution ignored; cyclic sequences give e^{i theta} I
  Operator net_pulse_product() const;
  int pulse_count() const;         // pulse entries across all slots
  int native_pulse_count() const;  // 2 x total compiled factor count
};

// Compilation of a target gate into subspace sigma^x factors.
struct GateDecomposition {
  Operator target;
  // ((i, i+1), embedded subspace sigma^x) in application order: factors[0] acts
  // first, so target = factors[n-1] * ... * factors[0] as a matrix product
  std::vector<std::pair<std::pair<int, int>, Operator>> factors;
  int native_pulse_count = 0;
};

// |i><j| + |j><i| + sum_{k not in {i,j}} |k><k| on a d-level qudit
Operator subspace_sigma_x(int d, int i, int j);

// the segment's pulses assembled into one operator on the full register
Operator slot_pulse(const Segment& s, const std::vector<int>& register_dims);

// the whole timeline repeated `reps` times (reps = 0 gives an empty sequence)
PulseSequence repeat_sequence(const PulseSequence& seq, int reps);

// Group-cycle timeline: pulses g1 g0^dag, g2 g1^dag, ..., final gK^dag, one per
// interval; requires group[0] = I and all elements unitary on the same space.
PulseSequence cycle_sequence(const std::vector<Operator>& group, double tau);

// d equidistant X_d pulses per repetition: X f_tau X f_tau ... X f_tau
PulseSequence dxd_sequence(int d, double tau, int reps);

// cycle over all d^2 Heisenberg-Weyl elements in lexicographic (alpha, beta) order
PulseSequence universal_sequence(int d, double tau);

// Two-qudit staggered sequence: d^2 intervals; X_d on qudit 0 after every
// interval, X_d on qudit 1 after every d-th (same slot, tensor-product pulse).
PulseSequence ckdd_sequence(int d, double tau);

// Three-qudit variant: synchronized X_d on qudits 0 and 2 (spectators) every
// interval, X_d on qudit 1 (main, middle) every d-th; total d^2 tau.
PulseSequence spectator_ckdd_sequence(int d, double tau);

// Negative control: d intervals with lockstep X_d (x) X_d pulses.
PulseSequence simultaneous_sequence(int d, double tau);

// X_d = sx(0,1) sx(1,2) ... sx(d-2,d-1) (the (d-2,d-1) swap acts first); each
// swap costs two native half-swap rotations, so 2(d-1) natives in total.
GateDecomposition compile_shift(int d);

// Coherent over-rotation: every pulse P becomes P * e^{-i eps G_P} with
// G_P = sum over P's compiled factors of sigma^x_(i,i+1)/2. Requires |eps| < 0.2.
PulseSequence apply_pulse_error(const PulseSequence& seq, double epsilon);

}  // namespace hwdd
