#pragma once

#include <utility>
#include <vector>

#include "hwdd/hamiltonians.hpp"
#include "hwdd/heisenberg_weyl.hpp"
#include "hwdd/operator.hpp"

namespace hwdd {

struct ScalingResult {
  std::vector<double> tau_values;   // us
  std::vector<double> infidelities;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

// Group average (1/|G|) sum_g (g (x) I)^dag Omega (g (x) I); group elements act on
// the leading system factor, any trailing bath factor is conjugated by identity.
Operator commutant_project(const std::vector<Operator>& group, const Operator& omega);

// Sequential projection of the cross-Kerr Hamiltonian under {X^k (x) I} then
// {I (x) X^k}; returns (zeta00, max-norm residual of H'' - zeta00 * I).
std::pair<double, double> ckdd_effective(const CrossKerrMatrix& ck);

// Projection of the cross-Kerr Hamiltonian under the lockstep {X^k (x) X^k} group,
// expanded in the two-qudit Heisenberg-Weyl basis; retains (0,k)(x)(0,l) terms
// with (k+l) mod d = 0.
HwExpansion simultaneous_residual(const CrossKerrMatrix& ck);

// Least-squares fit of log(infidelity) vs log(tau) over points with
// infidelity in (1e-13, 1e-1); requires at least 4 points in the window.
ScalingResult scaling_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace hwdd
