#include "hwdd/analysis.hpp"

#include <cmath>

namespace hwdd {

Operator commutant_project(const std::vector<Operator>& group, const Operator& omega) {
  if (group.empty()) throw NumericError("commutant_project: empty group");
  int gs = group[0].side();
  if (omega.side() % gs != 0)
    throw NumericError("commutant_project: group dimension does not divide omega's");
  int bath = omega.side() / gs;

  Matrix acc = Matrix::Zero(omega.side(), omega.side());
  for (const Operator& g : group) {
    if (g.side() != gs) throw NumericError("commutant_project: mixed group dimensions");
    Operator full = (bath == 1) ? g : kron(g, Operator::identity({bath}));
    acc += full.matrix().adjoint() * omega.matrix() * full.matrix();
  }
  acc /= double(group.size());
  return Operator(std::move(acc), omega.dims());
}

std::pair<double, double> ckdd_effective(const CrossKerrMatrix& ck) {
  int d = ck.d;
  Operator h = cross_kerr_hamiltonian(ck);

  // inner sequence group on qudit 0, then outer group on qudit 1
  std::vector<Operator> inner, outer;
  Operator x = shift_op(d);
  Operator xe = Operator::identity({d});
  for (int k = 0; k < d; ++k) {
    inner.push_back(kron(xe, Operator::identity({d})).with_dims({d, d}));
    outer.push_back(kron(Operator::identity({d}), xe).with_dims({d, d}));
    xe = x * xe;
  }

  Operator h1 = commutant_project(inner, h);
  Operator h2 = commutant_project(outer, h1);

  double zeta00 = ck.zeta00();
  Operator resid = h2 - Cx(zeta00, 0.0) * Operator::identity({d, d});
  return {zeta00, resid.max_abs()};
}

HwExpansion simultaneous_residual(const CrossKerrMatrix& ck) {
  int d = ck.d;
  Operator h = cross_kerr_hamiltonian(ck);

  std::vector<Operator> lockstep;
  Operator x = shift_op(d);
  Operator xe = Operator::identity({d});
  for (int k = 0; k < d; ++k) {
    lockstep.push_back(kron(xe, xe).with_dims({d, d}));
    xe = x * xe;
  }

  Operator proj = commutant_project(lockstep, h);
  return hw_expand(proj);
}

ScalingResult scaling_fit(const std::vector<std::pair<double, double>>& points) {
  ScalingResult out;
  std::vector<double> lx, ly;
  for (const auto& [tau, infid] : points) {
    out.tau_values.push_back(tau);
    out.infidelities.push_back(infid);
    if (infid > 1e-13 && infid < 1e-1 && tau > 0.0) {
      lx.push_back(std::log(tau));
      ly.push_back(std::log(infid));
    }
  }
  int n = static_cast<int>(lx.size());
  if (n < 4) throw NumericError("scaling_fit: fewer than 4 points inside the fit window");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw NumericError("scaling_fit: degenerate tau values");
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  out.points_used = n;

  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (int i = 0; i < n; ++i) {
    double fit = out.slope * lx[i] + out.intercept;
    ss_res += (ly[i] - fit) * (ly[i] - fit);
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
  }
  out.r_squared = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
  return out;
}

}  // namespace hwdd
