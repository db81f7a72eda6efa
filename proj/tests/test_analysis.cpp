#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hwdd/analysis.hpp"
#include "hwdd/sequences.hpp"
#include "hwdd/simulator.hpp"

using namespace hwdd;

namespace {

double max_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

CrossKerrMatrix qutrit_q1q2() {
  Eigen::MatrixXd m(2, 2);
  m << 0.112, 0.623, -0.515, 0.341;
  return CrossKerrMatrix::from_mhz(3, m);
}

CrossKerrMatrix qutrit_q2q3() {
  Eigen::MatrixXd m(2, 2);
  m << 0.212, 0.465, -0.162, 0.615;
  return CrossKerrMatrix::from_mhz(3, m);
}

CrossKerrMatrix ququart_q1q2() {
  Eigen::MatrixXd m(3, 3);
  m << 0.112, 0.623, 0.021, -0.515, 0.341, 0.730, 0.226, -0.442, 0.345;
  return CrossKerrMatrix::from_mhz(4, m);
}

std::vector<Operator> x_powers(int d) {
  std::vector<Operator> g;
  Operator x = shift_op(d);
  Operator xe = Operator::identity({d});
  for (int k = 0; k < d; ++k) {
    g.push_back(xe);
    xe = x * xe;
  }
  return g;
}

// principal-branch effective generator: U = e^{-i h T}  =>  h = V diag(-arg(lambda)/T) V^-1
Matrix effective_generator(const Operator& u, double total_time) {
  Eigen::ComplexEigenSolver<Matrix> es(u.matrix());
  Eigen::VectorXcd lam = es.eigenvalues();
  Matrix v = es.eigenvectors();
  Eigen::VectorXcd diag(lam.size());
  for (int k = 0; k < lam.size(); ++k)
    diag(k) = Cx(-std::arg(lam(k)) / total_time, 0.0);
  return v * diag.asDiagonal() * v.inverse();
}

}  // namespace

TEST_CASE("group average is idempotent, linear, and lands in the commutant") {
  const int d = 3;
  std::vector<Operator> group = hw_group(d);
  Operator h1 = random_hw_hamiltonian(d, 2, 1.0, 5);
  Operator h2 = random_hw_hamiltonian(d, 2, 0.7, 6);

  Operator p1 = commutant_project(group, h1);
  CHECK(p1.dims() == h1.dims());
  CHECK(max_diff(commutant_project(group, p1).matrix(), p1.matrix()) < 1e-12);

  Operator lin = commutant_project(group, Cx(2.5, 0) * h1 + h2);
  Operator expect = Cx(2.5, 0) * p1 + commutant_project(group, h2);
  CHECK(max_diff(lin.matrix(), expect.matrix()) < 1e-12);

  // the projection commutes with every group element (extended by the bath identity)
  for (const Operator& g : group) {
    Operator full = kron(g, Operator::identity({2}));
    CHECK(max_diff((full * p1).matrix(), (p1 * full).matrix()) < 1e-11);
  }

  CHECK_THROWS_AS(commutant_project({}, h1), NumericError);
  CHECK_THROWS_AS(commutant_project({shift_op(4)}, h1), NumericError);  // 6 % 4 != 0
}

TEST_CASE("full-group average of any system operator is proportional to identity") {
  const int d = 4;
  std::vector<Operator> group = hw_group(d);
  Operator h = random_hw_hamiltonian(d, 1, 1.0, 17);
  Operator p = commutant_project(group, h);
  Cx mean = p.trace() / double(d);
  CHECK(max_diff(p.matrix(), (mean * Operator::identity({d, 1})).matrix()) < 1e-12);
  // traceless input: the average vanishes entirely
  CHECK(p.max_abs() < 1e-12);
}

TEST_CASE("phase-power average kills pure dephasing terms") {
  Prng g(133);
  for (int d = 2; d <= 6; ++d) {
    CAPTURE(d);
    DephasingSpec spec;
    spec.sigma = 0.9;
    Operator h = dephasing_hamiltonian(d, sample_dephasing(d, spec, g));
    Operator p = commutant_project(x_powers(d), h);
    CHECK(p.max_abs() < 1e-12);
  }
}

TEST_CASE("staggered projection leaves only the global phase rate") {
  for (const CrossKerrMatrix& ck : {qutrit_q1q2(), qutrit_q2q3(), ququart_q1q2()}) {
    auto [zeta00, residual] = ckdd_effective(ck);
    CHECK(zeta00 == doctest::Approx(ck.zeta00()).epsilon(1e-14));
    CHECK(residual < 1e-12);
  }
  // hand value for the first table: sum of entries is 0.561 MHz over d^2 = 9
  auto [z, res] = ckdd_effective(qutrit_q1q2());
  CHECK(z == doctest::Approx(2.0 * std::numbers::pi * 0.561 / 9.0).epsilon(1e-12));
  CHECK(res < 1e-12);
}

TEST_CASE("lockstep projection keeps exactly the phase-matched diagonal labels") {
  // random rate table; representative generic case
  Prng g(777);
  for (int d : {2, 3, 4}) {
    CAPTURE(d);
    Eigen::MatrixXd mhz(d - 1, d - 1);
    for (int i = 0; i < d - 1; ++i)
      for (int j = 0; j < d - 1; ++j) mhz(i, j) = 2.0 * g.uniform() - 1.0;
    CrossKerrMatrix ck = CrossKerrMatrix::from_mhz(d, mhz);

    HwExpansion e = simultaneous_residual(ck);
    REQUIRE(e.terms.size() == size_t(d * d * d * d));
    int survivors = 0;
    for (const HwTerm& t : e.terms) {
      REQUIRE(t.labels.size() == 2);
      bool allowed = t.labels[0].alpha == 0 && t.labels[1].alpha == 0 &&
                     (t.labels[0].beta + t.labels[1].beta) % d == 0;
      if (allowed) {
        CHECK(std::abs(t.coeff) > 1e-6);  // generic tables populate every allowed slot
        ++survivors;
      } else {
        CHECK(std::abs(t.coeff) < 1e-12);
      }
    }
    CHECK(survivors == d);  // (0,0)x(0,0) plus the d-1 phase-matched pairs

    // cross-check against a direct group average of the full hamiltonian
    std::vector<Operator> lockstep;
    for (const Operator& xp : x_powers(d)) lockstep.push_back(kron(xp, xp));
    Operator direct = commutant_project(lockstep, cross_kerr_hamiltonian(ck));
    CHECK(max_diff(e.reconstruct().matrix(), direct.matrix()) < 1e-12);
  }
}

TEST_CASE("qutrit lockstep survivors sit on the expected label pairs") {
  HwExpansion e = simultaneous_residual(qutrit_q1q2());
  auto coeff_at = [&](int b0, int b1) {
    return e.coeff({HwLabel{0, b0, 3}, HwLabel{0, b1, 3}});
  };
  CHECK(std::abs(coeff_at(0, 0)) > 1e-3);
  CHECK(std::abs(coeff_at(1, 2)) > 1e-3);
  CHECK(std::abs(coeff_at(2, 1)) > 1e-3);
  // a phase-mismatched diagonal label and a shift label both vanish
  CHECK(std::abs(coeff_at(1, 1)) < 1e-12);
  CHECK(std::abs(e.coeff({HwLabel{1, 0, 3}, HwLabel{2, 0, 3}})) < 1e-12);
}

TEST_CASE("log-log fit recovers an exact power law") {
  std::vector<std::pair<double, double>> pts;
  const double amp = 7.3;
  for (int k = 0; k < 9; ++k) {
    double tau = 1e-3 * std::pow(10.0, k / 4.0);
    pts.push_back({tau, amp * std::pow(tau, 4.0)});
  }
  // out-of-window points must be ignored, not fitted
  pts.push_back({1e-9, 1e-20});
  pts.push_back({3.0, 0.5});

  ScalingResult r = scaling_fit(pts);
  CHECK(r.points_used == 9);
  CHECK(r.slope == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.intercept == doctest::Approx(std::log(amp)).epsilon(1e-9));
  CHECK(r.r_squared > 0.999999);
  CHECK(r.tau_values.size() == pts.size());  // sweep is echoed in full
}

TEST_CASE("log-log fit input validation") {
  std::vector<std::pair<double, double>> few = {
      {1e-3, 1e-6}, {2e-3, 1e-5}, {4e-3, 1e-4}};
  CHECK_THROWS_AS(scaling_fit(few), NumericError);

  std::vector<std::pair<double, double>> outside = {
      {1e-3, 1e-20}, {2e-3, 1e-19}, {4e-3, 1e-18}, {8e-3, 1e-17}, {1.6e-2, 1e-16}};
  CHECK_THROWS_AS(scaling_fit(outside), NumericError);

  std::vector<std::pair<double, double>> degenerate = {
      {1e-3, 1e-6}, {1e-3, 2e-6}, {1e-3, 3e-6}, {1e-3, 4e-6}};
  CHECK_THROWS_AS(scaling_fit(degenerate), NumericError);
}

TEST_CASE("effective generator converges linearly to the group average") {
  // evolve one full cycle at total time T; the principal-branch generator of the
  // cycle unitary approaches the projected hamiltonian with an O(T) error, so
  // halving T should roughly halve the residual
  const int d = 3, m = 2;
  Operator h = random_hw_hamiltonian(d, m, 1.0, 3);
  Operator target = commutant_project(hw_group(d), h);

  auto residual_at = [&](double total) {
    PulseSequence seq = universal_sequence(d, total / (d * d));
    Operator u = evolve_sequence(h, seq);
    return (effective_generator(u, total) - target.matrix()).cwiseAbs().maxCoeff();
  };

  double r1 = residual_at(0.02);
  double r2 = residual_at(0.01);
  double r3 = residual_at(0.005);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.3));
  CHECK(r2 / r3 == doctest::Approx(2.0).epsilon(0.3));
  // and the residual is already small on these scales
  CHECK(r1 < 0.05);
}
