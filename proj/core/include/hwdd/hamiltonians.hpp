#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hwdd/heisenberg_weyl.hpp"
#include "hwdd/operator.hpp"
#include "hwdd/rng.hpp"

namespace hwdd {

// Cross-Kerr rate table for one coupled pair: alpha(i,j), i,j in 1..d-1, rad/us.
struct CrossKerrMatrix {
  int d = 2;
  Eigen::MatrixXd alpha;  // (d-1)x(d-1); alpha(i-1, j-1) holds rate for levels (i, j)

  static CrossKerrMatrix from_mhz(int d, const Eigen::MatrixXd& mhz);  // multiplies by 2*pi
  double zeta00() const;  // (1/d^2) * sum of all entries
};

// Quasi-static dephasing on one qudit: b_nu ~ complex Gaussian, E|b_nu|^2 = sigma_nu^2.
// Default sigma_nu = sigma/nu unless sigma_nu is given explicitly (length d-1).
struct DephasingSpec {
  int qudit = 0;
  double sigma = 0.0;
  std::vector<double> sigma_nu;
};

// Cross-Kerr coupling between register slots a and b.
struct CouplingSpec {
  int a = 0;
  int b = 1;
  CrossKerrMatrix rates;
  std::string key;  // device-rates lookup key the rates came from, if any
};

struct NoiseModel {
  std::vector<DephasingSpec> dephasing;
  std::vector<CouplingSpec> couplings;
  int bath_dim = 1;
  double scale = 1.0;
};

// sum_nu b[nu] Z_d^nu, nu = 1..d-1 (b[0] holds nu=1); requires b_{d-nu} = conj(b_nu)
Operator dephasing_hamiltonian(int d, const std::vector<Cx>& b);

// d^2 x d^2 diagonal: entry alpha_ij at |ij> for i,j >= 1, zero when i=0 or j=0
Operator cross_kerr_hamiltonian(const CrossKerrMatrix& ck);

// Hermitian on d*bath_dim: sum over labels of L_ab (x) B_ab with seeded Gaussian bath
// blocks, adjoint-partner labels paired so the total is Hermitian by construction.
// bath_dim = 1 reduces to classical scalar coefficients.
Operator random_hw_hamiltonian(int d, int bath_dim, double scale, std::uint64_t seed);

// embed op (acting on the given register slots, in that order) into the full register
Operator embed_operator(const Operator& op, const std::vector<int>& slots,
                        const std::vector<int>& register_dims);

// sum of parts, each embedded with identities on untouched slots
Operator compose_register(const std::vector<int>& register_dims,
                          const std::vector<std::pair<std::vector<int>, Operator>>& parts);

// one quasi-static draw of the dephasing coefficient vector for spec (length d-1)
std::vector<Cx> sample_dephasing(int d, const DephasingSpec& spec, Prng& g);

// system-bath dephasing draw: sum_nu Z^nu (x) B_nu on {d, bath_dim}, bath blocks
// Gaussian with E|entry|^2 = sigma_nu^2 and the nu, d-nu blocks adjoint-paired
Operator sample_bath_dephasing(int d, int bath_dim, const DephasingSpec& spec, Prng& g);

// per-qudit sigma_nu resolution (explicit list or sigma/nu default)
std::vector<double> resolve_sigma_nu(int d, const DephasingSpec& spec);

}  // namespace hwdd
