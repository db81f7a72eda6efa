#pragma once

#include <vector>

#include "hwdd/types.hpp"

namespace hwdd {

// Dense complex square matrix tagged with the subsystem dimensions it acts on.
// All unitaries, Hamiltonians and density matrices in the library are Operators.
class Operator {
 public:
  Operator() = default;
  Operator(Matrix m, std::vector<int> dims);
  explicit Operator(Matrix m);  // single subsystem, dims = {side}

  static Operator identity(const std::vector<int>& dims);
  static Operator zeros(const std::vector<int>& dims);

  int side() const { return static_cast<int>(mat_.rows()); }
  const std::vector<int>& dims() const { return dims_; }
  const Matrix& matrix() const { return mat_; }
  Matrix& matrix() { return mat_; }

  Operator dagger() const;
  // reinterpret the same matrix as acting on a different subsystem split
  Operator with_dims(std::vector<int> dims) const;

  bool is_hermitian(double tol = 1e-12) const;
  bool is_unitary(double tol = 1e-10) const;

  Cx trace() const;
  double max_abs() const;  // entrywise max modulus

  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(Cx s, const Operator& a);
  friend Operator operator*(double s, const Operator& a);

 private:
  Matrix mat_;
  std::vector<int> dims_;
};

// Normalized pure state with subsystem dimensions.
class StateVector {
 public:
  StateVector() = default;
  StateVector(Vector amps, std::vector<int> dims);

  // uniform superposition (|0> + ... + |d-1>)/sqrt(d)
  static StateVector plus_state(int d);
  // computational basis state |levels[0], levels[1], ...>
  static StateVector basis_state(const std::vector<int>& dims, const std::vector<int>& levels);
  // (|00> + |11> + ... + |d-1,d-1>)/sqrt(d) on two d-level qudits
  static StateVector maximally_entangled(int d);

  int size() const { return static_cast<int>(amps_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  const Vector& amplitudes() const { return amps_; }

 private:
  Vector amps_;
  std::vector<int> dims_;
};

Operator kron(const Operator& a, const Operator& b);

// e^{-i t h} via Hermitian eigendecomposition; throws NumericError if h is not Hermitian
Operator expm_hermitian(const Operator& h, double t);

// trace out every subsystem not listed in keep (keep indices refer to rho.dims())
Operator partial_trace(const Operator& rho, const std::vector<int>& keep);

// <psi| rho |psi>; rho must be a density matrix (Hermitian, trace 1 within 1e-10)
double state_fidelity(const Operator& rho, const StateVector& psi);

// 1 - |Tr(u)/D|^2, global-phase invariant, clamped to [0, 1]
double unitary_infidelity(const Operator& u);

Operator projector(const StateVector& psi);
StateVector apply(const Operator& u, const StateVector& psi);
Cx overlap(const StateVector& a, const StateVector& b);  // <a|b>

}  // namespace hwdd
