#include "hwdd/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hwdd {

namespace {

int dims_product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

}  // namespace

Operator::Operator(Matrix m, std::vector<int> dims) : mat_(std::move(m)), dims_(std::move(dims)) {
  if (mat_.rows() != mat_.cols()) throw NumericError("Operator: matrix must be square");
  for (int d : dims_)
    if (d < 1) throw NumericError("Operator: subsystem dimensions must be >= 1");
  if (dims_product(dims_) != mat_.rows())
    throw NumericError("Operator: product of dims must equal the matrix side");
}

Operator::Operator(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw NumericError("Operator: matrix must be square");
  dims_ = {static_cast<int>(mat_.rows())};
}

Operator Operator::identity(const std::vector<int>& dims) {
  int n = dims_product(dims);
  return Operator(Matrix::Identity(n, n), dims);
}

Operator Operator::zeros(const std::vector<int>& dims) {
  int n = dims_product(dims);
  return Operator(Matrix::Zero(n, n), dims);
}

Operator Operator::dagger() const { return Operator(mat_.adjoint(), dims_); }

Operator Operator::with_dims(std::vector<int> dims) const { return Operator(mat_, std::move(dims)); }

bool Operator::is_hermitian(double tol) const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::is_unitary(double tol) const {
  Matrix g = mat_.adjoint() * mat_;
  g -= Matrix::Identity(side(), side());
  return g.cwiseAbs().maxCoeff() <= tol;
}

Cx Operator::trace() const { return mat_.trace(); }

double Operator::max_abs() const { return mat_.size() == 0 ? 0.0 : mat_.cwiseAbs().maxCoeff(); }

Operator operator*(const Operator& a, const Operator& b) {
  if (a.side() != b.side()) throw NumericError("Operator product: dimension mismatch");
  return Operator(a.mat_ * b.mat_, a.dims_);
}

Operator operator+(const Operator& a, const Operator& b) {
  if (a.side() != b.side()) throw NumericError("Operator sum: dimension mismatch");
  return Operator(a.mat_ + b.mat_, a.dims_);
}

Operator operator-(const Operator& a, const Operator& b) {
  if (a.side() != b.side()) throw NumericError("Operator difference: dimension mismatch");
  return Operator(a.mat_ - b.mat_, a.dims_);
}

Operator operator*(Cx s, const Operator& a) { return Operator(s * a.mat_, a.dims_); }
Operator operator*(double s, const Operator& a) { return Operator(s * a.mat_, a.dims_); }

StateVector::StateVector(Vector amps, std::vector<int> dims)
    : amps_(std::move(amps)), dims_(std::move(dims)) {
  if (dims_.empty()) dims_ = {static_cast<int>(amps_.size())};
  if (dims_product(dims_) != amps_.size())
    throw NumericError("StateVector: product of dims must equal the amplitude count");
  if (std::abs(amps_.norm() - 1.0) > 1e-12) throw NumericError("StateVector: not normalized");
}

StateVector StateVector::plus_state(int d) {
  Vector v = Vector::Constant(d, Cx(1.0 / std::sqrt(double(d)), 0.0));
  return StateVector(std::move(v), {d});
}

StateVector StateVector::basis_state(const std::vector<int>& dims, const std::vector<int>& levels) {
  if (dims.size() != levels.size())
    throw NumericError("basis_state: one level per subsystem required");
  int idx = 0;
  for (size_t k = 0; k < dims.size(); ++k) {
    if (levels[k] < 0 || levels[k] >= dims[k]) throw NumericError("basis_state: level out of range");
    idx = idx * dims[k] + levels[k];
  }
  Vector v = Vector::Zero(dims_product(dims));
  v(idx) = 1.0;
  return StateVector(std::move(v), dims);
}

StateVector StateVector::maximally_entangled(int d) {
  Vector v = Vector::Zero(d * d);
  for (int k = 0; k < d; ++k) v(k * d + k) = Cx(1.0 / std::sqrt(double(d)), 0.0);
  return StateVector(std::move(v), {d, d});
}

Operator kron(const Operator& a, const Operator& b) {
  int na = a.side(), nb = b.side();
  Matrix out(na * nb, na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return Operator(std::move(out), std::move(dims));
}

Operator expm_hermitian(const Operator& h, double t) {
  if (!h.is_hermitian(1e-12)) throw NumericError("expm_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw NumericError("expm_hermitian: eigendecomposition failed");
  const auto& w = es.eigenvalues();
  Vector ph(h.side());
  for (int k = 0; k < h.side(); ++k) ph(k) = std::polar(1.0, -t * w(k));
  Matrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  return Operator(std::move(u), h.dims());
}

Operator partial_trace(const Operator& rho, const std::vector<int>& keep) {
  const std::vector<int>& dims = rho.dims();
  int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw NumericError("partial_trace: keep index out of range");
    if (kept[k]) throw NumericError("partial_trace: duplicate keep index");
    kept[k] = true;
  }

  // strides of each subsystem in the flattened index
  std::vector<int> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

  std::vector<int> keep_sorted;
  std::vector<int> traced;
  for (int k = 0; k < n; ++k) (kept[k] ? keep_sorted : traced).push_back(k);

  int dk = 1, dt = 1;
  for (int k : keep_sorted) dk *= dims[k];
  for (int k : traced) dt *= dims[k];

  // flat index of a (kept-multi-index, traced-multi-index) pair
  auto flatten = [&](int ki, int ti) {
    int idx = 0;
    for (int p = static_cast<int>(keep_sorted.size()) - 1; p >= 0; --p) {
      int d = dims[keep_sorted[p]];
      idx += (ki % d) * stride[keep_sorted[p]];
      ki /= d;
    }
    for (int p = static_cast<int>(traced.size()) - 1; p >= 0; --p) {
      int d = dims[traced[p]];
      idx += (ti % d) * stride[traced[p]];
      ti /= d;
    }
    return idx;
  };

  Matrix out = Matrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) {
      Cx s = 0.0;
      for (int t = 0; t < dt; ++t) s += rho.matrix()(flatten(i, t), flatten(j, t));
      out(i, j) = s;
    }

  std::vector<int> out_dims;
  for (int k : keep_sorted) out_dims.push_back(dims[k]);
  return Operator(std::move(out), std::move(out_dims));
}

double state_fidelity(const Operator& rho, const StateVector& psi) {
  if (rho.side() != psi.size()) throw NumericError("state_fidelity: dimension mismatch");
  if (!rho.is_hermitian(1e-10)) throw NumericError("state_fidelity: rho is not Hermitian");
  if (std::abs(rho.trace() - Cx(1.0, 0.0)) > 1e-10)
    throw NumericError("state_fidelity: rho trace differs from 1");
  Cx f = (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0, 0);
  double v = f.real();
  if (v < -1e-10 || v > 1.0 + 1e-10) throw NumericError("state_fidelity: value outside [0,1]");
  return std::clamp(v, 0.0, 1.0);
}

double unitary_infidelity(const Operator& u) {
  if (!u.is_unitary(1e-10)) throw NumericError("unitary_infidelity: input is not unitary");
  double D = static_cast<double>(u.side());
  double a = std::abs(u.trace()) / D;
  return std::clamp(1.0 - a * a, 0.0, 1.0);
}

Operator projector(const StateVector& psi) {
  Matrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  return Operator(std::move(m), psi.dims());
}

StateVector apply(const Operator& u, const StateVector& psi) {
  if (u.side() != psi.size()) throw NumericError("apply: dimension mismatch");
  Vector v = u.matrix() * psi.amplitudes();
  double n = v.norm();
  if (std::abs(n - 1.0) > 1e-10) throw NumericError("apply: evolution broke normalization");
  v /= n;  // remove harmless rounding drift
  return StateVector(std::move(v), psi.dims());
}

Cx overlap(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw NumericError("overlap: dimension mismatch");
  return (a.amplitudes().adjoint() * b.amplitudes())(0, 0);
}

}  // namespace hwdd
