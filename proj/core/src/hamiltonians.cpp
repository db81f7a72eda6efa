#include "hwdd/hamiltonians.hpp"

#include <cmath>
#include <numbers>

namespace hwdd {

CrossKerrMatrix CrossKerrMatrix::from_mhz(int d, const Eigen::MatrixXd& mhz) {
  if (d < 2) throw ConfigError("CrossKerrMatrix: dimension must be >= 2");
  if (mhz.rows() != d - 1 || mhz.cols() != d - 1)
    throw ConfigError("CrossKerrMatrix: rate table must be (d-1) x (d-1)");
  CrossKerrMatrix ck;
  ck.d = d;
  ck.alpha = 2.0 * std::numbers::pi * mhz;  // MHz -> rad/us
  return ck;
}

double CrossKerrMatrix::zeta00() const { return alpha.sum() / double(d) / double(d); }

Operator dephasing_hamiltonian(int d, const std::vector<Cx>& b) {
  if (d < 2) throw NumericError("dephasing_hamiltonian: dimension must be >= 2");
  if (static_cast<int>(b.size()) != d - 1)
    throw NumericError("dephasing_hamiltonian: need d-1 coefficients (nu = 1..d-1)");
  for (int nu = 1; nu < d; ++nu) {
    const Cx& want = b[(d - nu) - 1];
    if (std::abs(want - std::conj(b[nu - 1])) > 1e-12)
      throw NumericError(
          "dephasing_hamiltonian: Hermiticity constraint b[d-nu] = conj(b[nu]) violated");
  }

  Matrix h = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    Cx v = 0.0;
    for (int nu = 1; nu < d; ++nu)
      v += b[nu - 1] * root_of_unity(d, static_cast<long long>(nu) * k);
    // sum is real by the pairing constraint; drop rounding dust in the imaginary part
    h(k, k) = Cx(v.real(), 0.0);
  }
  return Operator(std::move(h), {d});
}

Operator cross_kerr_hamiltonian(const CrossKerrMatrix& ck) {
  int d = ck.d;
  if (d < 2) throw NumericError("cross_kerr_hamiltonian: dimension must be >= 2");
  if (ck.alpha.rows() != d - 1 || ck.alpha.cols() != d - 1)
    throw NumericError("cross_kerr_hamiltonian: rate table must be (d-1) x (d-1)");
  Matrix h = Matrix::Zero(d * d, d * d);
  for (int i = 1; i < d; ++i)
    for (int j = 1; j < d; ++j) h(i * d + j, i * d + j) = ck.alpha(i - 1, j - 1);
  return Operator(std::move(h), {d, d});
}

Operator random_hw_hamiltonian(int d, int bath_dim, double scale, std::uint64_t seed) {
  if (d < 2) throw NumericError("random_hw_hamiltonian: dimension must be >= 2");
  if (bath_dim < 1) throw NumericError("random_hw_hamiltonian: bath_dim must be >= 1");
  Prng g(seed);

  std::vector<int> dims = {d, bath_dim};
  Operator acc = Operator::zeros(dims);

  // One independent bath block per adjoint pair of labels, sampled in label order;
  // the partner block is fixed by Hermiticity. Identity label skipped (traceless).
  for (const HwLabel& l : hw_labels(d)) {
    if (l.alpha == 0 && l.beta == 0) continue;
    HwLabel p = adjoint_partner(l);
    bool self_paired = (p == l);
    bool primary = (l.alpha < p.alpha) || (l.alpha == p.alpha && l.beta <= p.beta);
    if (!primary) continue;  // handled when we visited the partner

    Cx phi = adjoint_phase(l);  // L^dag = phi * L_partner
    Operator L = hw_element(l);
    Operator Lp = hw_element(p);

    Matrix B(bath_dim, bath_dim);
    for (int r = 0; r < bath_dim; ++r)
      for (int c = 0; c < bath_dim; ++c) B(r, c) = scale * g.cgaussian();

    if (self_paired) {
      // need L (x) B Hermitian on its own: B^dag = phi * B; solve with B = G + phi G^dag
      Matrix herm = B + phi * B.adjoint();
      acc = acc + kron(L, Operator(std::move(herm), {bath_dim})).with_dims(dims);
    } else {
      // add L (x) B + (L (x) B)^dag = L (x) B + phi * L_partner (x) B^dag
      acc = acc + kron(L, Operator(B, {bath_dim})).with_dims(dims);
      acc = acc + (phi * kron(Lp, Operator(B.adjoint().eval(), {bath_dim}))).with_dims(dims);
    }
  }

  if (!acc.is_hermitian(1e-12))
    throw NumericError("random_hw_hamiltonian: construction lost Hermiticity");
  return acc;
}

Operator embed_operator(const Operator& op, const std::vector<int>& slots,
                        const std::vector<int>& register_dims) {
  int n = static_cast<int>(register_dims.size());
  if (op.dims().size() != slots.size())
    throw NumericError("embed_operator: operator factor count differs from slot count");
  std::vector<int> pos_of_slot(n, -1);
  for (size_t k = 0; k < slots.size(); ++k) {
    int s = slots[k];
    if (s < 0 || s >= n) throw NumericError("embed_operator: slot index out of range");
    if (pos_of_slot[s] != -1) throw NumericError("embed_operator: duplicate slot index");
    if (op.dims()[k] != register_dims[s])
      throw NumericError("embed_operator: operator dims do not match register slots");
    pos_of_slot[s] = static_cast<int>(k);
  }

  int total = 1;
  for (int dsub : register_dims) total *= dsub;

  // strides within the full register and within the operator's own factor order
  std::vector<int> reg_stride(n, 1);
  for (int k = n - 2; k >= 0; --k) reg_stride[k] = reg_stride[k + 1] * register_dims[k + 1];
  std::vector<int> op_stride(slots.size(), 1);
  for (int k = static_cast<int>(slots.size()) - 2; k >= 0; --k)
    op_stride[k] = op_stride[k + 1] * op.dims()[k + 1];

  auto decompose = [&](int idx, std::vector<int>& levels) {
    for (int k = 0; k < n; ++k) {
      levels[k] = idx / reg_stride[k];
      idx %= reg_stride[k];
    }
  };

  Matrix out = Matrix::Zero(total, total);
  std::vector<int> li(n), lj(n);
  for (int i = 0; i < total; ++i) {
    decompose(i, li);
    for (int j = 0; j < total; ++j) {
      decompose(j, lj);
      bool same_elsewhere = true;
      for (int k = 0; k < n; ++k)
        if (pos_of_slot[k] == -1 && li[k] != lj[k]) {
          same_elsewhere = false;
          break;
        }
      if (!same_elsewhere) continue;
      int oi = 0, oj = 0;
      for (size_t k = 0; k < slots.size(); ++k) {
        oi += li[slots[k]] * op_stride[k];
        oj += lj[slots[k]] * op_stride[k];
      }
      out(i, j) = op.matrix()(oi, oj);
    }
  }
  return Operator(std::move(out), register_dims);
}

Operator compose_register(const std::vector<int>& register_dims,
                          const std::vector<std::pair<std::vector<int>, Operator>>& parts) {
  Operator acc = Operator::zeros(register_dims);
  for (const auto& [slots, op] : parts) acc = acc + embed_operator(op, slots, register_dims);
  return acc;
}

std::vector<double> resolve_sigma_nu(int d, const DephasingSpec& spec) {
  if (!spec.sigma_nu.empty()) {
    if (static_cast<int>(spec.sigma_nu.size()) != d - 1)
      throw ConfigError("sigma_nu: need d-1 entries");
    return spec.sigma_nu;
  }
  std::vector<double> s(d - 1);
  for (int nu = 1; nu < d; ++nu) s[nu - 1] = spec.sigma / double(nu);
  return s;
}

std::vector<Cx> sample_dephasing(int d, const DephasingSpec& spec, Prng& g) {
  std::vector<double> s = resolve_sigma_nu(d, spec);
  std::vector<Cx> b(d - 1, Cx(0.0, 0.0));
  // sample the lower member of each conjugate pair; the constraint fixes the rest
  for (int nu = 1; nu < d - nu; ++nu) {
    b[nu - 1] = s[nu - 1] * g.cgaussian();
    b[(d - nu) - 1] = std::conj(b[nu - 1]);
  }
  if (d % 2 == 0) {
    int nu = d / 2;  // self-paired entry must be real
    b[nu - 1] = Cx(s[nu - 1] * g.gaussian(), 0.0);
  }
  return b;
}

Operator sample_bath_dephasing(int d, int bath_dim, const DephasingSpec& spec, Prng& g) {
  if (bath_dim < 1) throw NumericError("sample_bath_dephasing: bath_dim must be >= 1");
  const int m = bath_dim;
  std::vector<double> s = resolve_sigma_nu(d, spec);

  std::vector<Matrix> B(d, Matrix::Zero(m, m));
  auto draw = [&](double sigma) {
    Matrix blk(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) blk(r, c) = sigma * g.cgaussian();
    return blk;
  };
  for (int nu = 1; nu < d - nu; ++nu) {
    B[nu] = draw(s[nu - 1]);
    B[d - nu] = B[nu].adjoint();
  }
  if (d % 2 == 0) {
    int nu = d / 2;
    Matrix blk = draw(s[nu - 1]);
    B[nu] = 0.5 * (blk + blk.adjoint()).eval();  // self-paired block must be Hermitian
  }

  Operator z = phase_op(d);
  Operator acc = Operator::zeros({d, m});
  Operator zp = z;
  for (int nu = 1; nu < d; ++nu) {
    acc = acc + kron(zp, Operator(B[nu], {m})).with_dims({d, m});
    zp = zp * z;
  }
  if (!acc.is_hermitian(1e-12))
    throw NumericError("sample_bath_dephasing: construction lost Hermiticity");
  return acc;
}

}  // namespace hwdd
