#include "hwdd/heisenberg_weyl.hpp"

#include <cmath>
#include <numbers>

namespace hwdd {

namespace {

constexpr double kPi = std::numbers::pi;

void check_d(int d) {
  if (d < 2) throw NumericError("heisenberg_weyl: dimension must be >= 2");
}

void check_label(const HwLabel& l) {
  check_d(l.d);
  if (l.alpha < 0 || l.alpha >= l.d || l.beta < 0 || l.beta >= l.d)
    throw NumericError("heisenberg_weyl: label out of range");
}

}  // namespace

Cx root_of_unity(int d, long long exponent) {
  check_d(d);
  long long r = exponent % d;
  if (r < 0) r += d;
  if (r == 0) return {1.0, 0.0};
  return std::polar(1.0, 2.0 * kPi * double(r) / double(d));
}

Operator shift_op(int d) {
  check_d(d);
  Matrix x = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) x((k + 1) % d, k) = 1.0;
  return Operator(std::move(x), {d});
}

Operator phase_op(int d) {
  check_d(d);
  Matrix z = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) z(k, k) = root_of_unity(d, k);
  return Operator(std::move(z), {d});
}

Operator hw_element(const HwLabel& l) {
  check_label(l);
  int d = l.d;
  // prefactor (-sqrt(gamma_d))^{ab} = e^{i pi ab (d+1)/d}, exponent reduced mod 2d
  long long e = (static_cast<long long>(l.alpha) * l.beta * (d + 1)) % (2LL * d);
  Cx pref = (e == 0) ? Cx(1.0, 0.0) : std::polar(1.0, kPi * double(e) / double(d));

  Matrix m = Matrix::Zero(d, d);
  // X^a Z^b maps |k> -> gamma^{bk} |k+a>
  for (int k = 0; k < d; ++k) {
    long long bk = static_cast<long long>(l.beta) * k;
    m((k + l.alpha) % d, k) = pref * root_of_unity(d, bk);
  }
  return Operator(std::move(m), {d});
}

Cx commutation_phase(const HwLabel& a, const HwLabel& b) {
  check_label(a);
  check_label(b);
  if (a.d != b.d) throw NumericError("commutation_phase: dimension mismatch");
  // L_a L_b = gamma^{beta_a alpha_b - alpha_a beta_b} L_b L_a
  long long e = static_cast<long long>(a.beta) * b.alpha - static_cast<long long>(a.alpha) * b.beta;
  return root_of_unity(a.d, e);
}

std::vector<HwLabel> hw_labels(int d) {
  check_d(d);
  std::vector<HwLabel> out;
  out.reserve(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out.push_back({a, b, d});
  return out;
}

std::vector<Operator> hw_group(int d) {
  std::vector<Operator> out;
  out.reserve(d * d);
  for (const HwLabel& l : hw_labels(d)) out.push_back(hw_element(l));
  return out;
}

HwLabel adjoint_partner(const HwLabel& l) {
  check_label(l);
  return {(l.d - l.alpha) % l.d, (l.d - l.beta) % l.d, l.d};
}

Cx adjoint_phase(const HwLabel& l) {
  // L^dag = p * L_partner with |p| = 1; read p off matrix elements
  Operator dag = hw_element(l).dagger();
  Operator par = hw_element(adjoint_partner(l));
  // both are phase patterns over the same permutation; compare any nonzero entry
  int col = 0;
  int row = ((l.d - l.alpha) % l.d + 0) % l.d;  // X^{-a} permutation target of column 0
  return dag.matrix()(row, col) / par.matrix()(row, col);
}

HwExpansion hw_expand(const Operator& m) {
  const std::vector<int>& dims = m.dims();
  for (int d : dims) check_d(d);

  // per-factor label lists; expand over the tensor-product basis
  std::vector<std::vector<HwLabel>> factor_labels;
  for (int d : dims) factor_labels.push_back(hw_labels(d));

  size_t total = 1;
  for (const auto& fl : factor_labels) total *= fl.size();

  HwExpansion out;
  out.dims = dims;
  out.terms.reserve(total);

  double side = static_cast<double>(m.side());
  for (size_t t = 0; t < total; ++t) {
    size_t rem = t;
    std::vector<HwLabel> labels(dims.size(), HwLabel{});
    for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
      labels[f] = factor_labels[f][rem % factor_labels[f].size()];
      rem /= factor_labels[f].size();
    }
    Operator basis = hw_element(labels[0]);
    for (size_t f = 1; f < labels.size(); ++f) basis = kron(basis, hw_element(labels[f]));
    Cx c = (basis.dagger() * m).trace() / side;
    out.terms.push_back({std::move(labels), c});
  }
  return out;
}

Operator HwExpansion::reconstruct() const {
  Operator acc = Operator::zeros(dims);
  for (const HwTerm& t : terms) {
    Operator basis = hw_element(t.labels[0]);
    for (size_t f = 1; f < t.labels.size(); ++f) basis = kron(basis, hw_element(t.labels[f]));
    acc = acc + t.coeff * basis.with_dims(dims);
  }
  return acc;
}

Cx HwExpansion::coeff(const std::vector<HwLabel>& labels) const {
  for (const HwTerm& t : terms)
    if (t.labels == labels) return t.coeff;
  throw NumericError("HwExpansion: label tuple not found");
}

Cx HwExpansion::coeff(const HwLabel& label) const { return coeff(std::vector<HwLabel>{label}); }

std::vector<Cx> expand_diagonal_projector(int i, int d) {
  check_d(d);
  if (i < 0 || i >= d) throw NumericError("expand_diagonal_projector: level out of range");
  std::vector<Cx> c(d);
  for (int k = 0; k < d; ++k)
    c[k] = root_of_unity(d, -static_cast<long long>(i) * k) / double(d);
  return c;
}

}  // namespace hwdd
