#pragma once

#include <vector>

#include "hwdd/operator.hpp"

namespace hwdd {

// Label (alpha, beta) of the Heisenberg-Weyl element L_ab on a d-level qudit.
struct HwLabel {
  int alpha = 0;
  int beta = 0;
  int d = 2;

  friend bool operator==(const HwLabel& x, const HwLabel& y) {
    return x.alpha == y.alpha && x.beta == y.beta && x.d == y.d;
  }
};

// One term c * L_{l0} (x) L_{l1} (x) ... of a product-basis expansion.
struct HwTerm {
  std::vector<HwLabel> labels;
  Cx coeff;
};

// Expansion of an operator in the tensor-product Heisenberg-Weyl basis.
struct HwExpansion {
  std::vector<int> dims;
  std::vector<HwTerm> terms;  // dense: one term per label tuple, fixed lexicographic order

  Operator reconstruct() const;
  Cx coeff(const std::vector<HwLabel>& labels) const;
  Cx coeff(const HwLabel& label) const;  // single-qudit convenience
};

// gamma_d^e with the exponent reduced mod d before any trig
Cx root_of_unity(int d, long long exponent);

// cyclic shift X_d = sum_k |k+1 mod d><k|, exact 0/1 entries
Operator shift_op(int d);

// phase Z_d = diag(1, gamma_d, gamma_d^2, ...)
Operator phase_op(int d);

// L_ab = (-sqrt(gamma_d))^{ab} X^a Z^b with principal root, i.e. prefactor e^{i pi ab (d+1)/d}
Operator hw_element(const HwLabel& label);

// phase p with L_a L_b = p L_b L_a; equals gamma_d^{beta_a*alpha_b - alpha_a*beta_b}
Cx commutation_phase(const HwLabel& a, const HwLabel& b);

// Hilbert-Schmidt expansion coefficients c = Tr(L^dag m) / side for every label tuple
HwExpansion hw_expand(const Operator& m);

// coefficients c_k with |i><i| = sum_k c_k Z_d^k, c_k = gamma_d^{-ik}/d
std::vector<Cx> expand_diagonal_projector(int i, int d);

// all d^2 labels in lexicographic (alpha, beta) order
std::vector<HwLabel> hw_labels(int d);

// the full group in hw_labels order
std::vector<Operator> hw_group(int d);

// adjoint-partner label: L_l^dag is proportional to L_{partner(l)}
HwLabel adjoint_partner(const HwLabel& l);

// phase p with L_l^dag = p * L_{adjoint_partner(l)}
Cx adjoint_phase(const HwLabel& l);

}  // namespace hwdd
