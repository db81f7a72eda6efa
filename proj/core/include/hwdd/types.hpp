#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace hwdd {

using Cx = std::complex<double>;
using Matrix = Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Cx, Eigen::Dynamic, 1>;

// configuration / schema problems -> CLI exit code 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// numerical-invariant violations (non-unitary evolution, bad fidelity) -> CLI exit code 3
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hwdd
