#pragma once

#include <Eigen/Dense>

namespace crib {

/// Matrix exponential by scaling and squaring with the degree-13 Pade approximant.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// exp(-i h t) for Hermitian h through its eigendecomposition. Used as an
/// independent cross-check of expm.
Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& h, double t);

}  // namespace crib
