#include "crib/expm.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace crib {

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Eigen::MatrixXcd x = a / std::ldexp(1.0, s);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd x2 = x * x;
  const Eigen::MatrixXcd x4 = x2 * x2;
  const Eigen::MatrixXcd x6 = x4 * x2;

  const Eigen::MatrixXcd inner_u = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2);
  const Eigen::MatrixXcd u = x * (inner_u + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  const Eigen::MatrixXcd inner_v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2);
  const Eigen::MatrixXcd v = inner_v + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

  Eigen::MatrixXcd r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace crib
