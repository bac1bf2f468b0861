#include <cmath>
#include <vector>

#include "crib/error.hpp"
#include "crib/solver.hpp"

namespace crib {

namespace {

// |F(omega)|^2 for F(omega) = sum_n a_n e^{i omega t_n} dt on a 4x zero-padded
// frequency lattice. A direct sum keeps this module independent of any FFT.
std::vector<std::pair<double, double>> power_spectrum(const SampledEnvelope& env) {
  const std::size_t n = env.size();
  const std::size_t nw = 4 * n;
  const double dt = env.dt();
  const double dw = 2.0 * kPi / (static_cast<double>(nw) * dt);
  std::vector<std::pair<double, double>> out;
  out.reserve(nw);
  for (std::size_t k = 0; k < nw; ++k) {
    const double omega = (static_cast<double>(k) - static_cast<double>(nw / 2)) * dw;
    const cplx step = std::polar(1.0, omega * dt);
    cplx rot = std::polar(1.0, omega * env.t_start());
    cplx acc{};
    for (std::size_t i = 0; i < n; ++i) {
      acc += env[i] * rot;
      rot *= step;
      if ((i & 63) == 63) rot /= std::abs(rot);
    }
    out.emplace_back(omega, std::norm(acc * dt));
  }
  return out;
}

}  // namespace

ClosedForm closed_form(const SampledEnvelope& input, const AtomicMedium& medium) {
  if (input.size() < 2) throw Error(ErrorKind::InvalidArgument, "input envelope needs >= 2 samples");
  const auto spectrum = power_spectrum(input);
  double total = 0.0, trans = 0.0, absorbed = 0.0, absorbed2 = 0.0;
  for (const auto& [omega, p] : spectrum) {
    const double t = std::exp(-medium.depth_at(omega));
    total += p;
    trans += p * t;
    absorbed += p * (1.0 - t);
    absorbed2 += p * (1.0 - t) * (1.0 - t);
  }
  if (!(total > 0.0)) throw Error(ErrorKind::Degenerate, "zero-energy input");
  ClosedForm cf;
  cf.transmission = trans / total;
  cf.efficiency = absorbed2 / total;
  cf.fidelity = absorbed2 > 0.0 ? absorbed * absorbed / (total * absorbed2) : 0.0;
  return cf;
}

}  // namespace crib
