#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crib/error.hpp"
#include "crib/medium.hpp"
#include "crib/solver.hpp"

using namespace crib;

namespace {

MediumSpec spec(Profile p, double d, std::size_t nd = 201, double span = 6.0) {
  MediumSpec s;
  s.profile = p;
  s.optical_depth = d;
  s.n_detunings = nd;
  s.span = span;
  return s;
}

double weight_sum(const AtomicMedium& m) {
  double s = 0.0;
  for (double w : m.weights) s += w;
  return s;
}

}  // namespace

TEST_CASE("quadrature weights are normalised") {
  CHECK(weight_sum(build_medium(spec(Profile::Gaussian, 10.0))) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(weight_sum(build_medium(spec(Profile::Lorentzian, 5.0, 401, 20.0))) == doctest::Approx(1.0).epsilon(1e-10));
  MediumSpec c = spec(Profile::Custom, 3.0, 101, 3.0);
  c.custom_table = {{-3.0, 0.0}, {-1.0, 1.0}, {0.0, 2.0}, {1.0, 1.0}, {3.0, 0.0}};
  CHECK(weight_sum(build_medium(c)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("coupling calibration") {
  const AtomicMedium m = build_medium(spec(Profile::Gaussian, 10.0));
  // Untruncated unit gaussian: G(0) = 1/sqrt(2 pi); truncation at 6 sigma is invisible here.
  CHECK(m.density_at_zero == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-8));
  CHECK(m.beta_cal == doctest::Approx(10.0 / (2.0 * kPi * m.density_at_zero)).epsilon(1e-12));
  CHECK(m.coupling() == doctest::Approx(std::sqrt(m.beta_cal / m.length)).epsilon(1e-12));
  CHECK(m.depth_at(0.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(m.depth_at(1.0) == doctest::Approx(10.0 * std::exp(-0.5)).epsilon(1e-8));

  const AtomicMedium l = build_medium(spec(Profile::Lorentzian, 5.0, 401, 20.0));
  CHECK(l.depth_at(0.0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(l.depth_at(1.0) == doctest::Approx(2.5).epsilon(1e-8));

  const AtomicMedium zero = build_medium(spec(Profile::Gaussian, 0.0));
  CHECK(zero.coupling() == 0.0);
}

TEST_CASE("detuning inversion") {
  MediumSpec c = spec(Profile::Custom, 1.0, 3, 1.0);
  c.custom_table = {{-1.0, 1.0}, {0.0, 3.0}, {1.0, 2.0}};
  const AtomicMedium m = build_medium(c);
  REQUIRE(m.n_detunings() == 3);
  const AtomicMedium inv = invert_detunings(m);
  CHECK(inv.inverted);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(inv.detunings[k] == -m.detunings[k]);
    CHECK(inv.weights[k] == m.weights[k]);
  }
  const AtomicMedium back = invert_detunings(inv);
  CHECK_FALSE(back.inverted);
  CHECK(back.detunings == m.detunings);

  const AtomicMedium g = build_medium(spec(Profile::Gaussian, 2.0));
  std::vector<double> a = g.detunings, b = invert_detunings(g).detunings;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-14));
}

TEST_CASE("invalid media") {
  CHECK_THROWS_AS(build_medium(spec(Profile::Gaussian, -1.0)), Error);
  MediumSpec s = spec(Profile::Gaussian, 1.0);
  s.nz = 1;
  CHECK_THROWS_AS(build_medium(s), Error);
  CHECK_THROWS_AS(build_medium(spec(Profile::Gaussian, 1.0, 101, 1.0)), Error);
  MediumSpec c = spec(Profile::Custom, 1.0);
  c.custom_table = {{1.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(build_medium(c), Error);
  CHECK_THROWS_AS(parse_profile("triangle"), Error);
  CHECK(parse_profile("lorentzian") == Profile::Lorentzian);
}

TEST_CASE("lorentzian calibration: narrowband resonant transmission is exp(-d)") {
  // Spectral width 0.04 against a unit half width; the finite bandwidth alone
  // raises the transmission by 1/sqrt(1 - d dw^2) = 1.004. The detuning comb
  // must be fine enough that its revival time lies beyond the window.
  MediumSpec s = spec(Profile::Lorentzian, 5.0, 2049, 20.0);
  s.nz = 33;
  const AtomicMedium m = build_medium(s);
  const double dw = 0.04, half = 5.0 / dw;
  const SampledEnvelope in = make_gaussian(TimeGrid::covering(-half, half, 0.1), dw, 0.0, 0.0, 1.0);
  const StageResult r = absorb(in, m, 2.0 * half + 10.0);
  const double t = r.field_out.energy() / in.energy();
  CHECK(t == doctest::Approx(std::exp(-5.0)).epsilon(0.01));
  CHECK(r.ledger_residual() < 1e-10);
}
