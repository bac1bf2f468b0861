#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "crib/envelope.hpp"
#include "crib/error.hpp"

using namespace crib;

namespace {

SampledEnvelope gauss(double dw, double tc = 0.0, double phase = 0.0, double dt = 0.01, double half = 12.0) {
  return make_gaussian(TimeGrid::covering(tc - half / dw, tc + half / dw, dt), dw, tc, phase, 1.0);
}

// Full width at half maximum of samples y on spacing h, by linear interpolation.
double fwhm(const std::vector<double>& y, double h) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[peak]) peak = i;
  const double half = 0.5 * y[peak];
  std::size_t l = peak, r = peak;
  while (l > 0 && y[l] > half) --l;
  while (r + 1 < y.size() && y[r] > half) ++r;
  const double xl = static_cast<double>(l) + (half - y[l]) / (y[l + 1] - y[l]);
  const double xr = static_cast<double>(r - 1) + (half - y[r - 1]) / (y[r] - y[r - 1]);
  return (xr - xl) * h;
}

std::vector<double> intensity(const SampledEnvelope& e) {
  std::vector<double> y(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) y[i] = std::norm(e[i]);
  return y;
}

// |sum_n a_n e^{i w t_n}|^2 on a frequency lattice, straight from the definition.
std::vector<double> dft_power(const SampledEnvelope& e, double w_max, std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = -w_max + 2.0 * w_max * static_cast<double>(k) / static_cast<double>(n - 1);
    cplx acc{};
    for (std::size_t i = 0; i < e.size(); ++i) acc += e[i] * std::polar(1.0, w * e.time(i));
    p[k] = std::norm(acc * e.dt());
  }
  return p;
}

}  // namespace

TEST_CASE("gaussian normalisation and phase") {
  const SampledEnvelope g = gauss(1.0);
  CHECK(g.energy() == doctest::Approx(1.0).epsilon(1e-12));
  std::size_t peak = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i]) > std::abs(g[peak])) peak = i;
  CHECK(std::abs(g.time(peak)) < 1e-9);

  const SampledEnvelope n = gauss(1.0, 0.0, kPi);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(n[i] + g[i]) < 1e-15);
}

TEST_CASE("gaussian width scales as 1/delta_omega in time and with delta_omega in frequency") {
  const SampledEnvelope g1 = gauss(1.0, 0.0, 0.0, 0.005);
  const SampledEnvelope g2 = gauss(2.0, 0.0, 0.0, 0.005);
  const double t1 = fwhm(intensity(g1), g1.dt());
  const double t2 = fwhm(intensity(g2), g2.dt());
  // |a|^2 = exp(-(t dw)^2): FWHM = 2 sqrt(ln 2) / dw.
  CHECK(t1 == doctest::Approx(2.0 * std::sqrt(std::log(2.0))).epsilon(1e-4));
  CHECK(t1 / t2 == doctest::Approx(2.0).epsilon(1e-3));

  const double wmax = 10.0;
  const std::size_t n = 4001;
  const double h = 2.0 * wmax / static_cast<double>(n - 1);
  const double f1 = fwhm(dft_power(gauss(1.0, 0.0, 0.0, 0.05), wmax, n), h);
  const double f2 = fwhm(dft_power(gauss(2.0, 0.0, 0.0, 0.05), wmax, n), h);
  CHECK(f1 == doctest::Approx(2.0 * std::sqrt(std::log(2.0))).epsilon(1e-3));
  CHECK(f2 / f1 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("double packet") {
  const TimeGrid grid = TimeGrid::covering(-12.0, 22.0, 0.01);
  DoublePacketSpec s;
  s.delta_omega = 1.0;
  SUBCASE("beta = 0 is a single gaussian") {
    const SampledEnvelope d = make_double_packet(grid, s);
    const SampledEnvelope g = make_gaussian(grid, 1.0, 0.0, 0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(d[i] - g[i]) < 1e-14);
  }
  SUBCASE("separated equal packets") {
    s.alpha = s.beta = std::sqrt(0.5);
    s.tau = 10.0;
    std::vector<std::string> warnings;
    const SampledEnvelope d = make_double_packet(grid, s, &warnings);
    CHECK(d.energy() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(warnings.empty());
    CHECK(energy_between(d, -6.0, 5.0) == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("overlapping packets warn and pick up the overlap integral") {
    s.alpha = s.beta = std::sqrt(0.5);
    s.tau = 0.1;
    std::vector<std::string> warnings;
    const SampledEnvelope d = make_double_packet(grid, s, &warnings);
    CHECK(!warnings.empty());
    // <g(t), g(t - tau)> for unit-energy exp(-(t dw)^2 / 2) packets.
    const double ov = std::exp(-std::pow(s.tau * s.delta_omega, 2) / 4.0);
    double numeric = 0.0;
    const SampledEnvelope a = make_gaussian(grid, 1.0, 0.0, 0.0, 1.0);
    const SampledEnvelope b = make_gaussian(grid, 1.0, s.tau, 0.0, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) numeric += (std::conj(a[i]) * b[i]).real() * grid.dt;
    CHECK(numeric == doctest::Approx(ov).epsilon(1e-10));
    CHECK(d.energy() == doctest::Approx(1.0 + ov).epsilon(1e-10));
  }
}

TEST_CASE("time reversal") {
  const SampledEnvelope g = gauss(1.0, 3.0);
  const SampledEnvelope r = time_reverse(g, 3.0);
  CHECK(fidelity(g, r) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(g.at(r.time(i)) - r[i]) < 1e-12);

  const SampledEnvelope twice = time_reverse(time_reverse(g, 1.7), 1.7);
  REQUIRE(twice.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(twice[i] == g[i]);
  CHECK(twice.t_start() == doctest::Approx(g.t_start()).epsilon(1e-14));

  DoublePacketSpec s;
  s.alpha = 0.9;
  s.beta = std::sqrt(1.0 - 0.81);
  s.tau = 10.0;
  const SampledEnvelope d = make_double_packet(TimeGrid::covering(-10.0, 20.0, 0.02), s);
  const SampledEnvelope dr = time_reverse(d, 5.0);
  CHECK(energy_between(dr, -10.0, 5.0) == doctest::Approx(0.19).epsilon(1e-6));
  CHECK(energy_between(dr, 5.0, 20.0) == doctest::Approx(0.81).epsilon(1e-6));
}

TEST_CASE("fidelity") {
  const SampledEnvelope g = gauss(1.0);
  CHECK(fidelity(g, g) == 1.0);
  CHECK(fidelity(g, g.scaled(std::polar(1.0, 0.8))) == doctest::Approx(1.0).epsilon(1e-15));
  for (double tau : {0.5, 1.0, 2.0}) {
    const SampledEnvelope h = gauss(1.0, tau);
    // |<g, g(t - tau)>|^2 = exp(-(tau dw)^2 / 2)
    CHECK(fidelity(g, h) == doctest::Approx(std::exp(-tau * tau / 2.0)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(fidelity(g, SampledEnvelope::zeros(g.grid())), Error);
}

TEST_CASE("resampling is accurate for band-limited envelopes") {
  const SampledEnvelope g = gauss(1.0, 0.0, 0.4, 0.1, 10.0);
  const TimeGrid off = TimeGrid::covering(-7.03, 7.03, 0.07);
  const SampledEnvelope r = resample(g, off);
  double err = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = r.time(i);
    const cplx exact = std::exp(-0.5 * t * t) * std::polar(1.0, 0.4) / std::pow(kPi, 0.25);
    err = std::max(err, std::abs(r[i] - exact));
  }
  CHECK(err < 5e-5);
  CHECK(commensurate(g.grid(), TimeGrid{g.t_start() + 3 * g.dt(), g.dt(), 4}));
  CHECK_FALSE(commensurate(g.grid(), off));
  // Overlap on incommensurate grids goes through resampling.
  CHECK(std::abs(overlap(g, r) - 1.0) < 1e-4);
}

TEST_CASE("shift, pad and energy windows") {
  const SampledEnvelope g = gauss(1.0);
  const SampledEnvelope s = shifted(g, 12.0);
  CHECK(s.t_start() == doctest::Approx(g.t_start() + 12.0));
  CHECK(s.energy() == g.energy());
  const SampledEnvelope both = add(g, s);
  CHECK(both.energy() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(energy_between(both, 6.0, 30.0) == doctest::Approx(1.0).epsilon(1e-6));
  const SampledEnvelope padded = on_grid(g, TimeGrid::covering(-30.0, 30.0, g.dt()));
  CHECK(padded.energy() == doctest::Approx(g.energy()).epsilon(1e-14));
}

TEST_CASE("csv round trip") {
  const SampledEnvelope g = gauss(1.3, 0.2, 0.9, 0.05);
  std::stringstream ss;
  write_csv(g, ss);
  CHECK(ss.str().rfind("t,re,im\n", 0) == 0);
  const auto path = std::filesystem::temp_directory_path() / "crib_envelope_roundtrip.csv";
  write_csv(g, path);
  const SampledEnvelope back = read_csv(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == g[i]);
  CHECK(back.dt() == doctest::Approx(g.dt()).epsilon(1e-12));
  CHECK_THROWS_AS(read_csv("/nonexistent/trace.csv"), Error);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(TimeGrid::covering(0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(TimeGrid::covering(1.0, 0.0, 0.1), Error);
  CHECK_THROWS_AS(SampledEnvelope(TimeGrid{0.0, -1.0, 0}, {cplx(1.0)}), Error);
}
