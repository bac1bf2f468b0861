#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crib/error.hpp"
#include "crib/timebin.hpp"

using namespace crib;

namespace {

TimeBinQubit qubit(double r, double phi, double tau = 16.0, double dw = 0.5) {
  TimeBinQubit q;
  q.r = r;
  q.phi = phi;
  q.tau = tau;
  q.bin = make_gaussian(TimeGrid::covering(-8.0 / dw, 8.0 / dw, 0.05), dw, 0.0, 0.0, 1.0);
  return q;
}

double wrap(double x) { return std::remainder(x, 2.0 * kPi); }

MemoryBackend thick_solver() {
  MediumSpec s;
  s.optical_depth = 30.0;
  s.nz = 257;
  s.n_detunings = 257;
  MemoryBackend b;
  b.kind = BackendKind::Solver;
  b.medium = build_medium(s);
  b.options.forward_tail = 10.0;
  b.options.retrieval_tail = 10.0;
  b.schedule = ProtocolSchedule::mirrored(1.0, 5.0);
  return b;
}

}  // namespace

TEST_CASE("encoding") {
  const double tau = 16.0;
  const SampledEnvelope early = encode(qubit(1.0, 0.0));
  // Gaussian tail past the midpoint: erfc(tau dw / 2) / 2.
  const double tail = 0.5 * std::erfc(tau * 0.5 / 2.0);
  CHECK(energy_between(early, -100.0, tau / 2.0) == doctest::Approx(1.0 - tail).epsilon(1e-9));
  CHECK(energy_between(early, tau / 2.0, 100.0) == doctest::Approx(tail).epsilon(0.05));

  const SampledEnvelope late = encode(qubit(0.0, 1.1));
  CHECK(energy_between(late, -100.0, tau / 2.0) == doctest::Approx(tail).epsilon(0.05));
  const std::size_t peak = static_cast<std::size_t>(std::lround((tau - late.t_start()) / late.dt()));
  CHECK(std::abs(std::arg(late[peak]) - 1.1) < 1e-12);

  CHECK_THROWS_AS(encode(qubit(0.5, 0.0, 2.0)), Error);
  CHECK_THROWS_AS(encode(qubit(1.5, 0.0)), Error);
}

TEST_CASE("decode inverts encode") {
  for (auto [r, phi] : {std::pair{std::sqrt(0.5), kPi / 2.0}, std::pair{0.3, -2.5}, std::pair{0.9, 3.0}}) {
    const TimeBinQubit q = qubit(r, phi);
    const Decoded d = decode(encode(q), q.tau, q.bin);
    CHECK(d.r == doctest::Approx(r).epsilon(1e-10));
    CHECK(std::abs(wrap(d.phi - phi)) < 1e-10);
    CHECK(d.phase_defined);
    CHECK(d.residual < 1e-8);
  }
  const TimeBinQubit q = qubit(1.0, 0.0);
  const Decoded d = decode(encode(q), q.tau, q.bin);
  CHECK(d.r == doctest::Approx(1.0));
  CHECK_FALSE(d.phase_defined);
  CHECK(d.phi == 0.0);
  CHECK_THROWS_AS(decode(SampledEnvelope::zeros(q.bin.grid()), q.tau, q.bin), Error);
}

TEST_CASE("ideal memory swaps the bins and keeps the relative phase") {
  MemoryBackend ideal;
  SUBCASE("early only becomes late only") {
    const TimeBinTransform t = memory_transform(qubit(1.0, 0.0), 0.0, ideal);
    CHECK(t.qubit.r < 1e-12);
    CHECK_FALSE(t.phase_defined);
  }
  SUBCASE("superposition") {
    const double r = std::sqrt(0.5), phi = kPi / 3.0;
    for (double chi : {-2.0, 0.0, 0.7}) {
      const TimeBinTransform t = memory_transform(qubit(r, phi), chi, ideal);
      CHECK(t.qubit.r == doctest::Approx(r).epsilon(1e-12));
      CHECK(std::abs(wrap(t.qubit.phi - phi)) < 1e-12);
      CHECK(std::abs(wrap(t.global_phase + chi)) < 1e-12);
      CHECK(t.efficiency == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("output envelope matches the reflected two-bin formula") {
    const TimeBinQubit q = qubit(0.6, 0.9);
    const double chi = 0.4;
    const TimeBinTransform t = memory_transform(q, chi, ideal);
    const SampledEnvelope in = encode(q);
    const ProtocolSchedule s = ideal.resolve_schedule(in);
    const double reflect = in.t_start() + s.t_prime(in.t_start());
    const cplx b = std::polar(0.8, 0.9);
    auto f = [](double t) { return std::exp(-0.5 * std::pow(0.5 * t, 2)) * std::sqrt(0.5) / std::pow(kPi, 0.25); };
    double err = 0.0;
    for (std::size_t i = 0; i < t.output.size(); ++i) {
      const double u = reflect - t.output.time(i);
      err = std::max(err, std::abs(t.output[i] - std::polar(1.0, -chi) * (0.6 * f(u) + b * f(u - q.tau))));
    }
    CHECK(err < 1e-6);
  }
  SUBCASE("two passes restore the qubit") {
    const TimeBinQubit q = qubit(0.35, -1.2);
    const TimeBinTransform once = memory_transform(q, 0.0, ideal);
    const TimeBinTransform twice = memory_transform(once.qubit, 0.0, ideal);
    CHECK(twice.qubit.r == doctest::Approx(0.35).epsilon(1e-10));
    CHECK(std::abs(wrap(twice.qubit.phi + 1.2)) < 1e-10);
  }
  SUBCASE("a plain delay is not a time-bin memory") {
    MemoryBackend delay;
    delay.kind = BackendKind::Delay;
    CHECK_THROWS_AS(memory_transform(qubit(0.5, 0.0), 0.0, delay), Error);
  }
}

TEST_CASE("solver memory at d = 30 reproduces the ideal transform") {
  const MemoryBackend solver = thick_solver();
  const double r = 0.6, phi = 0.7;
  for (double chi : {-1.0, 1.0}) {
    const TimeBinTransform t = memory_transform(qubit(r, phi), chi, solver);
    CHECK(t.qubit.r == doctest::Approx(0.8).epsilon(0.02));
    CHECK(std::abs(wrap(t.qubit.phi - phi)) < 0.02);
    CHECK(t.residual < 0.01);
    CHECK(std::abs(wrap(t.global_phase + chi)) < 1e-3);
    CHECK(t.efficiency > 0.99);
  }
}
