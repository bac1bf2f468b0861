#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crib/error.hpp"
#include "crib/interferometer.hpp"

using namespace crib;

namespace {

SampledEnvelope short_pulse(double dw = 2.0) {
  return make_gaussian(TimeGrid::covering(-8.0 / dw, 8.0 / dw, 0.05), dw, 0.0, 0.0, 1.0);
}

MzConfig mz(double alpha, double ratio = 0.5, double dL = 20.0) {
  MzConfig m;
  m.alpha = alpha;
  m.coupler_ratio = ratio;
  m.delta_L = dL;
  return m;
}

// Every closed path through coupler, arm, coupler, memory, coupler, arm, coupler
// picks up (i sqrt(TR))^2 and e^{i alpha} per long-arm traversal. The memory
// reverses time, so ss and ll meet in the centre; sl and ls arrive alone.
struct PathSum {
  cplx early, central, late;
};

PathSum path_sum(double alpha, double t) {
  const cplx unit = std::pow(cplx(0.0, std::sqrt(t * (1.0 - t))), 2);
  const cplx ea = std::polar(1.0, alpha);
  return {unit * ea, unit * (1.0 + ea * ea), unit * ea};
}

}  // namespace

TEST_CASE("single pass") {
  const SampledEnvelope p = short_pulse();
  SUBCASE("balanced arms recombine into one port") {
    const MzOutput o = mz_pass(p, mz(0.0, 0.5, 0.0), Direction::LeftToRight);
    CHECK(o.ports[0].energy() < 1e-28);
    CHECK(o.ports[1].energy() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("long imbalance splits into two equal bins per port") {
    const SampledEnvelope padded = on_grid(p, TimeGrid::covering(p.t_start(), p.grid().t_end() + 20.0, p.dt()));
    const MzOutput o = mz_pass(padded, mz(0.3), Direction::LeftToRight);
    CHECK(energy_between(o.ports[1], -10.0, 10.0) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(energy_between(o.ports[1], 10.0, 40.0) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(o.ports[0].energy() + o.ports[1].energy() == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("energy is conserved for any coupler and phase") {
    const SampledEnvelope padded = on_grid(p, TimeGrid::covering(p.t_start(), p.grid().t_end() + 3.0, p.dt()));
    for (double t : {0.1, 0.5, 0.8})
      for (double a : {0.0, 1.0, 2.5}) {
        const MzOutput o = mz_pass(padded, mz(a, t, 0.5), Direction::RightToLeft, 1);
        CHECK(o.ports[0].energy() + o.ports[1].energy() == doctest::Approx(1.0).epsilon(1e-10));
      }
  }
  SUBCASE("delayed copy must fit on the grid") {
    CHECK_THROWS_AS(mz_pass(p, mz(0.0), Direction::LeftToRight), Error);
  }
}

TEST_CASE("double pass with the ideal memory matches the path sum") {
  const SampledEnvelope p = short_pulse();
  const MemoryBackend ideal;
  for (double t : {0.5, 0.3}) {
    for (double alpha : {0.0, 0.4, kPi / 2.0, 2.0}) {
      CAPTURE(t);
      CAPTURE(alpha);
      const DoublePassResult r = double_pass(p, mz(alpha, t), ideal);
      const PathSum ps = path_sum(alpha, t);
      CHECK(r.i_early == doctest::Approx(std::norm(ps.early)).epsilon(1e-9));
      CHECK(r.i_late == doctest::Approx(std::norm(ps.late)).epsilon(1e-9));
      CHECK(std::abs(r.i_central - std::norm(ps.central)) < 1e-9);
      // Amplitudes, not just intensities. The pulse is symmetric, so each
      // window holds a shifted copy; the memory's own phase cancels in ratios.
      const cplx c = overlap(shifted(p, r.central_time), r.central);
      const cplx e = overlap(shifted(p, r.central_time - 20.0), r.early);
      const cplx l = overlap(shifted(p, r.central_time + 20.0), r.late);
      CHECK(std::abs(c / e - ps.central / ps.early) < 1e-9);
      CHECK(std::abs(l / e - ps.late / ps.early) < 1e-9);
      CHECK(r.output.energy() + r.unused_energy == doctest::Approx(r.input_energy).epsilon(1e-10));
      CHECK(r.stray_energy < 1e-10);
    }
  }
}

TEST_CASE("fringe") {
  const SampledEnvelope p = short_pulse();
  const MemoryBackend ideal;
  const auto rows = fringe_sweep(p, mz(0.0), ideal, 0.0, 2.0 * kPi, 17);
  REQUIRE(rows.size() == 17);
  CHECK(rows.back().alpha == doctest::Approx(2.0 * kPi));
  const FringeAnalysis a = analyze_fringe(rows);
  CHECK(a.visibility == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.period == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(a.early_spread < 1e-9);
  CHECK(a.late_spread < 1e-9);
  const double peak = double_pass(p, mz(0.0), ideal).i_central;
  CHECK(double_pass(p, mz(kPi / 2.0), ideal).i_central / peak < 1e-6);
}

TEST_CASE("plain delay in place of the memory: no central fringe") {
  const SampledEnvelope p = short_pulse();
  MemoryBackend delay;
  delay.kind = BackendKind::Delay;
  delay.delay = 40.0;
  const FringeAnalysis a = analyze_fringe(fringe_sweep(p, mz(0.0), delay, 0.0, 2.0 * kPi, 17));
  CHECK(a.central_spread < 1e-9);
  // Without reversal the centre holds sl + ls, whose phases are both e^{i alpha}.
  const DoublePassResult r = double_pass(p, mz(1.0), delay);
  CHECK(r.i_central == doctest::Approx(4.0 * std::norm(path_sum(0.0, 0.5).early)).epsilon(1e-9));
}

TEST_CASE("path blocking") {
  const SampledEnvelope p = short_pulse();
  const MemoryBackend ideal;
  const double unit = std::norm(path_sum(0.0, 0.5).early);
  DoublePassOptions only_long;
  only_long.first_pass = only_long.second_pass = ArmMask{false, true};
  const DoublePassResult ll = double_pass(p, mz(0.7), ideal, only_long);
  CHECK(ll.i_central == doctest::Approx(unit).epsilon(1e-9));
  CHECK(ll.i_early < 1e-20);
  CHECK(ll.i_late < 1e-20);
  DoublePassOptions only_short;
  only_short.first_pass = only_short.second_pass = ArmMask{true, false};
  const DoublePassResult ss = double_pass(p, mz(0.7), ideal, only_short);
  CHECK(ss.i_central == doctest::Approx(unit).epsilon(1e-9));
  CHECK(ss.i_early < 1e-20);
}

TEST_CASE("premise: the pulse must be short against the imbalance") {
  const SampledEnvelope wide = short_pulse(0.2);
  CHECK_THROWS_AS(double_pass(wide, mz(0.0), MemoryBackend{}), Error);
  CHECK_THROWS_AS(mz(0.0, 1.0).validate(), Error);
  CHECK(MzConfig::from_carrier(2.0, kPi / 4.0).alpha == doctest::Approx(kPi / 2.0));
}
