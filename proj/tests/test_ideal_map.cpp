#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "crib/error.hpp"
#include "crib/ideal_map.hpp"
#include "crib/schedule.hpp"

using namespace crib;

TEST_CASE("single gaussian comes back reversed about the exit epoch") {
  const TimeGrid grid = TimeGrid::covering(-4.0, 6.0, 0.05);
  const SampledEnvelope in = make_gaussian(grid, 1.0, 1.0, 0.3, 1.0);
  const ProtocolSchedule s = ProtocolSchedule::mirrored(10.0, 4.0);
  const double tp = s.t_prime(in.t_start());
  const SampledEnvelope out = ideal_retrieve_envelope(in, 0.0, tp);
  const SampledEnvelope rev = time_reverse(in, 0.5 * (in.t_start() + tp));
  CHECK(fidelity(out, rev) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(overlap(rev, out) - 1.0) < 1e-12);
  // Sample at t is the input at t0 + t' - t.
  for (std::size_t i = 0; i < out.size(); i += 7) CHECK(std::abs(out[i] - in.at(in.t_start() + tp - out.time(i))) < 1e-12);
  CHECK(out.energy() == doctest::Approx(in.energy()).epsilon(1e-14));
}

TEST_CASE("double packet: order swaps, phases pick up -chi12") {
  DoublePacketSpec spec;
  spec.alpha = 0.8;
  spec.beta = 0.6;
  spec.phi1 = 0.4;
  spec.phi2 = -1.1;
  spec.tau = 12.0;
  const TimeGrid grid = TimeGrid::covering(-8.0, 20.0, 0.02);
  const SampledEnvelope in = make_double_packet(grid, spec);
  const double chi = 0.9, tp = 40.0;
  const SampledEnvelope out = ideal_retrieve_envelope(in, chi, tp);
  // Reversed unit packets: the late input packet leaves first.
  const SampledEnvelope first = ideal_retrieve_envelope(make_gaussian(grid, 1.0, spec.tau, 0.0, 1.0), 0.0, tp);
  const SampledEnvelope second = ideal_retrieve_envelope(make_gaussian(grid, 1.0, 0.0, 0.0, 1.0), 0.0, tp);
  CHECK(first.energy() > 0.99);
  const cplx a1 = overlap(first, out), a2 = overlap(second, out);
  CHECK(std::abs(a1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(std::abs(a2) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(std::abs(std::remainder(std::arg(a1) - (spec.phi2 - chi), 2 * kPi)) < 1e-12);
  CHECK(std::abs(std::remainder(std::arg(a2) - (spec.phi1 - chi), 2 * kPi)) < 1e-12);
  // And it really leaves first.
  double c1 = 0.0, c2 = 0.0, e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    c1 += std::norm(first[i]) * first.time(i);
    e1 += std::norm(first[i]);
    c2 += std::norm(second[i]) * second.time(i);
    e2 += std::norm(second[i]);
  }
  CHECK(c1 / e1 < c2 / e2);
}

TEST_CASE("linearity and gauge covariance") {
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  const TimeGrid grid{-3.0, 0.1, 61};
  std::vector<cplx> a(grid.size), b(grid.size), sum(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) {
    a[i] = {n(rng), n(rng)};
    b[i] = {n(rng), n(rng)};
    sum[i] = 2.0 * a[i] - cplx(0.0, 1.5) * b[i];
  }
  const SampledEnvelope ea(grid, a), eb(grid, b), es(grid, sum);
  const double chi = -2.2, tp = 9.0;
  const SampledEnvelope oa = ideal_retrieve_envelope(ea, chi, tp), ob = ideal_retrieve_envelope(eb, chi, tp);
  const SampledEnvelope os = ideal_retrieve_envelope(es, chi, tp);
  for (std::size_t i = 0; i < os.size(); ++i) CHECK(std::abs(os[i] - (2.0 * oa[i] - cplx(0.0, 1.5) * ob[i])) < 1e-12);
  const SampledEnvelope o0 = ideal_retrieve_envelope(ea, 0.0, tp);
  for (std::size_t i = 0; i < o0.size(); ++i) CHECK(std::abs(oa[i] - std::polar(1.0, -chi) * o0[i]) < 1e-14);

  const SampledEnvelope z = ideal_retrieve_envelope(SampledEnvelope::zeros(grid), 1.0, tp);
  CHECK(z.energy() == 0.0);
}

TEST_CASE("n-photon map") {
  const TimeGrid grid = TimeGrid::covering(-5.0, 5.0, 0.1);
  const SampledEnvelope f = make_gaussian(grid, 1.0, -1.0, 0.2, 1.0);
  const SampledEnvelope g = make_gaussian(grid, 1.5, 1.5, -0.7, 1.0);
  const double chi = 0.6, tp = 12.0;

  SUBCASE("n = 1 block matches the envelope map") {
    const NPhotonAmplitude one = NPhotonAmplitude::symmetrized_product({f});
    const NPhotonAmplitude out = ideal_retrieve_nphoton(one, chi, tp);
    const SampledEnvelope ref = ideal_retrieve_envelope(f, chi, tp);
    REQUIRE(out.values.size() == ref.size());
    CHECK(out.grid.t_start == doctest::Approx(ref.t_start()).epsilon(1e-12));
    const double scale = std::abs(one.values[50]) / std::abs(f[50]);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(out.values[i] - scale * ref[i]) < 1e-10);
  }
  SUBCASE("n = 2 product maps factor by factor with phase e^{-2 i chi}") {
    const NPhotonAmplitude two = NPhotonAmplitude::symmetrized_product({f, g});
    two.validate();
    const NPhotonAmplitude out = ideal_retrieve_nphoton(two, chi, tp);
    const NPhotonAmplitude want = NPhotonAmplitude::symmetrized_product(
        {ideal_retrieve_envelope(f, 0.0, tp), ideal_retrieve_envelope(g, 0.0, tp)});
    REQUIRE(out.values.size() == want.values.size());
    const cplx phase = std::polar(1.0, -2.0 * chi);
    double err = 0.0;
    for (std::size_t i = 0; i < out.values.size(); ++i) err = std::max(err, std::abs(out.values[i] - phase * want.values[i]));
    CHECK(err < 1e-12);
    CHECK(out.norm() == doctest::Approx(two.norm()).epsilon(1e-12));
    CHECK(out.max_asymmetry() < 1e-12);
  }
  SUBCASE("vacuum is a fixed point") {
    NPhotonAmplitude vac = NPhotonAmplitude::symmetrized_product({f}, 1.0);
    const NPhotonAmplitude out = ideal_retrieve_nphoton(vac, chi, tp);
    CHECK(out.vacuum == cplx(1.0));
    for (const cplx& v : out.values) CHECK(v == cplx(0.0));
  }
  SUBCASE("size limits and symmetry are enforced") {
    const TimeGrid big{0.0, 0.1, 200};
    CHECK_THROWS_AS(NPhotonAmplitude::symmetrized_product({make_gaussian(big, 1.0, 10.0, 0.0, 1.0)}), Error);
    NPhotonAmplitude two = NPhotonAmplitude::symmetrized_product({f, g});
    two.values[3] += 0.1;
    CHECK_THROWS_AS(two.validate(), Error);
  }
  SUBCASE("file round trip") {
    const NPhotonAmplitude two = NPhotonAmplitude::symmetrized_product({f, g}, cplx(0.0, 0.3));
    const auto stem = std::filesystem::temp_directory_path() / "crib_nphoton_roundtrip";
    write_nphoton(two, stem);
    const NPhotonAmplitude back = read_nphoton(stem);
    std::filesystem::remove(std::filesystem::path(stem.string() + ".json"));
    std::filesystem::remove(std::filesystem::path(stem.string() + ".csv"));
    CHECK(back.n == 2);
    CHECK(back.vacuum == two.vacuum);
    REQUIRE(back.values.size() == two.values.size());
    for (std::size_t i = 0; i < back.values.size(); ++i) CHECK(back.values[i] == two.values[i]);
  }
}

TEST_CASE("in frequency space the map conjugates the spectrum axis") {
  const TimeGrid grid = TimeGrid::covering(-6.0, 8.0, 0.05);
  DoublePacketSpec spec;
  spec.alpha = 0.9;
  spec.beta = cplx(0.0, std::sqrt(0.19));
  spec.tau = 3.0;
  spec.phi1 = 0.5;
  const SampledEnvelope in = make_double_packet(grid, spec);
  const double chi = 1.3, tp = 17.0;
  const SampledEnvelope out = ideal_retrieve_envelope(in, chi, tp);
  auto spectrum = [](const SampledEnvelope& e, double w) {
    cplx acc{};
    for (std::size_t i = 0; i < e.size(); ++i) acc += e[i] * std::polar(1.0, w * e.time(i));
    return acc * e.dt();
  };
  // F_out(w) = e^{-i chi} e^{i w (t0 + t')} F_in(-w)
  for (double w : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
    const cplx want = std::polar(1.0, -chi + w * (in.t_start() + tp)) * spectrum(in, -w);
    CHECK(std::abs(spectrum(out, w) - want) < 1e-10);
  }
}
