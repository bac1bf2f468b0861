#include "crib/timebin.hpp"

#include <cmath>

#include "crib/error.hpp"
#include "crib/ideal_map.hpp"

namespace crib {

namespace {

constexpr double kEmptyBin = 1e-9;

double wrap(double phase) { return std::remainder(phase, 2.0 * kPi); }

SampledEnvelope late_copy(const SampledEnvelope& bin, double tau, const TimeGrid& grid) {
  return on_grid(shifted(bin, tau), grid);
}

struct BinFit {
  cplx early, late;
  /// Energy of the projection onto span{early, late}.
  double captured = 0.0;
};

// Least-squares fit env ~ a f + b g; the bins are not exactly orthogonal.
BinFit fit_bins(const SampledEnvelope& f, const SampledEnvelope& g, const SampledEnvelope& env) {
  const cplx ff = overlap(f, f), fg = overlap(f, g), gg = overlap(g, g);
  const cplx bf = overlap(f, env), bg = overlap(g, env);
  const cplx det = ff * gg - fg * std::conj(fg);
  if (!(std::abs(det) > 1e-12 * std::abs(ff * gg))) throw Error(ErrorKind::Degenerate, "time bins are not separable");
  BinFit fit;
  const cplx a = (gg * bf - fg * bg) / det;
  const cplx b = (ff * bg - std::conj(fg) * bf) / det;
  fit.captured = std::real(std::conj(a) * bf + std::conj(b) * bg);
  fit.early = a * std::sqrt(std::real(ff));
  fit.late = b * std::sqrt(std::real(gg));
  return fit;
}

}  // namespace

double bin_overlap(const SampledEnvelope& bin, double tau) {
  const double e = bin.energy();
  if (!(e > 0.0)) throw Error(ErrorKind::Degenerate, "empty bin envelope");
  return std::abs(overlap(bin, shifted(bin, tau))) / e;
}

SampledEnvelope encode(const TimeBinQubit& q, double overlap_threshold) {
  if (!(q.r >= 0.0 && q.r <= 1.0)) throw Error(ErrorKind::InvalidArgument, "r must lie in [0, 1]");
  if (!(q.tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be > 0");
  if (std::abs(q.bin.energy() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "bin envelope must have unit energy");
  const double ov = bin_overlap(q.bin, q.tau);
  if (ov > overlap_threshold)
    throw Error(ErrorKind::InvalidArgument,
                "time bins overlap: |<f, f(t - tau)>| = " + std::to_string(ov) + " > " + std::to_string(overlap_threshold));
  const TimeGrid grid = TimeGrid::covering(q.bin.t_start(), q.bin.grid().t_end() + q.tau, q.bin.dt());
  const SampledEnvelope early = on_grid(q.bin, grid);
  const SampledEnvelope late = late_copy(q.bin, q.tau, grid);
  const cplx b = std::polar(std::sqrt(std::max(0.0, 1.0 - q.r * q.r)), q.phi);
  std::vector<cplx> s(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) s[i] = q.r * early[i] + b * late[i];
  return SampledEnvelope(grid, std::move(s), q.bin.carrier_phase_ref());
}

Decoded decode(const SampledEnvelope& env, double tau, const SampledEnvelope& early_bin) {
  const double e = env.energy();
  if (!(e > 0.0)) throw Error(ErrorKind::Degenerate, "cannot decode an empty envelope");
  const double eb = early_bin.energy();
  if (!(eb > 0.0)) throw Error(ErrorKind::Degenerate, "empty bin envelope");
  Decoded d;
  const BinFit fit = fit_bins(early_bin, shifted(early_bin, tau), env);
  d.early = fit.early;
  d.late = fit.late;
  const double weight = std::norm(d.early) + std::norm(d.late);
  if (weight <= 1e-12 * e) throw Error(ErrorKind::Degenerate, "envelope has no weight in either bin: phase undefined");
  const double n = std::sqrt(weight);
  d.r = std::abs(d.early) / n;
  d.residual = std::max(0.0, 1.0 - fit.captured / e);
  d.phase_defined = std::abs(d.early) > kEmptyBin * n && std::abs(d.late) > kEmptyBin * n;
  d.phi = d.phase_defined ? wrap(std::arg(d.late) - std::arg(d.early)) : 0.0;
  return d;
}

TimeBinTransform memory_transform(const TimeBinQubit& q, double chi12, const MemoryBackend& backend) {
  const SampledEnvelope input = encode(q);
  MemoryBackend be = backend;
  if (be.kind == BackendKind::Delay) throw Error(ErrorKind::InvalidArgument, "time-bin transform needs a reversing memory");
  be.schedule.xi2 = be.schedule.xi1 - chi12 - be.schedule.omega32 * be.schedule.storage();
  const MemoryOutput mem = apply_memory(be, input);

  // Output bins: the reversed late input bin leaves first.
  const double t_prime = mem.schedule.t_prime(input.t_start());
  const SampledEnvelope late_in = late_copy(q.bin, q.tau, input.grid());
  const SampledEnvelope early_out = ideal_retrieve_envelope(late_in, 0.0, t_prime);
  const SampledEnvelope late_out = shifted(early_out, q.tau);
  const double eb = early_out.energy();

  TimeBinTransform t;
  t.output = mem.envelope;
  t.efficiency = mem.efficiency;
  t.bin_shape_fidelity = mem.fidelity_vs_ideal;
  const double e = mem.envelope.energy();
  if (!(e > 0.0)) throw Error(ErrorKind::Degenerate, "memory returned no light");
  const BinFit fit = fit_bins(early_out, late_out, mem.envelope);
  const cplx a_early = fit.early, a_late = fit.late;
  const double weight = std::norm(a_early) + std::norm(a_late);
  if (weight <= 1e-12 * e) throw Error(ErrorKind::Degenerate, "memory output misses both bins");
  const double n = std::sqrt(weight);
  t.residual = std::max(0.0, 1.0 - fit.captured / e);
  t.qubit = q;
  t.qubit.r = std::abs(a_early) / n;
  t.phase_defined = std::abs(a_early) > kEmptyBin * n && std::abs(a_late) > kEmptyBin * n;
  t.qubit.phi = t.phase_defined ? wrap(std::arg(a_early) - std::arg(a_late)) : 0.0;
  t.qubit.bin = early_out.scaled(1.0 / std::sqrt(eb));

  // Common phase: overlap with the phase-free reversed input.
  const SampledEnvelope reference = ideal_retrieve_envelope(input, 0.0, t_prime);
  t.global_phase = wrap(std::arg(overlap(reference, mem.envelope)) + mem.envelope.carrier_phase_ref() -
                        input.carrier_phase_ref());
  return t;
}

}  // namespace crib
