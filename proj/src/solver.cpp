#include "crib/solver.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "crib/error.hpp"
#include "crib/ideal_map.hpp"
#include "crib/simd/kernels.hpp"

namespace crib {

double StageResult::ledger_residual() const noexcept {
  const double in = field_in_energy + coherence_in;
  const double out = field_out.energy() + coherence_out + leaked_energy;
  return std::abs(in - out) / std::max(in, 1e-300);
}

namespace {

constexpr std::size_t kEdgeSamples = 3;
constexpr double kEdgeTolerance = 1e-8;

void check_steps(const AtomicMedium& m, double du) {
  if (!(du > 0.0)) throw Error(ErrorKind::StepSize, "time step must be > 0");
  if (m.max_abs_detuning() * du >= kPi)
    throw Error(ErrorKind::StepSize, "detuning grid aliases: max|delta| * du = " +
                                         std::to_string(m.max_abs_detuning() * du) + " >= pi");
  const double depth_per_cell = m.beta_cal / static_cast<double>(m.cells());
  if (depth_per_cell > 1.0)
    throw Error(ErrorKind::StepSize, "spatial grid too coarse: beta/cells = " + std::to_string(depth_per_cell));
}

StepReport step_report(const AtomicMedium& m, double du) {
  const double g = m.coupling();
  const double a = g * du;
  const double b = m.beta_cal / static_cast<double>(m.cells());
  const double worst = std::max(a, b);
  return StepReport{m.dz(), du, worst * worst * worst / 12.0};
}

/// Cell-staggered midpoint scheme in retarded time. Field samples live on cell
/// faces for the duration of one step, coherences at cell centres on step
/// boundaries. Per step and cell:
///   a   = e^{-i delta du/2} s^n
///   A'  = [(1 - q) A + i g dz sum_k w_k a_k] / (1 + q),  q = g^2 dz du / 4
///   s^{n+1} = e^{-i delta du} s^n + i g du e^{-i delta du/2} (A + A')/2
/// which conserves |A|^2 du + sum w |s|^2 dz exactly per cell.
std::vector<cplx> propagate(std::span<const cplx> field_in, CoherenceField& coh, const AtomicMedium& m,
                            double du, bool backward) {
  const std::size_t nd = m.n_detunings();
  const std::size_t nc = m.cells();
  std::vector<double> rc(nd), rs(nd), hc(nd), hs(nd);
  for (std::size_t k = 0; k < nd; ++k) {
    rc[k] = std::cos(m.detunings[k] * du);
    rs[k] = -std::sin(m.detunings[k] * du);
    hc[k] = std::cos(0.5 * m.detunings[k] * du);
    hs[k] = -std::sin(0.5 * m.detunings[k] * du);
  }
  const double g = m.coupling();
  const double dz = m.dz();
  const double q = 0.25 * g * g * dz * du;
  const double inv = 1.0 / (1.0 + q);
  const auto& kern = simd::kernels();
  const double* w = m.weights.data();

  std::vector<cplx> out(field_in.size());
  for (std::size_t n = 0; n < field_in.size(); ++n) {
    cplx field = field_in[n];
    for (std::size_t step = 0; step < nc; ++step) {
      const std::size_t c = backward ? nc - 1 - step : step;
      double* sr = coh.re.data() + c * nd;
      double* si = coh.im.data() + c * nd;
      const cplx polarization = kern.weighted_rotated_sum(sr, si, hc.data(), hs.data(), w, nd);
      const cplx next = ((1.0 - q) * field + cplx(0.0, g * dz) * polarization) * inv;
      const cplx drive = cplx(0.0, g * du) * (0.5 * (field + next));
      kern.rotate_drive(sr, si, rc.data(), rs.data(), hc.data(), hs.data(), drive, nd);
      field = next;
    }
    out[n] = field;
  }
  return out;
}

double edge_energy(std::span<const cplx> s, double dt, bool tail) {
  double acc = 0.0;
  const std::size_t n = std::min(kEdgeSamples, s.size());
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(tail ? s[s.size() - 1 - i] : s[i]);
  return acc * dt;
}

StageResult retrieve_impl(const CoherenceField& coherence, const AtomicMedium& medium,
                          const RetrievalWindow& window) {
  if (coherence.active != Transition::Sigma13)
    throw Error(ErrorKind::WrongTransition, "retrieval needs the optical coherence active");
  if (coherence.cells != medium.cells() || coherence.n_detunings != medium.n_detunings())
    throw Error(ErrorKind::InvalidArgument, "coherence field does not match the medium grid");
  check_steps(medium, window.dt);
  const double u_start = window.t_start - medium.length - 0.5 * window.dt;

  StageResult r;
  r.coherence = free_evolve(coherence, medium, u_start + medium.length, -1.0);
  r.coherence_in = r.coherence.excitation_norm(medium.weights);
  const std::vector<cplx> silence(window.steps);
  std::vector<cplx> out = propagate(silence, r.coherence, medium, window.dt, true);
  r.coherence.frame_origin = u_start + static_cast<double>(window.steps) * window.dt + medium.length;
  r.coherence_out = r.coherence.excitation_norm(medium.weights);
  r.field_out = SampledEnvelope(TimeGrid{window.t_start, window.dt, window.steps}, std::move(out));
  r.step_report = step_report(medium, window.dt);
  return r;
}

}  // namespace

CoherenceField free_evolve(const CoherenceField& coherence, const AtomicMedium& medium, double frame_origin,
                           double frame_slope) {
  CoherenceField out = coherence;
  out.frame_origin = frame_origin;
  out.frame_slope = frame_slope;
  if (coherence.active != Transition::Sigma13) return out;
  const std::size_t nd = coherence.n_detunings;
  std::vector<double> cs(nd), sn(nd);
  const auto& kern = simd::kernels();
  for (std::size_t c = 0; c < coherence.cells; ++c) {
    const double elapsed = out.lab_time(c) - coherence.lab_time(c);
    if (elapsed == 0.0) continue;
    for (std::size_t k = 0; k < nd; ++k) {
      cs[k] = std::cos(medium.detunings[k] * elapsed);
      sn[k] = -std::sin(medium.detunings[k] * elapsed);
    }
    kern.rotate(out.re.data() + c * nd, out.im.data() + c * nd, cs.data(), sn.data(), nd);
  }
  return out;
}

StageResult absorb(const SampledEnvelope& input, const AtomicMedium& medium, double window) {
  if (medium.inverted) throw Error(ErrorKind::InvalidArgument, "absorption needs an un-inverted medium");
  if (input.size() < 2) throw Error(ErrorKind::InvalidArgument, "input envelope needs >= 2 samples");
  const double dt = input.dt();
  check_steps(medium, dt);
  const std::size_t steps =
      std::max(input.size(), static_cast<std::size_t>(std::llround(window / dt)) + 1);

  StageResult r;
  r.field_in_energy = input.energy();
  const double e_in = r.field_in_energy;
  if (e_in > 0.0 && (edge_energy(input.samples(), dt, false) > kEdgeTolerance * e_in ||
                     edge_energy(input.samples(), dt, true) > kEdgeTolerance * e_in))
    throw Error(ErrorKind::WindowOverflow, "input pulse touches the edge of the integration window");

  std::vector<cplx> padded(steps);
  std::copy(input.samples().begin(), input.samples().end(), padded.begin());
  const double u_end = input.t_start() + (static_cast<double>(steps) - 0.5) * dt;
  r.coherence = CoherenceField::zeros(medium, input.t_start() - 0.5 * dt, 1.0);
  std::vector<cplx> out = propagate(padded, r.coherence, medium, dt, false);
  r.coherence.frame_origin = u_end;
  r.coherence_out = r.coherence.excitation_norm(medium.weights);
  if (e_in > 0.0 && edge_energy(out, dt, true) > kEdgeTolerance * e_in)
    throw Error(ErrorKind::WindowOverflow, "transmitted field still leaving at the window end");
  r.field_out = SampledEnvelope(TimeGrid{input.t_start() + medium.length, dt, steps}, std::move(out),
                                input.carrier_phase_ref());
  r.step_report = step_report(medium, dt);
  return r;
}

CoherenceField control_pi_pulse(const CoherenceField& coherence, int pulse_index, double xi, double t_event,
                                const AtomicMedium& medium, double omega32) {
  if (pulse_index == 1) {
    if (coherence.active != Transition::Sigma13)
      throw Error(ErrorKind::WrongTransition, "first control pulse needs the optical coherence active");
    CoherenceField out = free_evolve(coherence, medium, t_event, 0.0);
    const double phase = -(omega32 * t_event + xi);
    const cplx factor = cplx(0.0, 1.0) * std::polar(1.0, phase);
    for (std::size_t i = 0; i < out.re.size(); ++i) {
      const cplx v = factor * cplx(out.re[i], out.im[i]);
      out.re[i] = v.real();
      out.im[i] = v.imag();
    }
    out.active = Transition::Sigma12;
    out.stored_phase += phase + 0.5 * kPi;
    return out;
  }
  if (pulse_index == 2) {
    if (coherence.active != Transition::Sigma12)
      throw Error(ErrorKind::WrongTransition, "second control pulse needs the spin coherence active");
    CoherenceField out = coherence;
    const double phase = omega32 * t_event + xi;
    const std::size_t nd = out.n_detunings;
    for (std::size_t c = 0; c < out.cells; ++c) {
      const double z = (static_cast<double>(c) + 0.5) * out.dz;
      const cplx factor = cplx(0.0, 1.0) * std::polar(1.0, phase + medium.omega21_mismatch * z);
      for (std::size_t k = 0; k < nd; ++k) {
        const std::size_t i = c * nd + k;
        const cplx v = factor * cplx(out.re[i], out.im[i]);
        out.re[i] = v.real();
        out.im[i] = v.imag();
      }
    }
    out.active = Transition::Sigma13;
    out.frame_origin = t_event;
    out.frame_slope = 0.0;
    out.stored_phase += phase + 0.5 * kPi;
    return out;
  }
  throw Error(ErrorKind::InvalidArgument, "pulse index must be 1 or 2");
}

CoherenceField store(const CoherenceField& coherence, double duration, double decoherence_rate) {
  if (coherence.active != Transition::Sigma12)
    throw Error(ErrorKind::WrongTransition, "storage needs the spin coherence active");
  if (!(duration >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative storage duration");
  if (!(decoherence_rate >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative decoherence rate");
  CoherenceField out = coherence;
  const double decay = std::exp(-decoherence_rate * duration);
  if (decay != 1.0) {
    for (double& v : out.re) v *= decay;
    for (double& v : out.im) v *= decay;
  }
  return out;
}

StageResult retrieve(const CoherenceField& coherence, const AtomicMedium& inverted_medium,
                     const RetrievalWindow& window) {
  if (!inverted_medium.inverted) throw Error(ErrorKind::InvalidArgument, "retrieval needs an inverted medium");
  return retrieve_impl(coherence, inverted_medium, window);
}

ProtocolReport run_protocol(const SampledEnvelope& input, const AtomicMedium& medium,
                            const ProtocolSchedule& schedule, double decoherence_rate,
                            const ProtocolOptions& options) {
  schedule.validate();
  if (options.forward_tail < 0.0 || options.retrieval_tail < 0.0)
    throw Error(ErrorKind::InvalidArgument, "window tails must be >= 0");
  const double dt = input.dt();
  const double window = static_cast<double>(input.size() - 1) * dt + options.forward_tail;
  const auto steps = static_cast<std::size_t>(std::llround(window / dt)) + 1;
  const double last_sample = input.t_start() + static_cast<double>(steps - 1) * dt;
  const double u_end = last_sample + 0.5 * dt;
  if (schedule.t1 < u_end + medium.length - 1e-9)
    throw Error(ErrorKind::Schedule, "first control pulse at t1=" + std::to_string(schedule.t1) +
                                         " precedes the end of absorption at " +
                                         std::to_string(u_end + medium.length));

  ProtocolReport rep;
  rep.chi12 = schedule.chi12();
  rep.t_prime = schedule.t_prime(input.t_start());

  StageResult fwd = absorb(input, medium, window);
  rep.transmitted = fwd.field_out;
  rep.energy_ledger.push_back({"absorb", fwd.field_in_energy, fwd.field_out.energy(), 0.0, fwd.coherence_out, 0.0});

  CoherenceField coh = control_pi_pulse(fwd.coherence, 1, schedule.xi1, schedule.t1, medium, schedule.omega32);
  const double before_store = coh.excitation_norm(medium.weights);
  coh = store(coh, schedule.storage(), decoherence_rate);
  const double after_store = coh.excitation_norm(medium.weights);
  rep.energy_ledger.push_back({"store", 0.0, 0.0, before_store, after_store, before_store - after_store});

  const AtomicMedium backward_medium = options.skip_inversion ? medium : invert_detunings(medium);
  coh = control_pi_pulse(coh, 2, schedule.xi2, schedule.t2, backward_medium, schedule.omega32);

  const auto extra = static_cast<std::size_t>(std::llround(options.retrieval_tail / dt));
  const RetrievalWindow rw{schedule.t1 + schedule.t2 - last_sample, dt, steps + extra};
  StageResult bwd = retrieve_impl(coh, backward_medium, rw);
  rep.echo = bwd.field_out;
  rep.residual_coherence = bwd.coherence_out;
  rep.energy_ledger.push_back({"retrieve", 0.0, bwd.field_out.energy(), bwd.coherence_in, bwd.coherence_out, 0.0});
  rep.max_ledger_residual = std::max(fwd.ledger_residual(), bwd.ledger_residual());
  rep.step_report = fwd.step_report;

  const double e_in = input.energy();
  rep.ideal = ideal_retrieve_envelope(input, rep.chi12, rep.t_prime);
  rep.efficiency = e_in > 0.0 ? rep.echo.energy() / e_in : 0.0;
  if (rep.echo.energy() > 0.0 && e_in > 0.0) {
    rep.fidelity_vs_ideal = fidelity(rep.ideal, rep.echo);
    rep.phase_vs_ideal = std::arg(overlap(rep.ideal, rep.echo));
    rep.best_shift_fidelity = rep.fidelity_vs_ideal;
    for (int k = -options.max_shift; k <= options.max_shift; ++k) {
      const double f = fidelity(shifted(rep.ideal, k * dt), rep.echo);
      if (f > rep.best_shift_fidelity) {
        rep.best_shift_fidelity = f;
        rep.best_shift = k;
      }
    }
  }
  return rep;
}

}  // namespace crib
