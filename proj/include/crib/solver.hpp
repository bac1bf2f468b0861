#pragma once

#include <string>
#include <vector>

#include "crib/envelope.hpp"
#include "crib/medium.hpp"
#include "crib/schedule.hpp"

namespace crib {

struct StepReport {
  double dz = 0.0;
  double du = 0.0;
  /// A-priori local truncation estimate of the second-order cell update.
  double max_local_error = 0.0;
};

/// Outcome of one propagation stage.
///
/// energy_in + coherence_in == energy(field_out) + excitation_norm(coherence)
/// + leaked_energy holds to rounding for every stage.
struct StageResult {
  SampledEnvelope field_out;
  CoherenceField coherence;
  double field_in_energy = 0.0;
  double coherence_in = 0.0;
  double coherence_out = 0.0;
  double leaked_energy = 0.0;
  StepReport step_report;

  double ledger_residual() const noexcept;
};

/// Forward absorption. The input is zero-padded to `window` (measured from its first
/// sample); the field sample n stands for the step centred on its time. Returns the
/// field at the exit face in lab time (retarded time + L) and the coherence at the
/// end of the window.
StageResult absorb(const SampledEnvelope& input, const AtomicMedium& medium, double window);

/// Instantaneous pi-area control pulse. Pulse 1 maps the optical coherence (first
/// freely evolved to the lab-time slice t_event) onto the spin transition with
/// factor i exp(-i (omega32 t1 + xi1)); pulse 2 maps back with i exp(i (omega32 t2 + xi2))
/// and the residual phase-matching factor exp(i mismatch z). The pair composes to
/// -exp(-i chi12) in the backward-mode basis.
CoherenceField control_pi_pulse(const CoherenceField& coherence, int pulse_index, double xi,
                                double t_event, const AtomicMedium& medium, double omega32 = 0.0);

/// Spin-transition storage with amplitude decay exp(-rate * duration).
CoherenceField store(const CoherenceField& coherence, double duration, double decoherence_rate);

/// Output grid of the backward stage, in lab time at the z = 0 face.
struct RetrievalWindow {
  double t_start = 0.0;
  double dt = 0.1;
  std::size_t steps = 0;
};

/// Backward emission from the stored optical coherence into an initially empty
/// backward mode. Requires an inverted medium and an active optical transition.
StageResult retrieve(const CoherenceField& coherence, const AtomicMedium& inverted_medium,
                     const RetrievalWindow& window);

/// Free evolution of optical coherence to a new lab-time frame.
CoherenceField free_evolve(const CoherenceField& coherence, const AtomicMedium& medium,
                           double frame_origin, double frame_slope);

struct LedgerEntry {
  std::string stage;
  double field_in = 0.0;
  double field_out = 0.0;
  double coherence_in = 0.0;
  double coherence = 0.0;
  double leaked = 0.0;
};

struct ProtocolOptions {
  /// Extra retarded time integrated after the input grid ends.
  double forward_tail = 0.0;
  /// Extra output samples appended to the retrieval window.
  double retrieval_tail = 0.0;
  /// Negative control: leave the detunings un-inverted.
  bool skip_inversion = false;
  /// Search +-max_shift samples for the best-aligned fidelity.
  int max_shift = 2;
};

struct ProtocolReport {
  SampledEnvelope transmitted;
  SampledEnvelope echo;
  SampledEnvelope ideal;
  double chi12 = 0.0;
  double t_prime = 0.0;
  double efficiency = 0.0;
  double fidelity_vs_ideal = 0.0;
  double phase_vs_ideal = 0.0;
  double best_shift_fidelity = 0.0;
  int best_shift = 0;
  double residual_coherence = 0.0;
  double max_ledger_residual = 0.0;
  std::vector<LedgerEntry> energy_ledger;
  StepReport step_report;
};

/// Full store-and-retrieve cycle: absorb, pulse 1, storage, inversion, pulse 2,
/// backward retrieval, and comparison against the ideal channel.
ProtocolReport run_protocol(const SampledEnvelope& input, const AtomicMedium& medium,
                            const ProtocolSchedule& schedule, double decoherence_rate = 0.0,
                            const ProtocolOptions& options = {});

struct ClosedForm {
  double efficiency = 0.0;
  double fidelity = 0.0;
  double transmission = 0.0;
};

/// Spectrally resolved prediction of the linear model. A component at envelope
/// frequency omega is transmitted with exp(-d(omega)) and returned by the backward
/// echo with amplitude 1 - exp(-d(omega)), d(omega) = d G(omega) / G(0).
ClosedForm closed_form(const SampledEnvelope& input, const AtomicMedium& medium);

}  // namespace crib
