#pragma once

#include <optional>

#include "crib/envelope.hpp"
#include "crib/medium.hpp"
#include "crib/schedule.hpp"
#include "crib/solver.hpp"

namespace crib {

enum class BackendKind { Ideal, Solver, Delay };

BackendKind parse_backend_kind(const std::string& name);
const char* to_string(BackendKind kind) noexcept;

/// A memory that can be dropped into the time-bin and interferometer pipelines.
struct MemoryBackend {
  BackendKind kind = BackendKind::Ideal;
  /// Event times and control phases. With auto_schedule the times are moved so
  /// that t1 coincides with the end of forward absorption; storage time and
  /// phases are kept.
  ProtocolSchedule schedule = ProtocolSchedule::mirrored(1.0, 2.0);
  bool auto_schedule = true;
  std::optional<AtomicMedium> medium;
  ProtocolOptions options;
  double decoherence_rate = 0.0;
  /// Delay backend: plain, non-reversing delay.
  double delay = 0.0;

  ProtocolSchedule resolve_schedule(const SampledEnvelope& input) const;
};

struct MemoryOutput {
  SampledEnvelope envelope;
  /// Prediction of the lossless time-reversing channel for the same schedule.
  SampledEnvelope ideal;
  ProtocolSchedule schedule;
  double efficiency = 1.0;
  double fidelity_vs_ideal = 1.0;
  double max_ledger_residual = 0.0;
};

MemoryOutput apply_memory(const MemoryBackend& backend, const SampledEnvelope& input);

/// Earliest admissible first control pulse for `input` under `options`.
double earliest_t1(const SampledEnvelope& input, double medium_length, const ProtocolOptions& options);

}  // namespace crib
