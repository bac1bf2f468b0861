#include "crib/memory_backend.hpp"

#include <cmath>

#include "crib/error.hpp"
#include "crib/ideal_map.hpp"

namespace crib {

BackendKind parse_backend_kind(const std::string& name) {
  if (name == "ideal") return BackendKind::Ideal;
  if (name == "solver") return BackendKind::Solver;
  if (name == "delay") return BackendKind::Delay;
  throw Error(ErrorKind::InvalidArgument, "unknown memory backend '" + name + "'");
}

const char* to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::Ideal: return "ideal";
    case BackendKind::Solver: return "solver";
    case BackendKind::Delay: return "delay";
  }
  return "?";
}

double earliest_t1(const SampledEnvelope& input, double medium_length, const ProtocolOptions& options) {
  const double dt = input.dt();
  const double window = static_cast<double>(input.size() - 1) * dt + options.forward_tail;
  const auto steps = static_cast<double>(std::llround(window / dt));
  return input.t_start() + (steps + 0.5) * dt + medium_length;
}

ProtocolSchedule MemoryBackend::resolve_schedule(const SampledEnvelope& input) const {
  if (!auto_schedule) return schedule;
  const double length = medium ? medium->length : 1.0;
  const double t1 = earliest_t1(input, length, options);
  return ProtocolSchedule::mirrored(t1, schedule.storage(), schedule.xi1, schedule.xi2, schedule.omega32);
}

MemoryOutput apply_memory(const MemoryBackend& backend, const SampledEnvelope& input) {
  MemoryOutput out;
  if (backend.kind == BackendKind::Delay) {
    out.envelope = shifted(input, backend.delay);
    out.ideal = out.envelope;
    return out;
  }
  out.schedule = backend.resolve_schedule(input);
  out.schedule.validate();
  out.ideal = ideal_retrieve_envelope(input, out.schedule.chi12(), out.schedule.t_prime(input.t_start()));
  if (backend.kind == BackendKind::Ideal) {
    out.envelope = out.ideal;
    return out;
  }
  if (!backend.medium) throw Error(ErrorKind::InvalidArgument, "solver backend needs a medium");
  const ProtocolReport rep =
      run_protocol(input, *backend.medium, out.schedule, backend.decoherence_rate, backend.options);
  out.envelope = rep.echo;
  out.efficiency = rep.efficiency;
  out.fidelity_vs_ideal = rep.fidelity_vs_ideal;
  out.max_ledger_residual = rep.max_ledger_residual;
  return out;
}

}  // namespace crib
