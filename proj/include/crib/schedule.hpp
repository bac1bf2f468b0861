#pragma once

namespace crib {

/// Event times and control-pulse phases of the three-pulse protocol.
///
/// The first control pulse at t1 moves the optical coherence to the spin
/// transition, the detunings are inverted at t_inv, and the second control
/// pulse at t2 = 2 t_inv - t1 returns the coherence for backward emission.
struct ProtocolSchedule {
  double t1 = 0.0;
  double t_inv = 0.0;
  double t2 = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double omega32 = 0.0;

  static ProtocolSchedule mirrored(double t1, double storage, double xi1 = 0.0, double xi2 = 0.0,
                                   double omega32 = 0.0);

  /// Global phase imprinted on the retrieved field: xi1 - xi2 - omega32 (t2 - t1).
  double chi12() const noexcept { return xi1 - xi2 - omega32 * (t2 - t1); }

  /// Exit epoch of a packet that entered at t0.
  double t_prime(double t0) const noexcept { return t2 + t1 - t0; }

  double storage() const noexcept { return t2 - t1; }

  /// Throws Schedule unless t1 < t_inv < t2 and t2 == 2 t_inv - t1.
  void validate() const;
};

}  // namespace crib
