#pragma once

#include "crib/envelope.hpp"
#include "crib/memory_backend.hpp"

namespace crib {

/// r|0> + sqrt(1 - r^2) e^{i phi}|1>, with |0> the early bin f(t) and |1> the
/// late bin f(t - tau). `bin` is f with unit energy.
struct TimeBinQubit {
  double r = 1.0;
  double phi = 0.0;
  double tau = 10.0;
  SampledEnvelope bin;
};

inline constexpr double kDefaultBinOverlap = 1e-4;

/// |<f(t), f(t - tau)>| for a unit-energy bin.
double bin_overlap(const SampledEnvelope& bin, double tau);

/// Two-bin envelope on a grid spanning the early bin start to the late bin end.
SampledEnvelope encode(const TimeBinQubit& q, double overlap_threshold = kDefaultBinOverlap);

struct Decoded {
  double r = 0.0;
  double phi = 0.0;
  /// False when one bin is empty; phi is then reported as 0.
  bool phase_defined = false;
  /// Share of the envelope energy outside the two-bin subspace.
  double residual = 0.0;
  cplx early{};
  cplx late{};
};

/// Least-squares fit onto `early_bin` and its copy delayed by tau. The phase is the late
/// amplitude's argument relative to the early one.
Decoded decode(const SampledEnvelope& env, double tau, const SampledEnvelope& early_bin);

struct TimeBinTransform {
  /// Qubit after the memory in the label-exchange convention: the bin that
  /// leaves early carries the former late amplitude, r' = sqrt(1 - r^2), and
  /// phi' is the phase of the early output bin relative to the late one.
  TimeBinQubit qubit;
  bool phase_defined = true;
  /// Phase common to both bins (the memory's global phase).
  double global_phase = 0.0;
  double efficiency = 1.0;
  /// Fidelity of the output envelope with the ideal channel's prediction.
  double bin_shape_fidelity = 1.0;
  double residual = 0.0;
  SampledEnvelope output;
};

/// Sends the encoded qubit through the memory. chi12 overrides the backend's
/// control phases (realised through xi2).
TimeBinTransform memory_transform(const TimeBinQubit& q, double chi12, const MemoryBackend& backend);

}  // namespace crib
