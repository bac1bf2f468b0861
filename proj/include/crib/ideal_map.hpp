#pragma once

#include <filesystem>
#include <vector>

#include "crib/envelope.hpp"

namespace crib {

/// Retrieved field of the lossless memory: the input envelope reversed in time
/// and multiplied by exp(-i chi12). A packet entering at the grid start t0
/// leaves at t_prime, i.e. time t maps to t0 + t_prime - t.
SampledEnvelope ideal_retrieve_envelope(const SampledEnvelope& input, double chi12, double t_prime);

/// One n-photon block of a multimode state in the temporal representation,
/// plus the vacuum amplitude. Values are a rank-n tensor over the same time
/// grid on every axis, row-major with the first argument slowest.
struct NPhotonAmplitude {
  static constexpr int kMaxPhotons = 3;
  static constexpr std::size_t kMaxGrid = 128;

  int n = 1;
  TimeGrid grid{};
  std::vector<cplx> values;
  cplx vacuum{};

  std::size_t element_count() const noexcept;

  /// |vacuum|^2 + sum |values|^2 dt^n
  double norm() const noexcept;

  /// max |phi(..i..j..) - phi(..j..i..)| over all argument swaps.
  double max_asymmetry() const;

  /// Size limits, symmetry (1e-10) and normalisation (1e-8).
  void validate() const;

  /// Symmetrised, normalised product of single-photon envelopes with weight
  /// sqrt(1 - |vacuum|^2) on the n-photon block.
  static NPhotonAmplitude symmetrized_product(const std::vector<SampledEnvelope>& factors,
                                              cplx vacuum = {});
};

/// Each time argument is reversed as in ideal_retrieve_envelope and the block
/// acquires exp(-i n chi12); the vacuum amplitude is untouched.
NPhotonAmplitude ideal_retrieve_nphoton(const NPhotonAmplitude& state, double chi12, double t_prime);

/// Writes `<stem>.json` (header) and `<stem>.csv` (payload, columns re,im).
void write_nphoton(const NPhotonAmplitude& state, const std::filesystem::path& stem);
NPhotonAmplitude read_nphoton(const std::filesystem::path& stem);

}  // namespace crib
