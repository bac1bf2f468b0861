#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "crib/envelope.hpp"
#include "crib/medium.hpp"
#include "crib/schedule.hpp"

namespace crib {

enum class DetuningSampling { Stratified, Random };

struct OracleSpec {
  std::size_t atoms = 200;
  /// Envelope bandwidth used to size the mode grid: |kappa| <= 6 delta_omega + 3.
  double delta_omega = 0.3;
  std::size_t max_modes = 512;
  /// Quantisation box length; 0 picks the shortest box that avoids wrap-around.
  double box_length = 0.0;
  /// Step of the time-ordered product.
  double step = 0.05;
  DetuningSampling sampling = DetuningSampling::Stratified;
  std::uint64_t seed = 1;
};

inline constexpr std::size_t kOracleMaxAtoms = 400;
inline constexpr std::size_t kOracleMaxModes = 512;

/// Single-excitation basis [forward modes | atoms | backward modes].
///
/// Forward mode m has envelope frequency kappa_m and mode function e^{i kappa_m z};
/// backward mode m has the same frequency and e^{-i kappa_m z}. The atom-mode
/// coupling is -g_atom sqrt(dkappa / 2 pi) times the conjugate mode function at
/// z_j, with g_atom = sqrt(beta_cal / N).
struct DiscreteSystem {
  std::vector<double> atom_positions;
  std::vector<double> atom_detunings;
  std::vector<double> modes;
  double dkappa = 0.0;
  double coupling_atom = 0.0;
  double length = 1.0;
  double omega21_mismatch = 0.0;
  /// Step of the time-ordered product.
  double step = 0.05;
  /// Time at which `state` holds.
  double t_state = 0.0;
  Eigen::VectorXcd state;
  /// Energy of the input envelope; the state itself is normalised to 1.
  double input_energy = 0.0;
  /// Share of the input norm not representable on the mode grid.
  double projection_loss = 0.0;

  std::size_t n_modes() const noexcept { return modes.size(); }
  std::size_t n_atoms() const noexcept { return atom_positions.size(); }
  std::size_t dim() const noexcept { return 2 * n_modes() + n_atoms(); }

  /// Hamiltonian on [forward modes | atoms] (forward stage) or
  /// [backward modes | atoms] (backward stage). `sign` multiplies atom detunings.
  Eigen::MatrixXcd forward_hamiltonian(double sign = 1.0) const;
  Eigen::MatrixXcd backward_hamiltonian(double sign = -1.0) const;

  /// Field envelope of the backward modes at z = 0 as a function of lab time,
  /// given the state at time t_state.
  SampledEnvelope backward_output(const TimeGrid& grid) const;
  /// Forward-mode field at z = L.
  SampledEnvelope forward_output(const TimeGrid& grid) const;
};

/// Builds the discrete ensemble and loads the input pulse (whose first sample
/// time t0 is the initial time) into the forward modes while it is still
/// outside the medium.
DiscreteSystem build_system(const AtomicMedium& medium, const SampledEnvelope& input,
                            const ProtocolSchedule& schedule, const OracleSpec& spec);

struct OracleStageNorm {
  const char* stage = "";
  double norm = 0.0;
  double expected = 1.0;
};

struct OracleResult {
  SampledEnvelope echo;
  SampledEnvelope transmitted;
  double efficiency = 0.0;
  DiscreteSystem final_system;
  std::vector<OracleStageNorm> norms;
  double max_norm_error = 0.0;
};

/// Literal time-ordered product of step exponentials: forward stage t0..t1,
/// pulse 1, storage, inversion, pulse 2, backward stage t2..end of `output`.
OracleResult evolve(const DiscreteSystem& system, const ProtocolSchedule& schedule, const TimeGrid& output,
                    double decoherence_rate = 0.0, bool invert = true);

struct ReversalReport {
  std::size_t steps = 0;
  double step = 0.0;
  double deviation = 0.0;
  bool mirrored = true;
};

/// Forward steps exp(-i dt H_I(t0 + m dt)) over [t0, t1] in the interaction
/// picture, the physical control-pulse map, then backward steps
/// exp(-i dt H_I,b(t2 + m dt)); reports || U psi0 - W psi0 || where W is the
/// ideal reversal map about t_inv. A mirrored schedule makes the backward steps
/// the inverses of the forward ones taken in reverse order.
ReversalReport verify_reversal_identity(const DiscreteSystem& system, const ProtocolSchedule& schedule,
                                        std::size_t steps, bool invert = true);

struct ReversalStudy {
  std::vector<ReversalReport> runs;
  /// log2 of successive deviation ratios.
  std::vector<double> orders;
};

ReversalStudy reversal_convergence(const DiscreteSystem& system, const ProtocolSchedule& schedule,
                                   const std::vector<std::size_t>& steps, bool invert = true);

}  // namespace crib
