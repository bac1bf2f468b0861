#pragma once

#include <array>
#include <vector>

#include "crib/envelope.hpp"
#include "crib/memory_backend.hpp"

namespace crib {

/// Imbalanced Mach-Zehnder built from two identical couplers
/// [[sqrt(T), i sqrt(R)], [i sqrt(R), sqrt(T)]] with T = coupler_ratio, R = 1 - T.
/// The long arm delays by delta_L (c = 1) and adds the carrier phase alpha.
struct MzConfig {
  double delta_L = 20.0;
  double alpha = 0.0;
  double coupler_ratio = 0.5;

  /// alpha = omega0 * delta_L for a carrier of angular frequency omega0.
  static MzConfig from_carrier(double delta_L, double omega0, double coupler_ratio = 0.5);
  void validate() const;
};

enum class Direction { LeftToRight, RightToLeft };

/// Which arms transmit on each pass; blocked arms absorb their share.
struct ArmMask {
  bool short_arm = true;
  bool long_arm = true;
};

struct MzOutput {
  std::array<SampledEnvelope, 2> ports;
  /// Energy leaving through the port that is not followed further.
  double unused_energy = 0.0;
  /// Energy absorbed by blocked arms.
  double blocked_energy = 0.0;
};

/// One pass entering at `input_port`; both output ports are returned on the
/// input grid. The transfer matrix is symmetric, so the direction only names
/// the sides. Throws WindowOverflow if the delayed copy leaves the grid.
MzOutput mz_pass(const SampledEnvelope& env, const MzConfig& mz, Direction direction, int input_port = 0,
                 ArmMask arms = {}, int followed_port = 1);

struct DoublePassOptions {
  ArmMask first_pass;
  ArmMask second_pass;
  /// Require delta_L >= premise_ratio * rms duration of |pulse|^2.
  double premise_ratio = 8.0;
};

struct DoublePassResult {
  /// Field returning to the source port after the second pass.
  SampledEnvelope output;
  SampledEnvelope early;
  SampledEnvelope central;
  SampledEnvelope late;
  double i_early = 0.0;
  double i_central = 0.0;
  double i_late = 0.0;
  /// Centre of the central window in lab time.
  double central_time = 0.0;
  double input_energy = 0.0;
  /// Energy in all other ports and blocked arms, plus memory loss.
  double unused_energy = 0.0;
  double memory_efficiency = 1.0;
  /// Energy of the returned field outside the three windows.
  double stray_energy = 0.0;
};

/// Pulse through the interferometer into the memory at output port 1 and back
/// through the same interferometer to input port 0.
DoublePassResult double_pass(const SampledEnvelope& pulse, const MzConfig& mz, const MemoryBackend& memory,
                             const DoublePassOptions& options = {});

struct FringeRow {
  double alpha = 0.0;
  double i_early = 0.0;
  double i_central = 0.0;
  double i_late = 0.0;
};

std::vector<FringeRow> fringe_sweep(const SampledEnvelope& pulse, const MzConfig& mz, const MemoryBackend& memory,
                                    double alpha_from, double alpha_to, std::size_t n,
                                    const DoublePassOptions& options = {});

struct FringeAnalysis {
  double visibility = 0.0;
  /// 2 pi / dominant harmonic of I_central over a uniform sweep of one full turn.
  double period = 0.0;
  /// Relative spread of I_central (zero for an alpha-independent pulse).
  double central_spread = 0.0;
  double early_spread = 0.0;
  double late_spread = 0.0;
};

/// Needs a uniform sweep covering [a, a + 2 pi) for the period estimate.
FringeAnalysis analyze_fringe(const std::vector<FringeRow>& rows);

}  // namespace crib
