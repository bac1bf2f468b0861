#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace crib {

enum class Profile { Gaussian, Lorentzian, Custom };

Profile parse_profile(const std::string& name);
const char* to_string(Profile profile) noexcept;

struct MediumSpec {
  Profile profile = Profile::Gaussian;
  double optical_depth = 0.0;
  /// Spatial grid points; the solver works on nz - 1 cells.
  std::size_t nz = 129;
  std::size_t n_detunings = 257;
  /// Detuning half-width in units of the inhomogeneous width.
  double span = 6.0;
  /// Medium length in units where c = 1. Only shifts the exit time.
  double length = 1.0;
  /// Residual spin-splitting phase rate; the second control pulse imprints exp(i * mismatch * z).
  double omega21_mismatch = 0.0;
  /// (detuning, density) pairs for Profile::Custom, ascending detuning.
  std::vector<std::pair<double, double>> custom_table;
};

/// Discretised inhomogeneously broadened ensemble.
///
/// Gaussian profiles have unit standard deviation, Lorentzian profiles unit
/// half width. Quadrature weights sum to one. The collective coupling is
/// calibrated so that a narrowband resonant probe leaves with intensity
/// exp(-d): beta_cal = d / (2 pi G(0)), coupling = sqrt(beta_cal / L).
struct AtomicMedium {
  Profile profile = Profile::Gaussian;
  double optical_depth = 0.0;
  double length = 1.0;
  std::size_t nz = 2;
  std::vector<double> detunings;
  std::vector<double> weights;
  /// Density of the (truncated, normalised) profile at zero detuning.
  double density_at_zero = 0.0;
  double beta_cal = 0.0;
  double omega21_mismatch = 0.0;
  bool inverted = false;
  double span = 0.0;
  /// Divides the raw profile so that the quadrature weights sum to one.
  double profile_norm = 1.0;
  std::vector<std::pair<double, double>> custom_table;

  std::size_t cells() const noexcept { return nz - 1; }
  std::size_t n_detunings() const noexcept { return detunings.size(); }
  double dz() const noexcept { return length / static_cast<double>(cells()); }
  double cell_center(std::size_t c) const noexcept { return (static_cast<double>(c) + 0.5) * dz(); }
  double coupling() const noexcept;
  double max_abs_detuning() const noexcept;

  /// Continuum profile density G(delta) of the un-inverted medium, zero outside the span.
  double density(double delta) const noexcept;

  /// Resonant optical depth seen by a spectral component at envelope frequency omega.
  double depth_at(double omega) const noexcept;
};

AtomicMedium build_medium(const MediumSpec& spec);

/// Every node delta_k -> -delta_k, weights stay with their node, flag toggled.
AtomicMedium invert_detunings(const AtomicMedium& medium);

enum class Transition { Sigma13, Sigma12 };

/// Single-excitation coherence amplitudes per (cell, detuning node).
///
/// Amplitudes are normalised so that sum_{c,k} w_k |s_ck|^2 dz is the stored
/// excitation number. On the optical transition each cell's amplitude refers to
/// the lab time frame_origin + frame_slope * z_c, where z_c is the cell centre.
struct CoherenceField {
  Transition active = Transition::Sigma13;
  std::size_t cells = 0;
  std::size_t n_detunings = 0;
  double dz = 0.0;
  std::vector<double> re;
  std::vector<double> im;
  double stored_phase = 0.0;
  double frame_origin = 0.0;
  double frame_slope = 0.0;

  static CoherenceField zeros(const AtomicMedium& medium, double frame_origin = 0.0,
                              double frame_slope = 0.0);

  double lab_time(std::size_t cell) const noexcept {
    return frame_origin + frame_slope * (static_cast<double>(cell) + 0.5) * dz;
  }

  double excitation_norm(const std::vector<double>& weights) const;
};

}  // namespace crib
