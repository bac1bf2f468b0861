#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace crib {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Uniform time grid. Times are in units of the inverse inhomogeneous width.
struct TimeGrid {
  double t_start = 0.0;
  double dt = 0.1;
  std::size_t size = 0;

  double time(std::size_t i) const noexcept { return t_start + dt * static_cast<double>(i); }
  double t_end() const noexcept { return size ? time(size - 1) : t_start; }

  /// Grid covering [from, to] (inclusive, rounded outward) with step dt.
  static TimeGrid covering(double from, double to, double dt);
};

/// Slowly varying complex field envelope sampled on a uniform grid.
///
/// Energy is sum |a_i|^2 * dt in excitation-number units. The optical carrier
/// is never sampled; its accumulated phase rides along as metadata.
class SampledEnvelope {
 public:
  SampledEnvelope() = default;
  SampledEnvelope(TimeGrid grid, std::vector<cplx> samples, double carrier_phase_ref = 0.0);

  static SampledEnvelope zeros(const TimeGrid& grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  double t_start() const noexcept { return grid_.t_start; }
  double dt() const noexcept { return grid_.dt; }
  std::size_t size() const noexcept { return samples_.size(); }
  double time(std::size_t i) const noexcept { return grid_.time(i); }

  std::span<const cplx> samples() const noexcept { return samples_; }
  const cplx& operator[](std::size_t i) const noexcept { return samples_[i]; }

  double carrier_phase_ref() const noexcept { return carrier_phase_ref_; }

  double energy() const noexcept;

  /// Value at an arbitrary time by linear interpolation, zero outside the grid.
  cplx at(double t) const noexcept;

  SampledEnvelope scaled(cplx factor) const;
  SampledEnvelope with_carrier_phase(double phase) const;

 private:
  TimeGrid grid_{};
  std::vector<cplx> samples_;
  double carrier_phase_ref_ = 0.0;
};

/// Gaussian packet amplitude * exp(-0.5 ((t - t_center) delta_omega)^2) * exp(i phase),
/// normalised on the grid so that energy == amplitude^2. The grid must contain
/// t_center +- 3/delta_omega.
SampledEnvelope make_gaussian(const TimeGrid& grid, double delta_omega, double t_center,
                              double phase, double amplitude);

struct DoublePacketSpec {
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  double tau = 10.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double delta_omega = 1.0;
  double t_center = 0.0;
  /// Warn when tau * delta_omega falls below this separation.
  double separation_threshold = 6.0;
};

/// Two Gaussian packets: alpha e^{i phi1} g(t - t_c) + beta e^{i phi2} g(t - t_c - tau).
/// Each packet is unit-normalised before weighting; overlap warnings are appended to
/// `warnings` when given.
SampledEnvelope make_double_packet(const TimeGrid& grid, const DoublePacketSpec& spec,
                                   std::vector<std::string>* warnings = nullptr);

/// Maps the sample at time t to 2*pivot - t. The grid itself is mirrored, so the
/// operation is exact for any pivot. Carrier phase metadata is kept.
SampledEnvelope time_reverse(const SampledEnvelope& env, double pivot);

/// Band-limited resampling with a Kaiser-windowed sinc kernel of `taps` taps.
SampledEnvelope resample(const SampledEnvelope& env, const TimeGrid& target, int taps = 16);

/// True when b's samples sit on a's lattice (same dt, integer offset).
bool commensurate(const TimeGrid& a, const TimeGrid& b) noexcept;

/// sum conj(a_i) b_i dt. Incommensurate grids are reconciled by resampling b onto a's lattice.
cplx overlap(const SampledEnvelope& a, const SampledEnvelope& b);

/// |overlap|^2 / (E_a E_b). Throws Degenerate on zero-energy input.
double fidelity(const SampledEnvelope& a, const SampledEnvelope& b);

/// Pointwise sum on a's grid lattice, extended to cover both supports.
SampledEnvelope add(const SampledEnvelope& a, const SampledEnvelope& b);

/// Delays the envelope by `delay` without touching the sample values.
SampledEnvelope shifted(const SampledEnvelope& env, double delay);

/// Restricts or zero-pads to the given grid; incommensurate grids are resampled.
SampledEnvelope on_grid(const SampledEnvelope& env, const TimeGrid& grid);

/// Energy in [from, to].
double energy_between(const SampledEnvelope& env, double from, double to);

// CSV with header "t,re,im".
void write_csv(const SampledEnvelope& env, const std::filesystem::path& path);
void write_csv(const SampledEnvelope& env, std::ostream& out);
SampledEnvelope read_csv(const std::filesystem::path& path);

}  // namespace crib
