#include "crib/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crib/error.hpp"
#include "crib/simd/kernels.hpp"

namespace crib {

TimeGrid TimeGrid::covering(double from, double to, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (!(to >= from)) throw Error(ErrorKind::InvalidArgument, "empty time range");
  const auto n = static_cast<std::size_t>(std::ceil((to - from) / dt - 1e-9)) + 1;
  return TimeGrid{from, dt, n};
}

SampledEnvelope::SampledEnvelope(TimeGrid grid, std::vector<cplx> samples, double carrier_phase_ref)
    : grid_(grid), samples_(std::move(samples)), carrier_phase_ref_(carrier_phase_ref) {
  if (!(grid_.dt > 0.0) || !std::isfinite(grid_.dt) || !std::isfinite(grid_.t_start))
    throw Error(ErrorKind::InvalidArgument, "envelope grid needs finite t_start and dt > 0");
  grid_.size = samples_.size();
  for (const cplx& a : samples_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw Error(ErrorKind::InvalidArgument, "envelope sample is not finite");
  }
}

SampledEnvelope SampledEnvelope::zeros(const TimeGrid& grid) {
  return SampledEnvelope(grid, std::vector<cplx>(grid.size));
}

double SampledEnvelope::energy() const noexcept {
  return simd::kernels().norm2(samples_.data(), samples_.size()) * grid_.dt;
}

cplx SampledEnvelope::at(double t) const noexcept {
  if (samples_.empty()) return {};
  const double x = (t - grid_.t_start) / grid_.dt;
  if (x < -1e-9 || x > static_cast<double>(samples_.size() - 1) + 1e-9) return {};
  const double fl = std::floor(x);
  auto i = static_cast<std::ptrdiff_t>(fl);
  const double frac = x - fl;
  if (i < 0) return samples_.front();
  if (static_cast<std::size_t>(i) >= samples_.size() - 1) return samples_.back();
  return samples_[i] * (1.0 - frac) + samples_[i + 1] * frac;
}

SampledEnvelope SampledEnvelope::scaled(cplx factor) const {
  std::vector<cplx> out(samples_);
  for (cplx& a : out) a *= factor;
  return SampledEnvelope(grid_, std::move(out), carrier_phase_ref_);
}

SampledEnvelope SampledEnvelope::with_carrier_phase(double phase) const {
  return SampledEnvelope(grid_, samples_, phase);
}

namespace {

std::vector<cplx> gaussian_samples(const TimeGrid& grid, double delta_omega, double t_center) {
  std::vector<cplx> out(grid.size);
  double norm = 0.0;
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double x = (grid.time(i) - t_center) * delta_omega;
    const double v = std::exp(-0.5 * x * x);
    out[i] = v;
    norm += v * v;
  }
  norm = std::sqrt(norm * grid.dt);
  if (norm > 0.0)
    for (cplx& a : out) a /= norm;
  return out;
}

void require_support(const TimeGrid& grid, double delta_omega, double t_center) {
  if (!(delta_omega > 0.0) || !std::isfinite(delta_omega))
    throw Error(ErrorKind::InvalidArgument, "delta_omega must be > 0");
  if (grid.size < 2) throw Error(ErrorKind::GridTooNarrow, "grid has fewer than two samples");
  const double half = 3.0 / delta_omega;
  const double tol = 1e-9 * std::max(1.0, std::abs(t_center));
  if (t_center - half < grid.t_start - tol || t_center + half > grid.t_end() + tol)
    throw Error(ErrorKind::GridTooNarrow, "grid does not hold 6 standard deviations around t=" +
                                              std::to_string(t_center));
}

}  // namespace

SampledEnvelope make_gaussian(const TimeGrid& grid, double delta_omega, double t_center,
                              double phase, double amplitude) {
  require_support(grid, delta_omega, t_center);
  std::vector<cplx> s = gaussian_samples(grid, delta_omega, t_center);
  const cplx factor = amplitude * std::polar(1.0, phase);
  for (cplx& a : s) a *= factor;
  return SampledEnvelope(grid, std::move(s));
}

SampledEnvelope make_double_packet(const TimeGrid& grid, const DoublePacketSpec& spec,
                                   std::vector<std::string>* warnings) {
  if (!(spec.tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be > 0");
  if (std::norm(spec.alpha) + std::norm(spec.beta) > 1.0 + 1e-12)
    throw Error(ErrorKind::InvalidArgument, "|alpha|^2 + |beta|^2 exceeds 1");
  require_support(grid, spec.delta_omega, spec.t_center);
  require_support(grid, spec.delta_omega, spec.t_center + spec.tau);
  if (warnings && spec.tau * spec.delta_omega < spec.separation_threshold) {
    warnings->push_back("packets overlap: tau*delta_omega = " +
                        std::to_string(spec.tau * spec.delta_omega) + " < " +
                        std::to_string(spec.separation_threshold));
  }
  const auto first = gaussian_samples(grid, spec.delta_omega, spec.t_center);
  const auto second = gaussian_samples(grid, spec.delta_omega, spec.t_center + spec.tau);
  const cplx a = spec.alpha * std::polar(1.0, spec.phi1);
  const cplx b = spec.beta * std::polar(1.0, spec.phi2);
  std::vector<cplx> out(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) out[i] = a * first[i] + b * second[i];
  return SampledEnvelope(grid, std::move(out));
}

SampledEnvelope time_reverse(const SampledEnvelope& env, double pivot) {
  std::vector<cplx> out(env.samples().rbegin(), env.samples().rend());
  TimeGrid grid = env.grid();
  grid.t_start = 2.0 * pivot - env.grid().t_end();
  return SampledEnvelope(grid, std::move(out), env.carrier_phase_ref());
}

namespace {

double kaiser(double x, double beta) {
  if (std::abs(x) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) / std::cyl_bessel_i(0.0, beta);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

SampledEnvelope resample(const SampledEnvelope& env, const TimeGrid& target, int taps) {
  if (taps < 2) throw Error(ErrorKind::InvalidArgument, "resampling needs at least 2 taps");
  constexpr double kBeta = 8.6;
  const double cutoff = std::min(1.0, env.dt() / target.dt);
  const double half = 0.5 * taps / cutoff;
  std::vector<cplx> out(target.size);
  const auto n = static_cast<std::ptrdiff_t>(env.size());
  for (std::size_t i = 0; i < target.size; ++i) {
    const double x = (target.time(i) - env.t_start()) / env.dt();
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(x - half)));
    const auto hi = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(std::floor(x + half)));
    cplx acc{};
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double u = x - static_cast<double>(j);
      acc += env[static_cast<std::size_t>(j)] * (cutoff * sinc(cutoff * u) * kaiser(u / half, kBeta));
    }
    out[i] = acc;
  }
  return SampledEnvelope(target, std::move(out), env.carrier_phase_ref());
}

bool commensurate(const TimeGrid& a, const TimeGrid& b) noexcept {
  if (std::abs(a.dt - b.dt) > 1e-12 * a.dt) return false;
  const double offset = (b.t_start - a.t_start) / a.dt;
  return std::abs(offset - std::round(offset)) < 1e-6;
}

namespace {

std::ptrdiff_t lattice_offset(const TimeGrid& a, const TimeGrid& b) {
  return static_cast<std::ptrdiff_t>(std::llround((b.t_start - a.t_start) / a.dt));
}

}  // namespace

cplx overlap(const SampledEnvelope& a, const SampledEnvelope& b) {
  if (!commensurate(a.grid(), b.grid())) {
    const SampledEnvelope b_on_a = resample(b, a.grid());
    return overlap(a, b_on_a);
  }
  // b[j] sits at a-index j + off.
  const std::ptrdiff_t off = lattice_offset(a.grid(), b.grid());
  const auto na = static_cast<std::ptrdiff_t>(a.size());
  const auto nb = static_cast<std::ptrdiff_t>(b.size());
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, off);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(na, off + nb);
  if (hi <= lo) return {};
  const cplx sum = simd::kernels().dot_conj(a.samples().data() + lo, b.samples().data() + (lo - off),
                                            static_cast<std::size_t>(hi - lo));
  return sum * a.dt();
}

double fidelity(const SampledEnvelope& a, const SampledEnvelope& b) {
  const double ea = a.energy();
  const double eb = b.energy();
  if (!(ea > 0.0) || !(eb > 0.0)) throw Error(ErrorKind::Degenerate, "fidelity of a zero-energy envelope");
  const double f = std::norm(overlap(a, b)) / (ea * eb);
  return std::min(1.0, f);
}

SampledEnvelope on_grid(const SampledEnvelope& env, const TimeGrid& grid) {
  if (!commensurate(grid, env.grid())) return resample(env, grid);
  const std::ptrdiff_t off = lattice_offset(grid, env.grid());
  std::vector<cplx> out(grid.size);
  for (std::size_t j = 0; j < env.size(); ++j) {
    const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(j) + off;
    if (i >= 0 && i < static_cast<std::ptrdiff_t>(grid.size)) out[static_cast<std::size_t>(i)] = env[j];
  }
  return SampledEnvelope(grid, std::move(out), env.carrier_phase_ref());
}

SampledEnvelope add(const SampledEnvelope& a, const SampledEnvelope& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  const double dt = a.dt();
  const double lo_b = a.t_start() + dt * std::floor((b.t_start() - a.t_start()) / dt + 1e-9);
  const double from = std::min(a.t_start(), lo_b);
  const double to = std::max(a.grid().t_end(), b.grid().t_end());
  const TimeGrid grid = TimeGrid::covering(from, to, dt);
  const SampledEnvelope pa = on_grid(a, grid);
  const SampledEnvelope pb = on_grid(b, grid);
  std::vector<cplx> out(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) out[i] = pa[i] + pb[i];
  return SampledEnvelope(grid, std::move(out), a.carrier_phase_ref());
}

SampledEnvelope shifted(const SampledEnvelope& env, double delay) {
  TimeGrid grid = env.grid();
  grid.t_start += delay;
  return SampledEnvelope(grid, std::vector<cplx>(env.samples().begin(), env.samples().end()),
                         env.carrier_phase_ref());
}

double energy_between(const SampledEnvelope& env, double from, double to) {
  double acc = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double t = env.time(i);
    if (t >= from && t <= to) acc += std::norm(env[i]);
  }
  return acc * env.dt();
}

}  // namespace crib
