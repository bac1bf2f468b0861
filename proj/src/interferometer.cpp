#include "crib/interferometer.hpp"

#include <algorithm>
#include <cmath>

#include "crib/error.hpp"

namespace crib {

namespace {

constexpr double kOverflowTolerance = 1e-10;

SampledEnvelope combine(cplx a, const SampledEnvelope& x, cplx b, const SampledEnvelope& y) {
  std::vector<cplx> s(x.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a * x[i] + b * y[i];
  return SampledEnvelope(x.grid(), std::move(s), x.carrier_phase_ref());
}

SampledEnvelope padded(const SampledEnvelope& env, double extra) {
  return on_grid(env, TimeGrid::covering(env.t_start(), env.grid().t_end() + extra, env.dt()));
}

double centroid(const SampledEnvelope& env, double* rms) {
  double e = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double p = std::norm(env[i]);
    const double t = env.time(i);
    e += p;
    m1 += p * t;
    m2 += p * t * t;
  }
  if (!(e > 0.0)) throw Error(ErrorKind::Degenerate, "empty pulse");
  const double mean = m1 / e;
  if (rms) *rms = std::sqrt(std::max(0.0, m2 / e - mean * mean));
  return mean;
}

SampledEnvelope window(const SampledEnvelope& env, double from, double to) {
  const double dt = env.dt();
  const double t0 = env.t_start();
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((from - t0) / dt - 1e-9)));
  const auto hi_raw = std::ceil((to - t0) / dt - 1e-9);
  const auto hi = static_cast<std::size_t>(std::clamp(hi_raw, 0.0, static_cast<double>(env.size())));
  if (hi <= lo) return SampledEnvelope::zeros(TimeGrid{t0 + static_cast<double>(lo) * dt, dt, 1});
  std::vector<cplx> s(env.samples().begin() + static_cast<std::ptrdiff_t>(lo),
                      env.samples().begin() + static_cast<std::ptrdiff_t>(hi));
  return SampledEnvelope(TimeGrid{env.time(lo), dt, s.size()}, std::move(s), env.carrier_phase_ref());
}

double spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return mean > 0.0 ? (*hi - *lo) / mean : 0.0;
}

}  // namespace

MzConfig MzConfig::from_carrier(double delta_L, double omega0, double coupler_ratio) {
  MzConfig mz;
  mz.delta_L = delta_L;
  mz.alpha = std::remainder(omega0 * delta_L, 2.0 * kPi);
  mz.coupler_ratio = coupler_ratio;
  return mz;
}

void MzConfig::validate() const {
  if (!(coupler_ratio > 0.0 && coupler_ratio < 1.0))
    throw Error(ErrorKind::InvalidArgument, "coupler ratio must lie in (0, 1)");
  if (!(delta_L >= 0.0) || !std::isfinite(delta_L)) throw Error(ErrorKind::InvalidArgument, "delta_L must be >= 0");
  if (!std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be finite");
}

MzOutput mz_pass(const SampledEnvelope& env, const MzConfig& mz, Direction, int input_port, ArmMask arms,
                 int followed_port) {
  mz.validate();
  if ((input_port != 0 && input_port != 1) || (followed_port != 0 && followed_port != 1))
    throw Error(ErrorKind::InvalidArgument, "ports are 0 or 1");
  const double t = std::sqrt(mz.coupler_ratio);
  const double r = std::sqrt(1.0 - mz.coupler_ratio);
  const cplx bar(t, 0.0), cross(0.0, r);

  const double e = env.energy();
  const SampledEnvelope delayed = on_grid(shifted(env, mz.delta_L), env.grid());
  if (arms.long_arm && e - delayed.energy() > kOverflowTolerance * std::max(e, 1e-300))
    throw Error(ErrorKind::WindowOverflow, "delayed copy leaves the grid; pad by delta_L");

  const cplx to_short = input_port == 0 ? bar : cross;
  const cplx to_long = input_port == 0 ? cross : bar;
  cplx s = to_short, l = to_long * std::polar(1.0, mz.alpha);

  MzOutput out;
  if (!arms.short_arm) {
    out.blocked_energy += std::norm(s) * e;
    s = 0.0;
  }
  if (!arms.long_arm) {
    out.blocked_energy += std::norm(l) * delayed.energy();
    l = 0.0;
  }
  out.ports[0] = combine(bar * s, env, cross * l, delayed);
  out.ports[1] = combine(cross * s, env, bar * l, delayed);
  out.unused_energy = out.ports[static_cast<std::size_t>(1 - followed_port)].energy();
  return out;
}

DoublePassResult double_pass(const SampledEnvelope& pulse, const MzConfig& mz, const MemoryBackend& memory,
                             const DoublePassOptions& options) {
  mz.validate();
  double rms = 0.0;
  const double t_mean = centroid(pulse, &rms);
  if (mz.delta_L < options.premise_ratio * rms)
    throw Error(ErrorKind::Premise, "pulse too wide for the interferometer: rms duration " + std::to_string(rms) +
                                        " needs delta_L >= " + std::to_string(options.premise_ratio * rms));

  DoublePassResult res;
  res.input_energy = pulse.energy();
  const MzOutput first = mz_pass(padded(pulse, mz.delta_L), mz, Direction::LeftToRight, 0, options.first_pass, 1);
  const MemoryOutput mem = apply_memory(memory, first.ports[1]);
  const MzOutput second =
      mz_pass(padded(mem.envelope, mz.delta_L), mz, Direction::RightToLeft, 1, options.second_pass, 0);
  res.output = second.ports[0];
  res.memory_efficiency = mem.efficiency;
  res.unused_energy = first.unused_energy + first.blocked_energy +
                      (first.ports[1].energy() - mem.envelope.energy()) + second.unused_energy +
                      second.blocked_energy;

  auto map = [&](double t) {
    if (memory.kind == BackendKind::Delay) return t + memory.delay;
    return mem.schedule.t1 + mem.schedule.t2 - t;
  };
  std::array<double, 4> arrivals = {map(t_mean), map(t_mean) + mz.delta_L, map(t_mean + mz.delta_L),
                                    map(t_mean + mz.delta_L) + mz.delta_L};
  std::sort(arrivals.begin(), arrivals.end());
  const double c = 0.5 * (arrivals[1] + arrivals[2]);
  const double h = 0.5 * mz.delta_L;
  res.central_time = c;
  res.early = window(res.output, c - 3.0 * h, c - h);
  res.central = window(res.output, c - h, c + h);
  res.late = window(res.output, c + h, c + 3.0 * h);
  res.i_early = res.early.energy();
  res.i_central = res.central.energy();
  res.i_late = res.late.energy();
  res.stray_energy = std::max(0.0, res.output.energy() - res.i_early - res.i_central - res.i_late);
  return res;
}

std::vector<FringeRow> fringe_sweep(const SampledEnvelope& pulse, const MzConfig& mz, const MemoryBackend& memory,
                                    double alpha_from, double alpha_to, std::size_t n,
                                    const DoublePassOptions& options) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "fringe sweep needs n >= 1");
  std::vector<FringeRow> rows(n);
  for (std::size_t k = 0; k < n; ++k) {
    MzConfig m = mz;
    m.alpha = n == 1 ? alpha_from
                     : alpha_from + (alpha_to - alpha_from) * static_cast<double>(k) / static_cast<double>(n - 1);
    const DoublePassResult r = double_pass(pulse, m, memory, options);
    rows[k] = {m.alpha, r.i_early, r.i_central, r.i_late};
  }
  return rows;
}

FringeAnalysis analyze_fringe(const std::vector<FringeRow>& rows) {
  FringeAnalysis a;
  if (rows.empty()) return a;
  std::vector<double> c, e, l;
  for (const auto& r : rows) {
    c.push_back(r.i_central);
    e.push_back(r.i_early);
    l.push_back(r.i_late);
  }
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  a.visibility = (*hi + *lo) > 0.0 ? (*hi - *lo) / (*hi + *lo) : 0.0;
  a.central_spread = spread(c);
  a.early_spread = spread(e);
  a.late_spread = spread(l);

  // Drop a closing sample that repeats the first one a full turn later.
  std::size_t n = rows.size();
  if (n > 2 && std::abs(rows.back().alpha - rows.front().alpha - 2.0 * kPi) < 1e-9) --n;
  if (n < 4) return a;
  const double turn = rows[n - 1].alpha - rows.front().alpha + (rows[1].alpha - rows[0].alpha);
  if (std::abs(turn - 2.0 * kPi) > 1e-6) return a;
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += c[k];
  mean /= static_cast<double>(n);
  double best = 0.0;
  std::size_t harmonic = 0;
  for (std::size_t h = 1; h <= n / 2; ++h) {
    cplx acc{};
    for (std::size_t k = 0; k < n; ++k) acc += (c[k] - mean) * std::polar(1.0, -static_cast<double>(h) * rows[k].alpha);
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      harmonic = h;
    }
  }
  if (harmonic > 0 && best > 1e-9 * mean * static_cast<double>(n)) a.period = 2.0 * kPi / static_cast<double>(harmonic);
  return a;
}

}  // namespace crib
