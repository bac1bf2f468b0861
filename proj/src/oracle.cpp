#include "crib/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "crib/error.hpp"
#include "crib/expm.hpp"

namespace crib {

namespace {

constexpr double kNormTolerance = 1e-10;

// Inverse CDF of the medium's continuum profile, tabulated by trapezoid rule.
class Quantiles {
 public:
  explicit Quantiles(const AtomicMedium& m) {
    double lo = -m.span, hi = m.span;
    if (m.profile == Profile::Custom && !m.custom_table.empty()) {
      lo = m.custom_table.front().first;
      hi = m.custom_table.back().first;
    }
    constexpr std::size_t n = 40001;
    const double h = (hi - lo) / static_cast<double>(n - 1);
    x_.resize(n);
    cdf_.resize(n);
    double prev = m.density(lo);
    x_[0] = lo;
    cdf_[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      x_[i] = lo + h * static_cast<double>(i);
      const double cur = m.density(x_[i]);
      cdf_[i] = cdf_[i - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "profile has no weight");
    for (double& c : cdf_) c /= total;
  }

  double operator()(double p) const {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
    if (it == cdf_.begin()) return x_.front();
    if (it == cdf_.end()) return x_.back();
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    const double span = cdf_[i] - cdf_[i - 1];
    const double f = span > 0.0 ? (p - cdf_[i - 1]) / span : 0.0;
    return x_[i - 1] + f * (x_[i] - x_[i - 1]);
  }

 private:
  std::vector<double> x_;
  std::vector<double> cdf_;
};

// Index stride close to the golden ratio and coprime to n, so neighbouring atoms
// get well separated quantiles.
std::size_t scramble_stride(std::size_t n) {
  if (n < 3) return 1;
  auto p = static_cast<std::size_t>(std::llround(0.6180339887498949 * static_cast<double>(n)));
  while (std::gcd(p, n) != 1) ++p;
  return p;
}

double mode_scale(double dkappa) { return std::sqrt(dkappa / (2.0 * kPi)); }

void apply_pulse(Eigen::Ref<Eigen::VectorXcd> atoms, int index, double xi, double t, double omega32,
                 const DiscreteSystem& sys) {
  const cplx i_unit(0.0, 1.0);
  if (index == 1) {
    atoms *= i_unit * std::polar(1.0, -(omega32 * t + xi));
    return;
  }
  const cplx base = i_unit * std::polar(1.0, omega32 * t + xi);
  for (Eigen::Index j = 0; j < atoms.size(); ++j)
    atoms[j] *= base * std::polar(1.0, sys.omega21_mismatch * sys.atom_positions[static_cast<std::size_t>(j)]);
}

// exp(-i dt H_I(t)) with H_I(t) = e^{i H0 t} V e^{-i H0 t}, H0 the diagonal of h.
Eigen::MatrixXcd interaction_step(const Eigen::MatrixXcd& h, double t, double dt) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXcd hi(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a == b) {
        hi(a, b) = 0.0;
        continue;
      }
      hi(a, b) = h(a, b) * std::polar(1.0, (h(a, a).real() - h(b, b).real()) * t);
    }
  }
  return expm(hi * cplx(0.0, -dt));
}

}  // namespace

Eigen::MatrixXcd DiscreteSystem::forward_hamiltonian(double sign) const {
  const std::size_t nm = n_modes(), na = n_atoms();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nm + na), static_cast<Eigen::Index>(nm + na));
  const double c = -coupling_atom * mode_scale(dkappa);
  for (std::size_t m = 0; m < nm; ++m) h(m, m) = modes[m];
  for (std::size_t j = 0; j < na; ++j) {
    const auto a = static_cast<Eigen::Index>(nm + j);
    h(a, a) = sign * atom_detunings[j];
    for (std::size_t m = 0; m < nm; ++m) {
      const cplx v = c * std::polar(1.0, modes[m] * atom_positions[j]);
      h(a, static_cast<Eigen::Index>(m)) = v;
      h(static_cast<Eigen::Index>(m), a) = std::conj(v);
    }
  }
  return h;
}

Eigen::MatrixXcd DiscreteSystem::backward_hamiltonian(double sign) const {
  const std::size_t nm = n_modes(), na = n_atoms();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nm + na), static_cast<Eigen::Index>(nm + na));
  const double c = -coupling_atom * mode_scale(dkappa);
  for (std::size_t m = 0; m < nm; ++m) h(m, m) = modes[m];
  for (std::size_t j = 0; j < na; ++j) {
    const auto a = static_cast<Eigen::Index>(nm + j);
    h(a, a) = sign * atom_detunings[j];
    for (std::size_t m = 0; m < nm; ++m) {
      const cplx v = c * std::polar(1.0, -modes[m] * atom_positions[j]);
      h(a, static_cast<Eigen::Index>(m)) = v;
      h(static_cast<Eigen::Index>(m), a) = std::conj(v);
    }
  }
  return h;
}

SampledEnvelope DiscreteSystem::backward_output(const TimeGrid& grid) const {
  const std::size_t nm = n_modes();
  const auto offset = static_cast<Eigen::Index>(nm + n_atoms());
  const double s = mode_scale(dkappa) * std::sqrt(input_energy);
  std::vector<cplx> out(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double z = grid.time(i) - t_state;
    cplx acc{};
    for (std::size_t m = 0; m < nm; ++m) acc += state[offset + static_cast<Eigen::Index>(m)] * std::polar(1.0, -modes[m] * z);
    out[i] = s * acc;
  }
  return SampledEnvelope(grid, std::move(out));
}

SampledEnvelope DiscreteSystem::forward_output(const TimeGrid& grid) const {
  const std::size_t nm = n_modes();
  const double s = mode_scale(dkappa) * std::sqrt(input_energy);
  std::vector<cplx> out(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double z = length + t_state - grid.time(i);
    cplx acc{};
    for (std::size_t m = 0; m < nm; ++m) acc += state[static_cast<Eigen::Index>(m)] * std::polar(1.0, modes[m] * z);
    out[i] = s * acc;
  }
  return SampledEnvelope(grid, std::move(out));
}

DiscreteSystem build_system(const AtomicMedium& medium, const SampledEnvelope& input,
                            const ProtocolSchedule& schedule, const OracleSpec& spec) {
  if (spec.atoms == 0 || spec.atoms > kOracleMaxAtoms)
    throw Error(ErrorKind::SizeLimit, "oracle atom count must be in [1, 400]");
  if (spec.max_modes > kOracleMaxModes) throw Error(ErrorKind::SizeLimit, "oracle mode count capped at 512");
  if (!(spec.delta_omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta_omega must be > 0");
  if (!(spec.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "oracle step must be > 0");
  if (input.size() < 2) throw Error(ErrorKind::InvalidArgument, "input envelope needs >= 2 samples");
  const double t0 = input.t_start();
  if (!(schedule.t1 > t0)) throw Error(ErrorKind::Schedule, "t1 must follow the input start");

  DiscreteSystem sys;
  sys.length = medium.length;
  sys.omega21_mismatch = medium.omega21_mismatch;
  sys.t_state = t0;
  sys.step = spec.step;
  const std::size_t n = spec.atoms;
  sys.coupling_atom = std::sqrt(medium.beta_cal / static_cast<double>(n));

  const Quantiles quantile(medium);
  sys.atom_positions.resize(n);
  sys.atom_detunings.resize(n);
  if (spec.sampling == DetuningSampling::Stratified) {
    const std::size_t stride = scramble_stride(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t q = (j * stride) % n;
      sys.atom_detunings[j] = quantile((static_cast<double>(q) + 0.5) / static_cast<double>(n));
    }
  } else {
    std::mt19937_64 rng(spec.seed);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      sys.atom_detunings[j] = quantile(u);
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    sys.atom_positions[j] = (static_cast<double>(j) + 0.5) * medium.length / static_cast<double>(n);

  const double box = spec.box_length > 0.0
                         ? spec.box_length
                         : (schedule.t1 - t0) + (input.grid().t_end() - t0) + medium.length + 10.0;
  sys.dkappa = 2.0 * kPi / box;
  const double kmax = 6.0 * spec.delta_omega + 3.0;
  const auto half = static_cast<std::size_t>(std::floor(kmax / sys.dkappa));
  const std::size_t nm = 2 * half + 1;
  if (nm > spec.max_modes)
    throw Error(ErrorKind::SizeLimit, "mode grid needs " + std::to_string(nm) + " modes (limit " +
                                          std::to_string(spec.max_modes) + "); shorten the schedule");
  sys.modes.resize(nm);
  for (std::size_t m = 0; m < nm; ++m)
    sys.modes[m] = (static_cast<double>(m) - static_cast<double>(half)) * sys.dkappa;

  // Field at t0 occupies z = t0 - t_n <= 0; project onto e^{i kappa z} modes.
  sys.state = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.dim()));
  const double s = mode_scale(sys.dkappa);
  double norm = 0.0;
  for (std::size_t m = 0; m < nm; ++m) {
    cplx acc{};
    for (std::size_t i = 0; i < input.size(); ++i)
      acc += input[i] * std::polar(1.0, -sys.modes[m] * (t0 - input.time(i)));
    sys.state[static_cast<Eigen::Index>(m)] = s * acc * input.dt();
    norm += std::norm(sys.state[static_cast<Eigen::Index>(m)]);
  }
  sys.input_energy = input.energy();
  if (!(norm > 0.0)) throw Error(ErrorKind::Degenerate, "input has no weight on the mode grid");
  sys.projection_loss = 1.0 - norm / sys.input_energy;
  sys.state /= std::sqrt(norm);
  return sys;
}

OracleResult evolve(const DiscreteSystem& system, const ProtocolSchedule& schedule, const TimeGrid& output,
                    double decoherence_rate, bool invert) {
  schedule.validate();
  if (decoherence_rate < 0.0) throw Error(ErrorKind::InvalidArgument, "negative decoherence rate");
  const double t0 = system.t_state;
  if (!(schedule.t1 > t0)) throw Error(ErrorKind::Schedule, "t1 must follow the initial time");
  const double t_end = std::max(output.t_end(), schedule.t2) + 1.0;
  const double box = 2.0 * kPi / system.dkappa;
  if (t_end - schedule.t2 + system.length > box)
    throw Error(ErrorKind::WindowOverflow, "output window longer than the quantisation box");

  OracleResult res;
  DiscreteSystem sys = system;
  const auto nm = static_cast<Eigen::Index>(sys.n_modes());
  const auto na = static_cast<Eigen::Index>(sys.n_atoms());
  const double step = sys.step;
  auto record = [&](const char* stage, double expected) {
    const double norm = sys.state.squaredNorm();
    res.norms.push_back({stage, norm, expected});
    res.max_norm_error = std::max(res.max_norm_error, std::abs(norm - expected));
  };

  // Forward stage: H constant on [t0, t1], applied as M identical steps.
  {
    const auto steps = static_cast<std::size_t>(std::ceil((schedule.t1 - t0) / step - 1e-9));
    const double dt = (schedule.t1 - t0) / static_cast<double>(steps);
    const Eigen::MatrixXcd u = expm(sys.forward_hamiltonian(1.0) * cplx(0.0, -dt));
    Eigen::VectorXcd v = sys.state.head(nm + na);
    for (std::size_t k = 0; k < steps; ++k) v = u * v;
    sys.state.head(nm + na) = v;
    sys.t_state = schedule.t1;
    record("absorb", 1.0);
  }
  {
    TimeGrid tg{t0 + sys.length, output.dt,
                static_cast<std::size_t>(std::floor((schedule.t1 - t0) / output.dt)) + 1};
    res.transmitted = sys.forward_output(tg);
  }

  apply_pulse(sys.state.segment(nm, na), 1, schedule.xi1, schedule.t1, schedule.omega32, sys);
  record("control-1", 1.0);
  const double decay = std::exp(-decoherence_rate * schedule.storage());
  const double before = sys.state.squaredNorm();
  const double atoms_before = sys.state.segment(nm, na).squaredNorm();
  sys.state.segment(nm, na) *= decay;
  record("store", before - atoms_before * (1.0 - decay * decay));
  const double after_store = sys.state.squaredNorm();
  apply_pulse(sys.state.segment(nm, na), 2, schedule.xi2, schedule.t2, schedule.omega32, sys);
  record("control-2", after_store);

  // Backward stage on [backward modes | atoms]; forward modes only pick up phases.
  {
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - schedule.t2) / step - 1e-9));
    const double dt = (t_end - schedule.t2) / static_cast<double>(steps);
    const Eigen::MatrixXcd u = expm(sys.backward_hamiltonian(invert ? -1.0 : 1.0) * cplx(0.0, -dt));
    Eigen::VectorXcd v(nm + na);
    v.head(nm) = sys.state.tail(nm);
    v.tail(na) = sys.state.segment(nm, na);
    for (std::size_t k = 0; k < steps; ++k) v = u * v;
    sys.state.tail(nm) = v.head(nm);
    sys.state.segment(nm, na) = v.tail(na);
    for (Eigen::Index m = 0; m < nm; ++m)
      sys.state[m] *= std::polar(1.0, -sys.modes[static_cast<std::size_t>(m)] * (t_end - schedule.t1));
    sys.t_state = t_end;
    record("retrieve", after_store);
  }

  res.echo = sys.backward_output(output);
  res.efficiency = sys.input_energy > 0.0 ? res.echo.energy() / sys.input_energy : 0.0;
  res.final_system = std::move(sys);
  if (res.max_norm_error > kNormTolerance)
    throw Error(ErrorKind::Degenerate, "oracle lost unitarity: norm error " + std::to_string(res.max_norm_error));
  return res;
}

ReversalReport verify_reversal_identity(const DiscreteSystem& system, const ProtocolSchedule& schedule,
                                        std::size_t steps, bool invert) {
  if (steps == 0) throw Error(ErrorKind::InvalidArgument, "need at least one step");
  const double t0 = system.t_state;
  if (!(schedule.t1 > t0 && schedule.t2 > schedule.t1))
    throw Error(ErrorKind::Schedule, "need t0 < t1 < t2");
  ReversalReport rep;
  rep.steps = steps;
  rep.step = (schedule.t1 - t0) / static_cast<double>(steps);
  rep.mirrored = std::abs(schedule.t2 - (2.0 * schedule.t_inv - schedule.t1)) <= 1e-9 * std::max(1.0, std::abs(schedule.t2));

  const std::size_t nm = system.n_modes(), na = system.n_atoms();
  const auto nmi = static_cast<Eigen::Index>(nm), nai = static_cast<Eigen::Index>(na);
  const Eigen::MatrixXcd hf = system.forward_hamiltonian(1.0);
  const double backward_sign = invert ? -1.0 : 1.0;
  const Eigen::MatrixXcd hb = system.backward_hamiltonian(backward_sign);

  // Interaction-picture input at t0.
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(nmi + nai);
  for (std::size_t m = 0; m < nm; ++m)
    psi0[static_cast<Eigen::Index>(m)] = system.state[static_cast<Eigen::Index>(m)] * std::polar(1.0, system.modes[m] * t0);

  Eigen::VectorXcd psi = psi0;
  for (std::size_t k = 0; k < steps; ++k)
    psi = interaction_step(hf, t0 + static_cast<double>(k) * rep.step, rep.step) * psi;

  // Physical control pulses act on the atoms in the Schroedinger picture.
  DiscreteSystem scratch = system;
  Eigen::VectorXcd atoms = psi.tail(nai);
  for (std::size_t j = 0; j < na; ++j)
    atoms[static_cast<Eigen::Index>(j)] *= std::polar(1.0, -system.atom_detunings[j] * schedule.t1);
  apply_pulse(atoms, 1, schedule.xi1, schedule.t1, schedule.omega32, scratch);
  apply_pulse(atoms, 2, schedule.xi2, schedule.t2, schedule.omega32, scratch);
  for (std::size_t j = 0; j < na; ++j)
    atoms[static_cast<Eigen::Index>(j)] *= std::polar(1.0, backward_sign * system.atom_detunings[j] * schedule.t2);

  // Ideal reversal about t_inv on the mode part: kappa -> -kappa with phase.
  const double chi = schedule.chi12();
  auto reverse_modes = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(nmi + nai);
    for (std::size_t m = 0; m < nm; ++m)
      out[static_cast<Eigen::Index>(nm - 1 - m)] =
          std::polar(1.0, -chi - system.modes[m] * 2.0 * schedule.t_inv) * v[static_cast<Eigen::Index>(m)];
    return out;
  };
  Eigen::VectorXcd phi = reverse_modes(psi);
  phi.tail(nai) = atoms;
  for (std::size_t k = 0; k < steps; ++k)
    phi = interaction_step(hb, schedule.t2 + static_cast<double>(k) * rep.step, rep.step) * phi;

  rep.deviation = (phi - reverse_modes(psi0)).norm();
  return rep;
}

ReversalStudy reversal_convergence(const DiscreteSystem& system, const ProtocolSchedule& schedule,
                                   const std::vector<std::size_t>& steps, bool invert) {
  ReversalStudy study;
  for (std::size_t m : steps) study.runs.push_back(verify_reversal_identity(system, schedule, m, invert));
  for (std::size_t k = 1; k < study.runs.size(); ++k) {
    const double ratio = study.runs[k - 1].deviation / study.runs[k].deviation;
    const double refine = static_cast<double>(study.runs[k].steps) / static_cast<double>(study.runs[k - 1].steps);
    study.orders.push_back(std::log(ratio) / std::log(refine));
  }
  return study;
}

}  // namespace crib
