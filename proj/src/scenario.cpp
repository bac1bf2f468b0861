#include "crib/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "crib/error.hpp"
#include "crib/ideal_map.hpp"
#include "crib/interferometer.hpp"
#include "crib/medium.hpp"
#include "crib/memory_backend.hpp"
#include "crib/oracle.hpp"
#include "crib/simd/kernels.hpp"
#include "crib/solver.hpp"
#include "crib/timebin.hpp"

namespace crib {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Schema helpers

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Schema, where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  require_object(j, where);
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) schema_error(where, "unknown key '" + key + "'");
}

double get_number(const json& j, const std::string& key, const std::string& where, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) schema_error(where + "." + key, "expected a number");
  return j[key].get<double>();
}

std::optional<double> get_optional_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return get_number(j, key, where, 0.0);
}

std::size_t get_count(const json& j, const std::string& key, const std::string& where, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
    schema_error(where + "." + key, "expected a non-negative integer");
  return j[key].get<std::size_t>();
}

bool get_bool(const json& j, const std::string& key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) schema_error(where + "." + key, "expected true or false");
  return j[key].get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) schema_error(where + "." + key, "expected a string");
  return j[key].get<std::string>();
}

cplx get_complex(const json& j, const std::string& key, const std::string& where, cplx fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  schema_error(where + "." + key, "expected a number or [re, im]");
}

std::vector<double> get_number_list(const json& j, const std::string& key, const std::string& where) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) schema_error(where + "." + key, "expected an array of numbers");
  for (const auto& v : j[key]) {
    if (!v.is_number()) schema_error(where + "." + key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const json& section(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) schema_error(where, "missing required section '" + key + "'");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// Sub-configs

struct InputCfg {
  std::string kind = "gaussian";
  double delta_omega = 0.3;
  double t_center = 0.0;
  double phase = 0.0;
  double amplitude = 1.0;
  double dt = 0.05;
  double margin = 8.0;
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  double tau = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double separation_threshold = 6.0;
  std::filesystem::path path;
};

InputCfg parse_input(const json& j, const std::string& where, const std::filesystem::path& base) {
  check_keys(j, where, {"kind", "delta_omega", "t_center", "phase", "amplitude", "dt", "margin", "alpha", "beta",
                        "tau", "phi1", "phi2", "separation_threshold", "path"});
  InputCfg c;
  c.kind = get_string(j, "kind", where, c.kind);
  if (c.kind != "gaussian" && c.kind != "double" && c.kind != "csv")
    schema_error(where + ".kind", "expected gaussian, double or csv");
  c.delta_omega = get_number(j, "delta_omega", where, c.delta_omega);
  c.t_center = get_number(j, "t_center", where, c.t_center);
  c.phase = get_number(j, "phase", where, c.phase);
  c.amplitude = get_number(j, "amplitude", where, c.amplitude);
  c.dt = get_number(j, "dt", where, c.dt);
  c.margin = get_number(j, "margin", where, c.margin);
  c.alpha = get_complex(j, "alpha", where, c.kind == "double" ? cplx(std::sqrt(0.5), 0.0) : c.alpha);
  c.beta = get_complex(j, "beta", where, c.kind == "double" ? cplx(std::sqrt(0.5), 0.0) : c.beta);
  c.tau = get_number(j, "tau", where, c.kind == "double" ? 8.0 / c.delta_omega : 0.0);
  c.phi1 = get_number(j, "phi1", where, c.phi1);
  c.phi2 = get_number(j, "phi2", where, c.phi2);
  c.separation_threshold = get_number(j, "separation_threshold", where, c.separation_threshold);
  if (c.kind == "csv") {
    const std::string p = get_string(j, "path", where, "");
    if (p.empty()) schema_error(where, "csv input needs 'path'");
    c.path = std::filesystem::path(p).is_absolute() ? std::filesystem::path(p) : base / p;
  }
  if (!(c.delta_omega > 0.0)) schema_error(where + ".delta_omega", "must be > 0");
  if (!(c.dt > 0.0)) schema_error(where + ".dt", "must be > 0");
  if (!(c.margin > 0.0)) schema_error(where + ".margin", "must be > 0");
  return c;
}

SampledEnvelope make_input(const InputCfg& c, std::vector<std::string>* warnings) {
  const double half = c.margin / c.delta_omega;
  if (c.kind == "gaussian") {
    const TimeGrid grid = TimeGrid::covering(c.t_center - half, c.t_center + half, c.dt);
    return make_gaussian(grid, c.delta_omega, c.t_center, c.phase, c.amplitude);
  }
  if (c.kind == "double") {
    const TimeGrid grid = TimeGrid::covering(c.t_center - half, c.t_center + c.tau + half, c.dt);
    DoublePacketSpec spec;
    spec.alpha = c.alpha;
    spec.beta = c.beta;
    spec.tau = c.tau;
    spec.phi1 = c.phi1;
    spec.phi2 = c.phi2;
    spec.delta_omega = c.delta_omega;
    spec.t_center = c.t_center;
    spec.separation_threshold = c.separation_threshold;
    return make_double_packet(grid, spec, warnings);
  }
  return read_csv(c.path);
}

MediumSpec parse_medium(const json& j, const std::string& where) {
  check_keys(j, where, {"profile", "d", "nz", "n_detunings", "span", "length", "omega21_mismatch", "table"});
  MediumSpec m;
  try {
    m.profile = parse_profile(get_string(j, "profile", where, "gaussian"));
  } catch (const Error& e) {
    schema_error(where + ".profile", e.what());
  }
  if (!j.contains("d")) schema_error(where, "missing optical depth 'd'");
  m.optical_depth = get_number(j, "d", where, 0.0);
  m.nz = get_count(j, "nz", where, m.nz);
  m.n_detunings = get_count(j, "n_detunings", where, m.n_detunings);
  m.span = get_number(j, "span", where, m.profile == Profile::Lorentzian ? 40.0 : m.span);
  m.length = get_number(j, "length", where, m.length);
  m.omega21_mismatch = get_number(j, "omega21_mismatch", where, 0.0);
  if (j.contains("table")) {
    if (!j["table"].is_array()) schema_error(where + ".table", "expected [[delta, density], ...]");
    for (const auto& row : j["table"]) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
        schema_error(where + ".table", "expected [[delta, density], ...]");
      m.custom_table.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
  }
  if (m.profile == Profile::Custom && m.custom_table.empty()) schema_error(where, "custom profile needs 'table'");
  return m;
}

struct ScheduleCfg {
  std::optional<double> t1, t_inv, t2;
  double storage = 2.0;
  double xi1 = 0.0, xi2 = 0.0, omega32 = 0.0;

  ProtocolSchedule resolve(const SampledEnvelope& input, double length, const ProtocolOptions& o) const {
    ProtocolSchedule s;
    s.xi1 = xi1;
    s.xi2 = xi2;
    s.omega32 = omega32;
    s.t1 = t1 ? *t1 : earliest_t1(input, length, o);
    if (t2) {
      s.t2 = *t2;
      s.t_inv = t_inv ? *t_inv : 0.5 * (s.t1 + s.t2);
    } else if (t_inv) {
      s.t_inv = *t_inv;
      s.t2 = 2.0 * s.t_inv - s.t1;
    } else {
      s.t2 = s.t1 + storage;
      s.t_inv = 0.5 * (s.t1 + s.t2);
    }
    return s;
  }
};

ScheduleCfg parse_schedule(const json& j, const std::string& where) {
  check_keys(j, where, {"t1", "t_inv", "t2", "storage", "xi1", "xi2", "omega32"});
  ScheduleCfg s;
  s.t1 = get_optional_number(j, "t1", where);
  s.t_inv = get_optional_number(j, "t_inv", where);
  s.t2 = get_optional_number(j, "t2", where);
  s.storage = get_number(j, "storage", where, s.storage);
  s.xi1 = get_number(j, "xi1", where, 0.0);
  s.xi2 = get_number(j, "xi2", where, 0.0);
  s.omega32 = get_number(j, "omega32", where, 0.0);
  if (!(s.storage > 0.0)) schema_error(where + ".storage", "must be > 0");
  return s;
}

struct SolverCfg {
  ProtocolOptions options;
  double decoherence_rate = 0.0;
  std::string simd = "auto";
};

SolverCfg parse_solver(const json& j, const std::string& where) {
  check_keys(j, where, {"forward_tail", "retrieval_tail", "skip_inversion", "max_shift", "decoherence_rate", "simd"});
  SolverCfg s;
  s.options.forward_tail = get_number(j, "forward_tail", where, 10.0);
  s.options.retrieval_tail = get_number(j, "retrieval_tail", where, 10.0);
  s.options.skip_inversion = get_bool(j, "skip_inversion", where, false);
  s.options.max_shift = static_cast<int>(get_count(j, "max_shift", where, 2));
  s.decoherence_rate = get_number(j, "decoherence_rate", where, 0.0);
  s.simd = get_string(j, "simd", where, "auto");
  if (s.simd != "auto" && s.simd != "scalar" && s.simd != "avx2") schema_error(where + ".simd", "expected auto, scalar or avx2");
  if (s.decoherence_rate < 0.0) schema_error(where + ".decoherence_rate", "must be >= 0");
  return s;
}

SolverCfg default_solver() {
  SolverCfg s;
  s.options.forward_tail = 10.0;
  s.options.retrieval_tail = 10.0;
  return s;
}

OracleSpec parse_oracle(const json& j, const std::string& where, double delta_omega, std::uint64_t seed) {
  check_keys(j, where, {"atoms", "delta_omega", "max_modes", "box_length", "step", "sampling", "seed"});
  OracleSpec o;
  o.atoms = get_count(j, "atoms", where, o.atoms);
  o.delta_omega = get_number(j, "delta_omega", where, delta_omega);
  o.max_modes = get_count(j, "max_modes", where, o.max_modes);
  o.box_length = get_number(j, "box_length", where, 0.0);
  o.step = get_number(j, "step", where, o.step);
  const std::string sampling = get_string(j, "sampling", where, "stratified");
  if (sampling == "stratified") {
    o.sampling = DetuningSampling::Stratified;
  } else if (sampling == "random") {
    o.sampling = DetuningSampling::Random;
  } else {
    schema_error(where + ".sampling", "expected stratified or random");
  }
  o.seed = get_count(j, "seed", where, seed);
  if (o.atoms == 0 || o.atoms > kOracleMaxAtoms) schema_error(where + ".atoms", "must be in [1, 400]");
  if (o.max_modes == 0 || o.max_modes > kOracleMaxModes) schema_error(where + ".max_modes", "must be in [1, 512]");
  return o;
}

// Assertion thresholds: `defaults` are always checked, `optional` only when the
// config names them.
struct AssertionSpec {
  std::map<std::string, double> active;
};

AssertionSpec parse_assertions(const json& root, const std::map<std::string, double>& defaults,
                               const std::set<std::string>& optional) {
  AssertionSpec spec;
  spec.active = defaults;
  if (!root.contains("assertions")) return spec;
  const json& j = root["assertions"];
  std::set<std::string> allowed = optional;
  for (const auto& [k, _] : defaults) allowed.insert(k);
  check_keys(j, "assertions", allowed);
  for (const auto& [key, v] : j.items()) {
    if (v.is_boolean()) {
      if (v.get<bool>()) {
        spec.active[key] = 1.0;
      } else {
        spec.active.erase(key);
      }
      continue;
    }
    if (!v.is_number()) schema_error("assertions." + key, "expected a number or boolean");
    spec.active[key] = v.get<double>();
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Run helpers

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class Checker {
 public:
  Checker(ScenarioResult& r, const AssertionSpec& spec) : r_(r), spec_(spec) {}

  bool has(const std::string& key) const { return spec_.active.count(key) != 0; }
  double threshold(const std::string& key) const { return spec_.active.at(key); }

  void at_most(const std::string& key, const std::string& name, double value) {
    if (!has(key)) return;
    const double t = threshold(key);
    r_.assertions.push_back({name, value, t, "<=", value <= t});
  }
  void at_least(const std::string& key, const std::string& name, double value) {
    if (!has(key)) return;
    const double t = threshold(key);
    r_.assertions.push_back({name, value, t, ">=", value >= t});
  }
  void holds(const std::string& key, const std::string& name, bool ok) {
    if (!has(key)) return;
    r_.assertions.push_back({name, ok ? 1.0 : 0.0, 1.0, ">=", ok});
  }

 private:
  ScenarioResult& r_;
  const AssertionSpec& spec_;
};

std::string csv_of(const SampledEnvelope& env) {
  std::ostringstream out;
  write_csv(env, out);
  return out.str();
}

double wrap(double phase) { return std::remainder(phase, 2.0 * kPi); }

void select_simd(const std::string& name) {
  if (name == "auto") return;
  if (!simd::select_backend(simd::parse_backend(name)))
    throw Error(ErrorKind::InvalidArgument, "SIMD backend '" + name + "' is not available on this machine");
}

struct PacketCheck {
  cplx first{}, second{};
  cplx expected_first{}, expected_second{};
  double amplitude_error = 0.0;
  double phase_error = 0.0;
};

// Projects an output onto the reversed unit packets of a double-packet input.
PacketCheck packet_check(const SampledEnvelope& out, const SampledEnvelope& input, const InputCfg& c, double chi,
                         double t_prime) {
  const SampledEnvelope g1 = make_gaussian(input.grid(), c.delta_omega, c.t_center, 0.0, 1.0);
  const SampledEnvelope g2 = make_gaussian(input.grid(), c.delta_omega, c.t_center + c.tau, 0.0, 1.0);
  const SampledEnvelope r2 = ideal_retrieve_envelope(g2, 0.0, t_prime);
  const SampledEnvelope r1 = ideal_retrieve_envelope(g1, 0.0, t_prime);
  // Least squares on the two reversed packets; their tails overlap slightly.
  const cplx g11 = overlap(r2, r2), g12 = overlap(r2, r1), g22 = overlap(r1, r1);
  const cplx b1 = overlap(r2, out), b2 = overlap(r1, out);
  const cplx det = g11 * g22 - g12 * std::conj(g12);
  PacketCheck p;
  p.first = (g22 * b1 - g12 * b2) / det;
  p.second = (g11 * b2 - std::conj(g12) * b1) / det;
  const cplx phase = std::polar(1.0, -chi);
  p.expected_first = c.beta * std::polar(1.0, c.phi2) * phase;
  p.expected_second = c.alpha * std::polar(1.0, c.phi1) * phase;
  auto rel = [](cplx got, cplx want) {
    return std::abs(want) > 0.0 ? std::abs(std::abs(got) - std::abs(want)) / std::abs(want) : std::abs(got);
  };
  p.amplitude_error = std::max(rel(p.first, p.expected_first), rel(p.second, p.expected_second));
  auto dphi = [](cplx got, cplx want) {
    return std::abs(want) > 0.0 ? std::abs(wrap(std::arg(got) - std::arg(want))) : 0.0;
  };
  p.phase_error = std::max(dphi(p.first, p.expected_first), dphi(p.second, p.expected_second));
  return p;
}

ojson packet_json(const PacketCheck& p) {
  return ojson{{"first_amplitude", std::abs(p.first)},
               {"first_phase", std::arg(p.first)},
               {"second_amplitude", std::abs(p.second)},
               {"second_phase", std::arg(p.second)},
               {"expected_first_amplitude", std::abs(p.expected_first)},
               {"expected_first_phase", std::arg(p.expected_first)},
               {"expected_second_amplitude", std::abs(p.expected_second)},
               {"expected_second_phase", std::arg(p.expected_second)},
               {"amplitude_error", p.amplitude_error},
               {"phase_error", p.phase_error}};
}

ojson ledger_json(const std::vector<LedgerEntry>& ledger) {
  ojson arr = ojson::array();
  for (const auto& e : ledger)
    arr.push_back({{"stage", e.stage},
                   {"field_in", e.field_in},
                   {"field_out", e.field_out},
                   {"coherence_in", e.coherence_in},
                   {"coherence", e.coherence},
                   {"leaked", e.leaked}});
  return arr;
}

// ---------------------------------------------------------------------------
// Scenarios. Each parse_* validates completely before anything runs.

const std::set<std::string> kCommonKeys = {"scenario", "output_dir", "seed", "description", "assertions", "threads"};

std::set<std::string> with_common(std::initializer_list<std::string> extra) {
  std::set<std::string> s = kCommonKeys;
  s.insert(extra.begin(), extra.end());
  return s;
}

struct Context {
  const json& root;
  std::filesystem::path base;
  std::uint64_t seed;
  unsigned threads;
};

// ideal-map ------------------------------------------------------------------

struct IdealMapCfg {
  std::size_t trials = 20;
  std::size_t max_packets = 4;
  double dt = 0.05;
  std::optional<InputCfg> input;
  ScheduleCfg schedule;
  AssertionSpec asserts;
};

IdealMapCfg parse_ideal_map(const Context& ctx) {
  check_keys(ctx.root, "config", with_common({"random_inputs", "input", "schedule"}));
  IdealMapCfg c;
  if (ctx.root.contains("random_inputs")) {
    const json& r = ctx.root["random_inputs"];
    check_keys(r, "random_inputs", {"count", "max_packets", "dt"});
    c.trials = get_count(r, "count", "random_inputs", c.trials);
    c.max_packets = get_count(r, "max_packets", "random_inputs", c.max_packets);
    c.dt = get_number(r, "dt", "random_inputs", c.dt);
    if (c.max_packets == 0) schema_error("random_inputs.max_packets", "must be >= 1");
  }
  if (ctx.root.contains("input")) c.input = parse_input(ctx.root["input"], "input", ctx.base);
  if (ctx.root.contains("schedule")) c.schedule = parse_schedule(ctx.root["schedule"], "schedule");
  c.asserts = parse_assertions(ctx.root, {{"fidelity_min", 1.0 - 1e-10}, {"energy_error_max", 1e-12}},
                               {"packet_amplitude_tol", "packet_phase_tol"});
  return c;
}

ScenarioResult run_ideal_map(const Context& ctx) {
  const IdealMapCfg c = parse_ideal_map(ctx);
  ScenarioResult r;
  r.scenario = "ideal-map";
  Checker check(r, c.asserts);

  // Random multi-packet trials; the reference is the packet formula evaluated
  // at the reflected times, not the reversed samples.
  std::mt19937_64 rng(ctx.seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
  struct Packet {
    cplx a;
    double center, width;
  };
  double worst_fid = 1.0, worst_energy = 0.0;
  std::ostringstream table;
  table << "trial,packets,chi12,fidelity,energy_error\n" << std::setprecision(17);
  for (std::size_t trial = 0; trial < c.trials; ++trial) {
    const std::size_t np = 1 + static_cast<std::size_t>(uniform(0.0, static_cast<double>(c.max_packets) - 1e-9));
    std::vector<Packet> packets(np);
    double lo = 1e300, hi = -1e300;
    for (auto& p : packets) {
      p.a = std::polar(uniform(0.2, 1.0), uniform(-kPi, kPi));
      p.center = uniform(0.0, 20.0);
      p.width = uniform(0.5, 2.0);
      lo = std::min(lo, p.center - 8.0 / p.width);
      hi = std::max(hi, p.center + 8.0 / p.width);
    }
    const TimeGrid grid = TimeGrid::covering(lo, hi, c.dt);
    auto formula = [&](double t) {
      cplx v{};
      for (const auto& p : packets) v += p.a * std::exp(-0.5 * std::pow((t - p.center) * p.width, 2));
      return v;
    };
    std::vector<cplx> s(grid.size);
    for (std::size_t i = 0; i < grid.size; ++i) s[i] = formula(grid.time(i));
    const SampledEnvelope input(grid, std::move(s));
    const double chi = uniform(-kPi, kPi);
    const ProtocolSchedule sched = ProtocolSchedule::mirrored(grid.t_end() + uniform(1.0, 10.0), uniform(0.5, 20.0));
    const double t_prime = sched.t_prime(grid.t_start);
    const SampledEnvelope out = ideal_retrieve_envelope(input, chi, t_prime);

    std::vector<cplx> ref(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      ref[i] = std::polar(1.0, -chi) * formula(grid.t_start + t_prime - out.time(i));
    const SampledEnvelope expected(out.grid(), std::move(ref));
    const double fid = fidelity(expected, out);
    const double de = std::abs(out.energy() - input.energy());
    worst_fid = std::min(worst_fid, fid);
    worst_energy = std::max(worst_energy, de);
    table << trial << ',' << np << ',' << chi << ',' << fid << ',' << de << '\n';
  }
  r.metrics["trials"] = c.trials;
  r.metrics["min_fidelity"] = worst_fid;
  r.metrics["max_energy_error"] = worst_energy;
  r.artifacts.emplace_back("ideal_map_trials.csv", table.str());
  if (c.trials > 0) {
    check.at_least("fidelity_min", "min fidelity vs reversed input", worst_fid);
    check.at_most("energy_error_max", "max energy error", worst_energy);
  }

  if (c.input) {
    const SampledEnvelope input = make_input(*c.input, &r.warnings);
    const ProtocolSchedule sched = c.schedule.resolve(input, 1.0, default_solver().options);
    sched.validate();
    const double t_prime = sched.t_prime(input.t_start());
    const SampledEnvelope out = ideal_retrieve_envelope(input, sched.chi12(), t_prime);
    r.metrics["chi12"] = sched.chi12();
    r.metrics["t_prime"] = t_prime;
    r.artifacts.emplace_back("input.csv", csv_of(input));
    r.artifacts.emplace_back("ideal.csv", csv_of(out));
    if (c.input->kind == "double") {
      const PacketCheck p = packet_check(out, input, *c.input, sched.chi12(), t_prime);
      r.metrics["packets"] = packet_json(p);
      check.at_most("packet_amplitude_tol", "packet amplitude error", p.amplitude_error);
      check.at_most("packet_phase_tol", "packet phase error", p.phase_error);
    }
  }
  return r;
}

// crib-run ---------------------------------------------------------------------

struct CribRunCfg {
  MediumSpec medium;
  ScheduleCfg schedule;
  InputCfg input;
  SolverCfg solver = default_solver();
  AssertionSpec asserts;
};

CribRunCfg parse_crib_run(const Context& ctx) {
  check_keys(ctx.root, "config", with_common({"medium", "schedule", "input", "solver"}));
  CribRunCfg c;
  c.medium = parse_medium(section(ctx.root, "medium", "config"), "medium");
  c.input = parse_input(section(ctx.root, "input", "config"), "input", ctx.base);
  if (ctx.root.contains("schedule")) c.schedule = parse_schedule(ctx.root["schedule"], "schedule");
  if (ctx.root.contains("solver")) c.solver = parse_solver(ctx.root["solver"], "solver");
  c.asserts = parse_assertions(ctx.root, {{"ledger_max", 1e-6}},
                               {"efficiency_min", "efficiency_max", "fidelity_min", "packet_amplitude_tol",
                                "packet_phase_tol", "ideal_packet_tol"});
  return c;
}

ScenarioResult run_crib_run(const Context& ctx) {
  const CribRunCfg c = parse_crib_run(ctx);
  select_simd(c.solver.simd);
  ScenarioResult r;
  r.scenario = "crib-run";
  Checker check(r, c.asserts);
  const SampledEnvelope input = make_input(c.input, &r.warnings);
  const AtomicMedium medium = build_medium(c.medium);
  const ProtocolSchedule sched = c.schedule.resolve(input, medium.length, c.solver.options);
  const ProtocolReport rep = run_protocol(input, medium, sched, c.solver.decoherence_rate, c.solver.options);
  const ClosedForm cf = closed_form(input, medium);

  r.metrics["optical_depth"] = medium.optical_depth;
  r.metrics["simd_backend"] = simd::kernels().name;
  r.metrics["t1"] = sched.t1;
  r.metrics["t_inv"] = sched.t_inv;
  r.metrics["t2"] = sched.t2;
  r.metrics["chi12"] = rep.chi12;
  r.metrics["t_prime"] = rep.t_prime;
  r.metrics["input_energy"] = input.energy();
  r.metrics["transmitted_energy"] = rep.transmitted.energy();
  r.metrics["echo_energy"] = rep.echo.energy();
  r.metrics["efficiency"] = rep.efficiency;
  r.metrics["fidelity_vs_ideal"] = rep.fidelity_vs_ideal;
  r.metrics["phase_vs_ideal"] = rep.phase_vs_ideal;
  r.metrics["best_shift_fidelity"] = rep.best_shift_fidelity;
  r.metrics["best_shift"] = rep.best_shift;
  r.metrics["residual_coherence"] = rep.residual_coherence;
  r.metrics["max_ledger_residual"] = rep.max_ledger_residual;
  r.metrics["closed_form_efficiency"] = cf.efficiency;
  r.metrics["closed_form_fidelity"] = cf.fidelity;
  r.metrics["closed_form_transmission"] = cf.transmission;
  r.metrics["max_local_error"] = rep.step_report.max_local_error;
  r.metrics["skip_inversion"] = c.solver.options.skip_inversion;

  check.at_most("ledger_max", "energy ledger residual", rep.max_ledger_residual);
  check.at_least("efficiency_min", "efficiency", rep.efficiency);
  check.at_most("efficiency_max", "efficiency", rep.efficiency);
  check.at_least("fidelity_min", "fidelity vs ideal", rep.fidelity_vs_ideal);
  if (c.input.kind == "double") {
    const PacketCheck solver_p = packet_check(rep.echo, input, c.input, rep.chi12, rep.t_prime);
    const PacketCheck ideal_p = packet_check(rep.ideal, input, c.input, rep.chi12, rep.t_prime);
    r.metrics["packets"] = packet_json(solver_p);
    r.metrics["ideal_packets"] = packet_json(ideal_p);
    check.at_most("packet_amplitude_tol", "echo packet amplitude error", solver_p.amplitude_error);
    check.at_most("packet_phase_tol", "echo packet phase error", solver_p.phase_error);
    check.at_most("ideal_packet_tol", "ideal packet amplitude/phase error",
                  std::max(ideal_p.amplitude_error, ideal_p.phase_error));
  }

  r.artifacts.emplace_back("input.csv", csv_of(input));
  r.artifacts.emplace_back("transmitted.csv", csv_of(rep.transmitted));
  r.artifacts.emplace_back("echo.csv", csv_of(rep.echo));
  r.artifacts.emplace_back("ideal.csv", csv_of(rep.ideal));
  r.artifacts.emplace_back("ledger.json", ledger_json(rep.energy_ledger).dump(2) + "\n");
  return r;
}

// depth-sweep --------------------------------------------------------------------

struct DepthSweepCfg {
  MediumSpec medium;
  ScheduleCfg schedule;
  InputCfg input;
  SolverCfg solver = default_solver();
  std::vector<double> depths;
  std::optional<OracleSpec> oracle;
  std::vector<double> oracle_depths;
  // Decreases smaller than this count as ties; fidelities near 1 differ in the last bits.
  double monotone_slack = 1e-12;
  AssertionSpec asserts;
};

DepthSweepCfg parse_depth_sweep(const Context& ctx) {
  check_keys(ctx.root, "config",
             with_common({"medium", "schedule", "input", "solver", "depths", "oracle", "oracle_depths",
                          "monotone_slack"}));
  DepthSweepCfg c;
  json medium = section(ctx.root, "medium", "config");
  if (medium.is_object() && !medium.contains("d")) medium["d"] = 0.0;
  c.medium = parse_medium(medium, "medium");
  c.input = parse_input(section(ctx.root, "input", "config"), "input", ctx.base);
  if (ctx.root.contains("schedule")) c.schedule = parse_schedule(ctx.root["schedule"], "schedule");
  if (ctx.root.contains("solver")) c.solver = parse_solver(ctx.root["solver"], "solver");
  c.depths = get_number_list(ctx.root, "depths", "config");
  if (c.depths.empty()) schema_error("config.depths", "need at least one optical depth");
  for (double d : c.depths)
    if (!(d >= 0.0)) schema_error("config.depths", "depths must be >= 0");
  if (ctx.root.contains("oracle")) c.oracle = parse_oracle(ctx.root["oracle"], "oracle", c.input.delta_omega, ctx.seed);
  c.oracle_depths = get_number_list(ctx.root, "oracle_depths", "config");
  c.monotone_slack = get_number(ctx.root, "monotone_slack", "config", c.monotone_slack);
  if (!(c.monotone_slack >= 0.0)) schema_error("config.monotone_slack", "must be >= 0");
  if (!c.oracle_depths.empty() && !c.oracle) schema_error("config.oracle_depths", "needs an 'oracle' section");
  c.asserts = parse_assertions(ctx.root, {{"ledger_max", 1e-6}, {"monotone_efficiency", 1.0}},
                               {"monotone_fidelity", "final_efficiency_min", "final_fidelity_min",
                                "closed_form_rel_tol", "oracle_closed_form_rel_tol", "oracle_solver_abs_tol"});
  return c;
}

struct DepthRow {
  double d = 0.0;
  double efficiency = 0.0, fidelity = 0.0, ledger = 0.0, transmission = 0.0;
  ClosedForm cf;
};

ScenarioResult run_depth_sweep(const Context& ctx) {
  const DepthSweepCfg c = parse_depth_sweep(ctx);
  select_simd(c.solver.simd);
  ScenarioResult r;
  r.scenario = "depth-sweep";
  Checker check(r, c.asserts);
  const SampledEnvelope input = make_input(c.input, &r.warnings);
  const ProtocolSchedule sched = c.schedule.resolve(input, c.medium.length, c.solver.options);

  std::vector<DepthRow> rows(c.depths.size());
  parallel_for(rows.size(), ctx.threads, [&](std::size_t i) {
    MediumSpec ms = c.medium;
    ms.optical_depth = c.depths[i];
    const AtomicMedium m = build_medium(ms);
    const ProtocolReport rep = run_protocol(input, m, sched, c.solver.decoherence_rate, c.solver.options);
    rows[i] = {c.depths[i], rep.efficiency, rep.fidelity_vs_ideal, rep.max_ledger_residual,
               rep.transmitted.energy() / input.energy(), closed_form(input, m)};
  });

  std::ostringstream table;
  table << "d,efficiency,fidelity,closed_form_efficiency,closed_form_fidelity,transmission,closed_form_transmission,"
           "ledger_residual\n"
        << std::setprecision(17);
  ojson arr = ojson::array();
  double worst_ledger = 0.0, worst_rel = 0.0;
  double drop_eff = 0.0, drop_fid = 0.0;
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].d < rows[b].d; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const DepthRow& row = rows[order[k]];
    table << row.d << ',' << row.efficiency << ',' << row.fidelity << ',' << row.cf.efficiency << ','
          << row.cf.fidelity << ',' << row.transmission << ',' << row.cf.transmission << ',' << row.ledger << '\n';
    const double rel = row.cf.efficiency > 0.0 ? std::abs(row.efficiency - row.cf.efficiency) / row.cf.efficiency
                                               : std::abs(row.efficiency);
    arr.push_back({{"d", row.d},
                   {"efficiency", row.efficiency},
                   {"fidelity", row.fidelity},
                   {"closed_form_efficiency", row.cf.efficiency},
                   {"closed_form_fidelity", row.cf.fidelity},
                   {"closed_form_rel_error", rel},
                   {"ledger_residual", row.ledger}});
    worst_ledger = std::max(worst_ledger, row.ledger);
    worst_rel = std::max(worst_rel, rel);
    if (k > 0) {
      const DepthRow& prev = rows[order[k - 1]];
      drop_eff = std::max(drop_eff, prev.efficiency - row.efficiency);
      drop_fid = std::max(drop_fid, prev.fidelity - row.fidelity);
    }
  }
  const bool mono_eff = drop_eff <= c.monotone_slack;
  const bool mono_fid = drop_fid <= c.monotone_slack;
  const DepthRow& last = rows[order.back()];
  r.metrics["rows"] = arr;
  r.metrics["monotone_efficiency"] = mono_eff;
  r.metrics["monotone_fidelity"] = mono_fid;
  r.metrics["monotone_slack"] = c.monotone_slack;
  r.metrics["max_efficiency_decrease"] = drop_eff;
  r.metrics["max_fidelity_decrease"] = drop_fid;
  r.metrics["max_closed_form_rel_error"] = worst_rel;
  r.metrics["max_ledger_residual"] = worst_ledger;
  r.metrics["final_efficiency"] = last.efficiency;
  r.metrics["final_fidelity"] = last.fidelity;
  r.artifacts.emplace_back("depth_sweep.csv", table.str());

  check.at_most("ledger_max", "max energy ledger residual", worst_ledger);
  check.holds("monotone_efficiency", "efficiency nondecreasing in d", mono_eff);
  check.holds("monotone_fidelity", "fidelity nondecreasing in d", mono_fid);
  check.at_least("final_efficiency_min", "efficiency at largest d", last.efficiency);
  check.at_least("final_fidelity_min", "fidelity at largest d", last.fidelity);
  check.at_most("closed_form_rel_tol", "max relative deviation from closed form", worst_rel);

  if (c.oracle) {
    std::ostringstream otab;
    otab << "d,oracle_efficiency,closed_form_efficiency,solver_efficiency,oracle_norm_error\n" << std::setprecision(17);
    ojson oarr = ojson::array();
    double worst_oracle_rel = 0.0, worst_oracle_solver = 0.0;
    std::vector<ojson> entries(c.oracle_depths.size());
    std::vector<std::string> lines(c.oracle_depths.size());
    std::vector<double> rels(c.oracle_depths.size()), diffs(c.oracle_depths.size());
    parallel_for(c.oracle_depths.size(), ctx.threads, [&](std::size_t i) {
      MediumSpec ms = c.medium;
      ms.optical_depth = c.oracle_depths[i];
      const AtomicMedium m = build_medium(ms);
      const ProtocolReport rep = run_protocol(input, m, sched, c.solver.decoherence_rate, c.solver.options);
      const DiscreteSystem sys = build_system(m, input, sched, *c.oracle);
      const OracleResult o = evolve(sys, sched, rep.echo.grid(), c.solver.decoherence_rate);
      const ClosedForm cf = closed_form(input, m);
      rels[i] = std::abs(o.efficiency - cf.efficiency) / cf.efficiency;
      diffs[i] = std::abs(o.efficiency - rep.efficiency);
      entries[i] = {{"d", ms.optical_depth},
                    {"oracle_efficiency", o.efficiency},
                    {"closed_form_efficiency", cf.efficiency},
                    {"solver_efficiency", rep.efficiency},
                    {"oracle_vs_closed_form_rel_error", rels[i]},
                    {"oracle_norm_error", o.max_norm_error}};
      std::ostringstream line;
      line << std::setprecision(17) << ms.optical_depth << ',' << o.efficiency << ',' << cf.efficiency << ','
           << rep.efficiency << ',' << o.max_norm_error << '\n';
      lines[i] = line.str();
    });
    for (std::size_t i = 0; i < entries.size(); ++i) {
      oarr.push_back(entries[i]);
      otab << lines[i];
      worst_oracle_rel = std::max(worst_oracle_rel, rels[i]);
      worst_oracle_solver = std::max(worst_oracle_solver, diffs[i]);
    }
    r.metrics["oracle_rows"] = oarr;
    r.metrics["max_oracle_closed_form_rel_error"] = worst_oracle_rel;
    r.metrics["max_oracle_solver_efficiency_diff"] = worst_oracle_solver;
    r.artifacts.emplace_back("oracle_depths.csv", otab.str());
    if (!c.oracle_depths.empty()) {
      check.at_most("oracle_closed_form_rel_tol", "oracle vs closed form (relative)", worst_oracle_rel);
      check.at_most("oracle_solver_abs_tol", "oracle vs solver efficiency", worst_oracle_solver);
    }
  }
  return r;
}

// shared backend parsing for timebin / interferometer ------------------------------

struct BackendCfg {
  BackendKind kind = BackendKind::Ideal;
  double delay = 0.0;
  std::optional<MediumSpec> medium;
  ScheduleCfg schedule;
  SolverCfg solver = default_solver();
};

BackendCfg parse_backend_cfg(const Context& ctx) {
  BackendCfg b;
  const json& j = section(ctx.root, "backend", "config");
  check_keys(j, "backend", {"kind", "delay"});
  try {
    b.kind = parse_backend_kind(get_string(j, "kind", "backend", "ideal"));
  } catch (const Error& e) {
    schema_error("backend.kind", e.what());
  }
  b.delay = get_number(j, "delay", "backend", 0.0);
  if (ctx.root.contains("medium")) b.medium = parse_medium(ctx.root["medium"], "medium");
  if (ctx.root.contains("schedule")) b.schedule = parse_schedule(ctx.root["schedule"], "schedule");
  if (ctx.root.contains("solver")) b.solver = parse_solver(ctx.root["solver"], "solver");
  if (b.kind == BackendKind::Solver && !b.medium) schema_error("config", "solver backend needs a 'medium' section");
  return b;
}

MemoryBackend make_backend(const BackendCfg& b, BackendKind kind) {
  MemoryBackend m;
  m.kind = kind;
  m.delay = b.delay;
  m.options = b.solver.options;
  m.decoherence_rate = b.solver.decoherence_rate;
  if (b.medium && kind == BackendKind::Solver) m.medium = build_medium(*b.medium);
  m.schedule = ProtocolSchedule::mirrored(1.0, b.schedule.storage, b.schedule.xi1, b.schedule.xi2, b.schedule.omega32);
  m.auto_schedule = !b.schedule.t1.has_value();
  if (b.schedule.t1) {
    ProtocolSchedule s;
    s.t1 = *b.schedule.t1;
    s.t2 = b.schedule.t2 ? *b.schedule.t2 : s.t1 + b.schedule.storage;
    s.t_inv = b.schedule.t_inv ? *b.schedule.t_inv : 0.5 * (s.t1 + s.t2);
    s.xi1 = b.schedule.xi1;
    s.xi2 = b.schedule.xi2;
    s.omega32 = b.schedule.omega32;
    m.schedule = s;
  }
  return m;
}

// timebin -------------------------------------------------------------------------

struct TimebinCfg {
  double r = 1.0, phi = 0.0, tau = 16.0, delta_omega = 0.5, dt = 0.05, margin = 8.0;
  double overlap_threshold = kDefaultBinOverlap;
  BackendCfg backend;
  std::vector<double> chi_grid;
  AssertionSpec asserts;
};

TimebinCfg parse_timebin(const Context& ctx) {
  check_keys(ctx.root, "config", with_common({"qubit", "backend", "medium", "schedule", "solver", "chi_grid"}));
  TimebinCfg c;
  const json& q = section(ctx.root, "qubit", "config");
  check_keys(q, "qubit", {"r", "phi", "tau", "bin", "overlap_threshold"});
  c.r = get_number(q, "r", "qubit", c.r);
  c.phi = get_number(q, "phi", "qubit", c.phi);
  c.tau = get_number(q, "tau", "qubit", c.tau);
  c.overlap_threshold = get_number(q, "overlap_threshold", "qubit", c.overlap_threshold);
  if (q.contains("bin")) {
    check_keys(q["bin"], "qubit.bin", {"delta_omega", "dt", "margin"});
    c.delta_omega = get_number(q["bin"], "delta_omega", "qubit.bin", c.delta_omega);
    c.dt = get_number(q["bin"], "dt", "qubit.bin", c.dt);
    c.margin = get_number(q["bin"], "margin", "qubit.bin", c.margin);
  }
  if (!(c.r >= 0.0 && c.r <= 1.0)) schema_error("qubit.r", "must lie in [0, 1]");
  if (!(c.tau > 0.0)) schema_error("qubit.tau", "must be > 0");
  if (!(c.delta_omega > 0.0) || !(c.dt > 0.0)) schema_error("qubit.bin", "delta_omega and dt must be > 0");
  c.backend = parse_backend_cfg(ctx);
  if (c.backend.kind == BackendKind::Delay) schema_error("backend.kind", "time-bin transform needs ideal or solver");
  c.chi_grid = get_number_list(ctx.root, "chi_grid", "config");
  if (c.chi_grid.empty()) c.chi_grid = {0.0};
  c.asserts = parse_assertions(ctx.root, {{"ideal_tol", 1e-10}},
                               {"solver_r_tol", "solver_phi_tol", "global_phase_tol", "residual_max",
                                "ideal_involution_tol"});
  return c;
}

ScenarioResult run_timebin(const Context& ctx) {
  const TimebinCfg c = parse_timebin(ctx);
  select_simd(c.backend.solver.simd);
  ScenarioResult r;
  r.scenario = "timebin";
  Checker check(r, c.asserts);

  TimeBinQubit q;
  q.r = c.r;
  q.phi = c.phi;
  q.tau = c.tau;
  const double half = c.margin / c.delta_omega;
  q.bin = make_gaussian(TimeGrid::covering(-half, half, c.dt), c.delta_omega, 0.0, 0.0, 1.0);
  const double r_expected = std::sqrt(std::max(0.0, 1.0 - c.r * c.r));
  const bool phase_expected = c.r > 0.0 && c.r < 1.0;

  const Decoded round_trip = decode(encode(q, c.overlap_threshold), q.tau, q.bin);
  r.metrics["round_trip_r_error"] = std::abs(round_trip.r - c.r);
  r.metrics["round_trip_phi_error"] = phase_expected ? std::abs(wrap(round_trip.phi - c.phi)) : 0.0;
  r.metrics["round_trip_residual"] = round_trip.residual;

  const MemoryBackend ideal = make_backend(c.backend, BackendKind::Ideal);
  const std::size_t n = c.chi_grid.size();
  std::vector<TimeBinTransform> ideal_out(n), solver_out(n);
  const bool use_solver = c.backend.kind == BackendKind::Solver;
  const MemoryBackend solver = use_solver ? make_backend(c.backend, BackendKind::Solver) : ideal;
  parallel_for(n, ctx.threads, [&](std::size_t i) {
    ideal_out[i] = memory_transform(q, c.chi_grid[i], ideal);
    if (use_solver) solver_out[i] = memory_transform(q, c.chi_grid[i], solver);
  });

  double ideal_err = 0.0, ideal_phase_err = 0.0;
  double s_r = 0.0, s_phi = 0.0, s_global = 0.0, s_resid = 0.0, s_eff = 1.0;
  std::ostringstream table;
  table << "chi12,backend,r_out,phi_out,phase_defined,global_phase,expected_global_phase,efficiency,residual\n"
        << std::setprecision(17);
  for (std::size_t i = 0; i < n; ++i) {
    const double chi = c.chi_grid[i];
    const TimeBinTransform& t = ideal_out[i];
    ideal_err = std::max(ideal_err, std::abs(t.qubit.r - r_expected));
    if (phase_expected) ideal_err = std::max(ideal_err, std::abs(wrap(t.qubit.phi - c.phi)));
    ideal_phase_err = std::max(ideal_phase_err, std::abs(wrap(t.global_phase + chi)));
    table << chi << ",ideal," << t.qubit.r << ',' << t.qubit.phi << ',' << t.phase_defined << ',' << t.global_phase
          << ',' << wrap(-chi) << ',' << t.efficiency << ',' << t.residual << '\n';
    if (use_solver) {
      const TimeBinTransform& s = solver_out[i];
      s_r = std::max(s_r, std::abs(s.qubit.r - r_expected));
      if (phase_expected) s_phi = std::max(s_phi, std::abs(wrap(s.qubit.phi - c.phi)));
      s_global = std::max(s_global, std::abs(wrap(s.global_phase + chi)));
      s_resid = std::max(s_resid, s.residual);
      s_eff = std::min(s_eff, s.efficiency);
      table << chi << ",solver," << s.qubit.r << ',' << s.qubit.phi << ',' << s.phase_defined << ','
            << s.global_phase << ',' << wrap(-chi) << ',' << s.efficiency << ',' << s.residual << '\n';
    }
  }
  // Two passes through the ideal memory with chi12 = 0 restore the qubit.
  const TimeBinTransform once = memory_transform(q, 0.0, ideal);
  const TimeBinTransform twice = memory_transform(once.qubit, 0.0, ideal);
  double involution = std::abs(twice.qubit.r - c.r);
  if (phase_expected) involution = std::max(involution, std::abs(wrap(twice.qubit.phi - c.phi)));

  r.metrics["r_in"] = c.r;
  r.metrics["phi_in"] = c.phi;
  r.metrics["r_expected"] = r_expected;
  r.metrics["ideal_max_error"] = ideal_err;
  r.metrics["ideal_global_phase_error"] = ideal_phase_err;
  r.metrics["ideal_involution_error"] = involution;
  if (use_solver) {
    r.metrics["solver_r_error"] = s_r;
    r.metrics["solver_phi_error"] = s_phi;
    r.metrics["solver_global_phase_error"] = s_global;
    r.metrics["solver_residual"] = s_resid;
    r.metrics["solver_min_efficiency"] = s_eff;
    r.artifacts.emplace_back("solver_output.csv", csv_of(solver_out.front().output));
  }
  r.artifacts.emplace_back("timebin.csv", table.str());
  r.artifacts.emplace_back("input.csv", csv_of(encode(q, c.overlap_threshold)));
  r.artifacts.emplace_back("ideal_output.csv", csv_of(ideal_out.front().output));

  check.at_most("ideal_tol", "ideal (r, phi) error", std::max(ideal_err, ideal_phase_err));
  check.at_most("ideal_involution_tol", "ideal double transform error", involution);
  if (use_solver) {
    check.at_most("solver_r_tol", "solver r error", s_r);
    check.at_most("solver_phi_tol", "solver phi error", s_phi);
    check.at_most("global_phase_tol", "solver global phase vs -chi12", s_global);
    check.at_most("residual_max", "solver residual outside bins", s_resid);
  } else {
    check.at_most("global_phase_tol", "ideal global phase vs -chi12", ideal_phase_err);
  }
  return r;
}

// interferometer --------------------------------------------------------------------

struct InterferometerCfg {
  double delta_omega = 2.0, dt = 0.05, margin = 8.0;
  MzConfig mz;
  double from = 0.0, to = 2.0 * kPi;
  std::size_t n = 17;
  bool blocking = true;
  BackendCfg backend;
  AssertionSpec asserts;
};

InterferometerCfg parse_interferometer(const Context& ctx) {
  check_keys(ctx.root, "config",
             with_common({"pulse", "mz", "alpha_sweep", "backend", "medium", "schedule", "solver", "blocking"}));
  InterferometerCfg c;
  if (ctx.root.contains("pulse")) {
    const json& p = ctx.root["pulse"];
    check_keys(p, "pulse", {"delta_omega", "dt", "margin"});
    c.delta_omega = get_number(p, "delta_omega", "pulse", c.delta_omega);
    c.dt = get_number(p, "dt", "pulse", c.dt);
    c.margin = get_number(p, "margin", "pulse", c.margin);
  }
  const json& mz = section(ctx.root, "mz", "config");
  check_keys(mz, "mz", {"delta_L", "alpha", "coupler_ratio", "omega0"});
  c.mz.delta_L = get_number(mz, "delta_L", "mz", c.mz.delta_L);
  c.mz.coupler_ratio = get_number(mz, "coupler_ratio", "mz", c.mz.coupler_ratio);
  c.mz.alpha = get_number(mz, "alpha", "mz", 0.0);
  if (mz.contains("omega0")) {
    const MzConfig from = MzConfig::from_carrier(c.mz.delta_L, get_number(mz, "omega0", "mz", 0.0), c.mz.coupler_ratio);
    if (mz.contains("alpha") && std::abs(wrap(from.alpha - c.mz.alpha)) > 1e-9)
      schema_error("mz", "alpha inconsistent with omega0 * delta_L");
    c.mz.alpha = from.alpha;
  }
  try {
    c.mz.validate();
  } catch (const Error& e) {
    schema_error("mz", e.what());
  }
  if (ctx.root.contains("alpha_sweep")) {
    const json& s = ctx.root["alpha_sweep"];
    check_keys(s, "alpha_sweep", {"from", "to", "n"});
    c.from = get_number(s, "from", "alpha_sweep", c.from);
    c.to = get_number(s, "to", "alpha_sweep", c.to);
    c.n = get_count(s, "n", "alpha_sweep", c.n);
    if (c.n == 0) schema_error("alpha_sweep.n", "must be >= 1");
  }
  c.blocking = get_bool(ctx.root, "blocking", "config", true);
  c.backend = parse_backend_cfg(ctx);
  c.asserts = parse_assertions(ctx.root, {},
                               {"visibility_min", "period_tol", "null_max", "central_spread_max", "side_spread_max",
                                "energy_tol", "fringe_model_tol", "blocking_tol", "stray_max"});
  return c;
}

ScenarioResult run_interferometer(const Context& ctx) {
  const InterferometerCfg c = parse_interferometer(ctx);
  select_simd(c.backend.solver.simd);
  ScenarioResult r;
  r.scenario = "interferometer";
  Checker check(r, c.asserts);
  const double half = c.margin / c.delta_omega;
  const SampledEnvelope pulse = make_gaussian(TimeGrid::covering(-half, half, c.dt), c.delta_omega, 0.0, 0.0, 1.0);
  const MemoryBackend memory = make_backend(c.backend, c.backend.kind);

  std::vector<FringeRow> rows(c.n);
  std::vector<double> energy_err(c.n), stray(c.n);
  parallel_for(c.n, ctx.threads, [&](std::size_t k) {
    MzConfig m = c.mz;
    m.alpha = c.n == 1 ? c.from : c.from + (c.to - c.from) * static_cast<double>(k) / static_cast<double>(c.n - 1);
    const DoublePassResult d = double_pass(pulse, m, memory);
    rows[k] = {m.alpha, d.i_early, d.i_central, d.i_late};
    energy_err[k] = std::abs(d.output.energy() + d.unused_energy - d.input_energy);
    stray[k] = d.stray_energy / d.input_energy;
  });
  const FringeAnalysis fa = analyze_fringe(rows);

  // Reference points at alpha = 0 and pi/2 relative to the configured offset.
  auto at = [&](double alpha) {
    MzConfig m = c.mz;
    m.alpha = alpha;
    return double_pass(pulse, m, memory);
  };
  const DoublePassResult peak = at(c.mz.alpha);
  const DoublePassResult null = at(c.mz.alpha + 0.5 * kPi);
  const double null_ratio = null.i_central / peak.i_central;

  // Four-path model: every path carries i sqrt(TR) per pass, the central
  // window collects ss and ll with relative phase 2 alpha.
  const double tr = c.mz.coupler_ratio * (1.0 - c.mz.coupler_ratio);
  double model_err = 0.0;
  const double e_in = pulse.energy();
  for (const auto& row : rows) {
    const double model = c.backend.kind == BackendKind::Delay
                             ? 4.0 * tr * tr * e_in
                             : tr * tr * e_in * std::norm(1.0 + std::polar(1.0, 2.0 * row.alpha));
    model_err = std::max(model_err, std::abs(row.i_central - model) / (4.0 * tr * tr * e_in));
  }

  std::ostringstream table;
  table << "alpha,I_early,I_central,I_late\n" << std::setprecision(17);
  for (const auto& row : rows) table << row.alpha << ',' << row.i_early << ',' << row.i_central << ',' << row.i_late << '\n';
  r.artifacts.emplace_back("fringe.csv", table.str());
  r.artifacts.emplace_back("output_alpha0.csv", csv_of(peak.output));

  r.metrics["backend"] = to_string(c.backend.kind);
  r.metrics["delta_L"] = c.mz.delta_L;
  r.metrics["coupler_ratio"] = c.mz.coupler_ratio;
  r.metrics["visibility"] = fa.visibility;
  r.metrics["period"] = fa.period;
  r.metrics["central_spread"] = fa.central_spread;
  r.metrics["early_spread"] = fa.early_spread;
  r.metrics["late_spread"] = fa.late_spread;
  r.metrics["null_ratio"] = null_ratio;
  r.metrics["fringe_model_error"] = model_err;
  r.metrics["max_energy_error"] = *std::max_element(energy_err.begin(), energy_err.end());
  r.metrics["max_stray_fraction"] = *std::max_element(stray.begin(), stray.end());
  r.metrics["central_time"] = peak.central_time;

  check.at_least("visibility_min", "central fringe visibility", fa.visibility);
  check.at_most("period_tol", "|period - pi|", std::abs(fa.period - kPi));
  check.at_most("null_max", "I(pi/2) / I(0)", null_ratio);
  check.at_most("central_spread_max", "central intensity spread over alpha", fa.central_spread);
  check.at_most("side_spread_max", "early/late intensity spread over alpha", std::max(fa.early_spread, fa.late_spread));
  check.at_most("energy_tol", "energy balance over all ports", r.metrics["max_energy_error"].get<double>());
  check.at_most("fringe_model_tol", "central intensity vs four-path model", model_err);
  check.at_most("stray_max", "energy outside the three windows", r.metrics["max_stray_fraction"].get<double>());

  if (c.blocking) {
    // Long arm blocked on both passes leaves only ss in the centre; short arm
    // blocked on both passes leaves only ll. Single blocks remove one side pulse.
    auto run = [&](ArmMask p1, ArmMask p2) {
      DoublePassOptions o;
      o.first_pass = p1;
      o.second_pass = p2;
      MzConfig m = c.mz;
      return double_pass(pulse, m, memory, o);
    };
    const ArmMask no_long{true, false}, no_short{false, true}, open{};
    const DoublePassResult ss = run(no_long, no_long);
    const DoublePassResult ll = run(no_short, no_short);
    const DoublePassResult l1 = run(no_long, open);
    const DoublePassResult l2 = run(open, no_long);
    const double unit = tr * tr * e_in;
    const double ss_err = std::abs(ss.i_central - unit) / unit;
    const double ll_err = std::abs(ll.i_central - unit) / unit;
    // With both arms open at alpha = 0 the centre holds |ss + ll|^2 = 4 unit.
    const double sum_err = std::abs(peak.i_central - std::norm(std::sqrt(ss.i_central) + std::sqrt(ll.i_central))) / unit;
    r.metrics["blocking"] = {{"central_ss_only", ss.i_central},
                             {"central_ll_only", ll.i_central},
                             {"path_unit", unit},
                             {"first_long_blocked", {{"early", l1.i_early}, {"central", l1.i_central}, {"late", l1.i_late}}},
                             {"second_long_blocked", {{"early", l2.i_early}, {"central", l2.i_central}, {"late", l2.i_late}}}};
    if (c.backend.kind != BackendKind::Delay) {
      const double side_leak = std::max(l1.i_early, l2.i_late) / unit;
      const double worst = std::max({ss_err, ll_err, sum_err, side_leak});
      r.metrics["blocking_error"] = worst;
      check.at_most("blocking_tol", "ss/ll path attribution error", worst);
    } else {
      // A non-reversing delay sends ss early and ll late; the centre holds sl + ls.
      const double worst = std::max(ss.i_central, ll.i_central) / unit;
      r.metrics["blocking_error"] = worst;
      check.at_most("blocking_tol", "centre empty when only ss or ll survive", worst);
    }
  }
  return r;
}

// oracle-check ---------------------------------------------------------------------

struct ReversalCfg {
  MediumSpec medium;
  InputCfg input;
  ScheduleCfg schedule;
  OracleSpec oracle;
  std::vector<std::size_t> steps = {64, 128, 256};
  double broken_shift = 0.5;
};

ReversalCfg parse_reversal(const json& j, const std::string& where, const Context& ctx) {
  check_keys(j, where, {"medium", "input", "schedule", "oracle", "steps", "broken_mirror_shift"});
  ReversalCfg c;
  c.medium = parse_medium(section(j, "medium", where), where + ".medium");
  c.input = parse_input(section(j, "input", where), where + ".input", ctx.base);
  if (j.contains("schedule")) c.schedule = parse_schedule(j["schedule"], where + ".schedule");
  OracleSpec o;
  o.atoms = 24;
  c.oracle = j.contains("oracle") ? parse_oracle(j["oracle"], where + ".oracle", c.input.delta_omega, ctx.seed) : o;
  if (!j.contains("oracle") || !j["oracle"].contains("atoms")) c.oracle.atoms = 24;
  if (!j.contains("oracle") || !j["oracle"].contains("delta_omega")) c.oracle.delta_omega = c.input.delta_omega;
  if (j.contains("steps")) {
    c.steps.clear();
    for (double s : get_number_list(j, "steps", where)) {
      if (s < 1.0 || s != std::floor(s)) schema_error(where + ".steps", "expected positive integers");
      c.steps.push_back(static_cast<std::size_t>(s));
    }
    if (c.steps.empty()) schema_error(where + ".steps", "need at least one step count");
  }
  c.broken_shift = get_number(j, "broken_mirror_shift", where, c.broken_shift);
  return c;
}

struct ReversalOutcome {
  ReversalStudy study;
  double broken = 0.0;
  std::size_t modes = 0, atoms = 0;
};

ReversalOutcome run_reversal(const ReversalCfg& c, unsigned threads, std::vector<std::string>* warnings) {
  const SampledEnvelope input = make_input(c.input, warnings);
  const AtomicMedium m = build_medium(c.medium);
  ScheduleCfg sc = c.schedule;
  if (!sc.t1) sc.t1 = input.grid().t_end() + 3.0;
  const ProtocolSchedule sched = sc.resolve(input, m.length, default_solver().options);
  const DiscreteSystem sys = build_system(m, input, sched, c.oracle);
  ReversalOutcome out;
  out.modes = sys.n_modes();
  out.atoms = sys.n_atoms();
  out.study.runs.resize(c.steps.size());
  parallel_for(c.steps.size() + 1, threads, [&](std::size_t i) {
    if (i < c.steps.size()) {
      out.study.runs[i] = verify_reversal_identity(sys, sched, c.steps[i]);
    } else {
      ProtocolSchedule broken = sched;
      broken.t2 += c.broken_shift;
      out.broken = verify_reversal_identity(sys, broken, c.steps.front()).deviation;
    }
  });
  for (std::size_t k = 1; k < out.study.runs.size(); ++k) {
    const auto& a = out.study.runs[k - 1];
    const auto& b = out.study.runs[k];
    out.study.orders.push_back(std::log(a.deviation / b.deviation) /
                               std::log(static_cast<double>(b.steps) / static_cast<double>(a.steps)));
  }
  return out;
}

void report_reversal(const ReversalOutcome& o, ScenarioResult& r, Checker& check, const std::string& prefix) {
  ojson runs = ojson::array();
  std::ostringstream table;
  table << "steps,dt,deviation\n" << std::setprecision(17);
  bool decreasing = true;
  for (std::size_t k = 0; k < o.study.runs.size(); ++k) {
    const auto& run = o.study.runs[k];
    runs.push_back({{"steps", run.steps}, {"dt", run.step}, {"deviation", run.deviation}});
    table << run.steps << ',' << run.step << ',' << run.deviation << '\n';
    if (k > 0) decreasing = decreasing && run.deviation < o.study.runs[k - 1].deviation;
  }
  ojson rep = {{"modes", o.modes},
               {"atoms", o.atoms},
               {"runs", runs},
               {"measured_orders", o.study.orders},
               {"broken_mirror_deviation", o.broken},
               {"decreasing", decreasing}};
  r.metrics[prefix] = rep;
  r.artifacts.emplace_back(prefix + ".csv", table.str());
  check.at_most(prefix + "_first_max", "reversal deviation at " + std::to_string(o.study.runs.front().steps) + " steps",
                o.study.runs.front().deviation);
  check.at_most(prefix + "_last_max", "reversal deviation at " + std::to_string(o.study.runs.back().steps) + " steps",
                o.study.runs.back().deviation);
  check.holds(prefix + "_decreasing", "reversal deviation decreases with refinement", decreasing);
}

struct OracleCheckCfg {
  MediumSpec medium;
  ScheduleCfg schedule;
  InputCfg input;
  SolverCfg solver = default_solver();
  OracleSpec oracle;
  std::optional<ReversalCfg> reversal;
  AssertionSpec asserts;
};

OracleCheckCfg parse_oracle_check(const Context& ctx) {
  check_keys(ctx.root, "config", with_common({"medium", "schedule", "input", "solver", "oracle", "reversal"}));
  OracleCheckCfg c;
  c.medium = parse_medium(section(ctx.root, "medium", "config"), "medium");
  c.input = parse_input(section(ctx.root, "input", "config"), "input", ctx.base);
  if (ctx.root.contains("schedule")) c.schedule = parse_schedule(ctx.root["schedule"], "schedule");
  if (ctx.root.contains("solver")) c.solver = parse_solver(ctx.root["solver"], "solver");
  c.oracle = parse_oracle(section(ctx.root, "oracle", "config"), "oracle", c.input.delta_omega, ctx.seed);
  if (ctx.root.contains("reversal")) c.reversal = parse_reversal(ctx.root["reversal"], "reversal", ctx);
  c.asserts = parse_assertions(ctx.root, {{"norm_tol", 1e-10}, {"ledger_max", 1e-6}},
                               {"fidelity_min", "efficiency_tol", "reversal_first_max", "reversal_last_max",
                                "reversal_decreasing"});
  return c;
}

ScenarioResult run_oracle_check(const Context& ctx) {
  const OracleCheckCfg c = parse_oracle_check(ctx);
  select_simd(c.solver.simd);
  ScenarioResult r;
  r.scenario = "oracle-check";
  Checker check(r, c.asserts);
  const SampledEnvelope input = make_input(c.input, &r.warnings);
  const AtomicMedium m = build_medium(c.medium);
  const ProtocolSchedule sched = c.schedule.resolve(input, m.length, c.solver.options);
  const ProtocolReport rep = run_protocol(input, m, sched, c.solver.decoherence_rate, c.solver.options);
  const DiscreteSystem sys = build_system(m, input, sched, c.oracle);
  const OracleResult o = evolve(sys, sched, rep.echo.grid(), c.solver.decoherence_rate);
  const double fid = fidelity(rep.echo, o.echo);

  r.metrics["optical_depth"] = m.optical_depth;
  r.metrics["atoms"] = sys.n_atoms();
  r.metrics["modes"] = sys.n_modes();
  r.metrics["projection_loss"] = sys.projection_loss;
  r.metrics["solver_efficiency"] = rep.efficiency;
  r.metrics["oracle_efficiency"] = o.efficiency;
  r.metrics["efficiency_difference"] = std::abs(rep.efficiency - o.efficiency);
  r.metrics["echo_fidelity"] = fid;
  r.metrics["echo_overlap_phase"] = std::arg(overlap(rep.echo, o.echo));
  r.metrics["oracle_fidelity_vs_ideal"] = fidelity(rep.ideal, o.echo);
  r.metrics["solver_fidelity_vs_ideal"] = rep.fidelity_vs_ideal;
  r.metrics["oracle_transmitted_energy"] = o.transmitted.energy();
  r.metrics["solver_transmitted_energy"] = rep.transmitted.energy();
  r.metrics["oracle_max_norm_error"] = o.max_norm_error;
  r.metrics["solver_max_ledger_residual"] = rep.max_ledger_residual;
  ojson norms = ojson::array();
  for (const auto& n : o.norms) norms.push_back({{"stage", n.stage}, {"norm", n.norm}, {"expected", n.expected}});
  r.metrics["oracle_norms"] = norms;

  check.at_most("norm_tol", "oracle state norm error", o.max_norm_error);
  check.at_most("ledger_max", "solver energy ledger residual", rep.max_ledger_residual);
  check.at_least("fidelity_min", "oracle vs solver echo fidelity", fid);
  check.at_most("efficiency_tol", "oracle vs solver efficiency", std::abs(rep.efficiency - o.efficiency));

  r.artifacts.emplace_back("solver_echo.csv", csv_of(rep.echo));
  r.artifacts.emplace_back("oracle_echo.csv", csv_of(o.echo));
  r.artifacts.emplace_back("ledger.json", ledger_json(rep.energy_ledger).dump(2) + "\n");

  if (c.reversal) {
    const ReversalOutcome ro = run_reversal(*c.reversal, ctx.threads, &r.warnings);
    report_reversal(ro, r, check, "reversal");
  }
  return r;
}

// reversal-identity ------------------------------------------------------------------

ScenarioResult run_reversal_identity(const Context& ctx) {
  check_keys(ctx.root, "config",
             with_common({"medium", "input", "schedule", "oracle", "steps", "broken_mirror_shift"}));
  json body = json::object();
  for (const auto& key : {"medium", "input", "schedule", "oracle", "steps", "broken_mirror_shift"})
    if (ctx.root.contains(key)) body[key] = ctx.root[key];
  const ReversalCfg c = parse_reversal(body, "config", ctx);
  const AssertionSpec asserts = parse_assertions(ctx.root, {{"reversal_decreasing", 1.0}},
                                                 {"reversal_first_max", "reversal_last_max"});
  ScenarioResult r;
  r.scenario = "reversal-identity";
  Checker check(r, asserts);
  report_reversal(run_reversal(c, ctx.threads, &r.warnings), r, check, "reversal");
  return r;
}

using Runner = ScenarioResult (*)(const Context&);
using Validator = void (*)(const Context&);

struct ScenarioEntry {
  Runner run;
  Validator validate;
};

const std::map<std::string, ScenarioEntry>& registry() {
  static const std::map<std::string, ScenarioEntry> r = {
      {"ideal-map", {run_ideal_map, [](const Context& c) { parse_ideal_map(c); }}},
      {"crib-run", {run_crib_run, [](const Context& c) { parse_crib_run(c); }}},
      {"depth-sweep", {run_depth_sweep, [](const Context& c) { parse_depth_sweep(c); }}},
      {"timebin", {run_timebin, [](const Context& c) { parse_timebin(c); }}},
      {"interferometer", {run_interferometer, [](const Context& c) { parse_interferometer(c); }}},
      {"oracle-check", {run_oracle_check, [](const Context& c) { parse_oracle_check(c); }}},
      {"reversal-identity",
       {run_reversal_identity,
        [](const Context& c) {
          check_keys(c.root, "config",
                     with_common({"medium", "input", "schedule", "oracle", "steps", "broken_mirror_shift"}));
          json body = json::object();
          for (const auto& key : {"medium", "input", "schedule", "oracle", "steps", "broken_mirror_shift"})
            if (c.root.contains(key)) body[key] = c.root[key];
          parse_reversal(body, "config", c);
          parse_assertions(c.root, {{"reversal_decreasing", 1.0}}, {"reversal_first_max", "reversal_last_max"});
        }}},
  };
  return r;
}

Context make_context(const json& config, unsigned threads, const std::filesystem::path& base) {
  require_object(config, "config");
  if (!config.contains("scenario") || !config["scenario"].is_string())
    schema_error("config", "missing string field 'scenario'");
  if (config.contains("output_dir") && !config["output_dir"].is_string())
    schema_error("config.output_dir", "expected a string");
  if (config.contains("description") && !config["description"].is_string())
    schema_error("config.description", "expected a string");
  std::uint64_t seed = get_count(config, "seed", "config", 1);
  unsigned t = threads;
  if (config.contains("threads")) t = static_cast<unsigned>(std::max<std::size_t>(1, get_count(config, "threads", "config", 1)));
  return Context{config, base, seed, std::max(1u, t)};
}

const ScenarioEntry& entry_for(const json& config) {
  const std::string name = config["scenario"].get<std::string>();
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) schema_error("config.scenario", "unknown scenario '" + name + "'");
  return it->second;
}

}  // namespace

bool ScenarioResult::passed() const noexcept {
  return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.pass; });
}

ojson ScenarioResult::summary() const {
  ojson s;
  s["scenario"] = scenario;
  s["status"] = passed() ? "PASS" : "FAIL";
  s["metrics"] = metrics;
  ojson block = ojson::array();
  for (const auto& a : assertions)
    block.push_back({{"name", a.name}, {"value", a.value}, {"op", a.op}, {"threshold", a.threshold},
                     {"result", a.pass ? "PASS" : "FAIL"}});
  s["assertions"] = block;
  s["warnings"] = warnings;
  return s;
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Schema, "cannot read config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, path.string() + ": " + e.what());
  }
}

void validate_config(const json& config) {
  try {
    const Context ctx = make_context(config, 1, {});
    entry_for(config).validate(ctx);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, e.what());
  }
}

ScenarioResult run_scenario(const json& config, unsigned threads, const std::filesystem::path& base_dir) {
  auto checked = [&] {
    try {
      Context c = make_context(config, threads, base_dir);
      entry_for(config).validate(c);
      return c;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Schema, e.what());
    }
  };
  const Context ctx = checked();
  const ScenarioEntry* entry = &entry_for(config);
  ScenarioResult r = entry->run(ctx);
  r.metrics["seed"] = ctx.seed;
  r.metrics["threads"] = ctx.threads;
  return r;
}

std::filesystem::path resolve_output_dir(const json& config, const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (config.is_object() && config.contains("output_dir") && config["output_dir"].is_string())
    return config["output_dir"].get<std::string>();
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "crib_out";
}

void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / name).string());
    out << content;
  };
  for (const auto& [name, content] : result.artifacts) put(name, content);
  put("summary.json", result.summary().dump(2) + "\n");
}

CompareReport compare_traces(const SampledEnvelope& a, const SampledEnvelope& b, double tolerance) {
  const double lo = std::max(a.t_start(), b.t_start());
  const double hi = std::min(a.grid().t_end(), b.grid().t_end());
  if (hi < lo) throw Error(ErrorKind::InvalidArgument, "traces share no time range");
  const double ratio = a.dt() / b.dt();
  if (ratio > 4.0 || ratio < 0.25) throw Error(ErrorKind::InvalidArgument, "time steps differ by more than 4x");
  CompareReport rep;
  rep.tolerance = tolerance;
  rep.fidelity = fidelity(a, b);
  const SampledEnvelope bb = on_grid(b, a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(a[i] - bb[i]));
  rep.overlap_phase = std::arg(overlap(a, b));
  rep.pass = 1.0 - rep.fidelity <= tolerance;
  return rep;
}

}  // namespace crib
