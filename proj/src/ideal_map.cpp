#include "crib/ideal_map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "crib/error.hpp"

namespace crib {

SampledEnvelope ideal_retrieve_envelope(const SampledEnvelope& input, double chi12, double t_prime) {
  const double pivot = 0.5 * (input.t_start() + t_prime);
  return time_reverse(input, pivot).scaled(std::polar(1.0, -chi12));
}

std::size_t NPhotonAmplitude::element_count() const noexcept {
  std::size_t count = 1;
  for (int k = 0; k < n; ++k) count *= grid.size;
  return count;
}

double NPhotonAmplitude::norm() const noexcept {
  double acc = 0.0;
  for (const cplx& v : values) acc += std::norm(v);
  return std::norm(vacuum) + acc * std::pow(grid.dt, n);
}

namespace {

using Index = std::array<std::size_t, NPhotonAmplitude::kMaxPhotons>;

Index unravel(std::size_t flat, int n, std::size_t m) {
  Index idx{};
  for (int k = n - 1; k >= 0; --k) {
    idx[static_cast<std::size_t>(k)] = flat % m;
    flat /= m;
  }
  return idx;
}

std::size_t ravel(const Index& idx, int n, std::size_t m) {
  std::size_t flat = 0;
  for (int k = 0; k < n; ++k) flat = flat * m + idx[static_cast<std::size_t>(k)];
  return flat;
}

}  // namespace

double NPhotonAmplitude::max_asymmetry() const {
  double worst = 0.0;
  const std::size_t m = grid.size;
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const Index idx = unravel(flat, n, m);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        Index swapped = idx;
        std::swap(swapped[static_cast<std::size_t>(a)], swapped[static_cast<std::size_t>(b)]);
        worst = std::max(worst, std::abs(values[flat] - values[ravel(swapped, n, m)]));
      }
    }
  }
  return worst;
}

void NPhotonAmplitude::validate() const {
  if (n < 1 || n > kMaxPhotons)
    throw Error(ErrorKind::SizeLimit, "photon number must be in [1, 3], got " + std::to_string(n));
  if (grid.size == 0 || grid.size > kMaxGrid)
    throw Error(ErrorKind::SizeLimit, "per-axis grid must hold 1..128 points");
  if (values.size() != element_count())
    throw Error(ErrorKind::InvalidArgument, "tensor payload does not match grid^n");
  if (max_asymmetry() > 1e-10) throw Error(ErrorKind::InvalidArgument, "n-photon amplitude is not symmetric");
  if (std::abs(norm() - 1.0) > 1e-8)
    throw Error(ErrorKind::InvalidArgument, "state norm " + std::to_string(norm()) + " != 1");
}

NPhotonAmplitude NPhotonAmplitude::symmetrized_product(const std::vector<SampledEnvelope>& factors,
                                                       cplx vacuum) {
  if (factors.empty() || factors.size() > static_cast<std::size_t>(kMaxPhotons))
    throw Error(ErrorKind::SizeLimit, "need 1..3 factors");
  NPhotonAmplitude state;
  state.n = static_cast<int>(factors.size());
  state.grid = factors.front().grid();
  if (state.grid.size > kMaxGrid) throw Error(ErrorKind::SizeLimit, "per-axis grid exceeds 128 points");
  std::vector<SampledEnvelope> aligned;
  for (const auto& f : factors) aligned.push_back(on_grid(f, state.grid));

  const std::size_t m = state.grid.size;
  state.values.assign(state.element_count(), cplx{});
  std::vector<int> perm(factors.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::size_t flat = 0; flat < state.values.size(); ++flat) {
      const Index idx = unravel(flat, state.n, m);
      cplx term{1.0, 0.0};
      for (int k = 0; k < state.n; ++k)
        term *= aligned[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])][idx[static_cast<std::size_t>(k)]];
      state.values[flat] += term;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  double block = 0.0;
  for (const cplx& v : state.values) block += std::norm(v);
  block *= std::pow(state.grid.dt, state.n);
  if (!(block > 0.0)) throw Error(ErrorKind::Degenerate, "symmetrised product vanishes");
  const double target = 1.0 - std::norm(vacuum);
  if (target < 0.0) throw Error(ErrorKind::InvalidArgument, "|vacuum| > 1");
  const double scale = std::sqrt(target / block);
  for (cplx& v : state.values) v *= scale;
  state.vacuum = vacuum;
  return state;
}

NPhotonAmplitude ideal_retrieve_nphoton(const NPhotonAmplitude& state, double chi12, double t_prime) {
  state.validate();
  NPhotonAmplitude out;
  out.n = state.n;
  out.vacuum = state.vacuum;
  out.grid = state.grid;
  out.grid.t_start = state.grid.t_start + t_prime - state.grid.t_end();
  const cplx phase = std::polar(1.0, -chi12 * state.n);
  const std::size_t m = state.grid.size;
  out.values.resize(state.values.size());
  for (std::size_t flat = 0; flat < state.values.size(); ++flat) {
    Index idx = unravel(flat, state.n, m);
    for (int k = 0; k < state.n; ++k) idx[static_cast<std::size_t>(k)] = m - 1 - idx[static_cast<std::size_t>(k)];
    out.values[ravel(idx, state.n, m)] = phase * state.values[flat];
  }
  return out;
}

void write_nphoton(const NPhotonAmplitude& state, const std::filesystem::path& stem) {
  std::filesystem::path header = stem;
  header += ".json";
  std::filesystem::path payload = stem;
  payload += ".csv";
  nlohmann::json doc = {
      {"n", state.n},
      {"grid", {{"t_start", state.grid.t_start}, {"dt", state.grid.dt}, {"size", state.grid.size}}},
      {"vacuum", {state.vacuum.real(), state.vacuum.imag()}},
      {"layout", "row-major, first argument slowest"},
      {"payload", payload.filename().string()},
  };
  std::ofstream h(header);
  if (!h) throw Error(ErrorKind::Io, "cannot write " + header.string());
  h << std::setw(2) << doc << '\n';
  std::ofstream p(payload);
  if (!p) throw Error(ErrorKind::Io, "cannot write " + payload.string());
  p << "re,im\n" << std::setprecision(17);
  for (const cplx& v : state.values) p << v.real() << ',' << v.imag() << '\n';
}

NPhotonAmplitude read_nphoton(const std::filesystem::path& stem) {
  std::filesystem::path header = stem;
  header += ".json";
  std::ifstream h(header);
  if (!h) throw Error(ErrorKind::Io, "cannot open " + header.string());
  nlohmann::json doc;
  try {
    h >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, header.string() + ": " + e.what());
  }
  NPhotonAmplitude state;
  try {
    state.n = doc.at("n").get<int>();
    state.grid.t_start = doc.at("grid").at("t_start").get<double>();
    state.grid.dt = doc.at("grid").at("dt").get<double>();
    state.grid.size = doc.at("grid").at("size").get<std::size_t>();
    state.vacuum = {doc.at("vacuum").at(0).get<double>(), doc.at("vacuum").at(1).get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, header.string() + ": " + e.what());
  }
  const std::filesystem::path payload = header.parent_path() / doc.value("payload", stem.filename().string() + ".csv");
  std::ifstream p(payload);
  if (!p) throw Error(ErrorKind::Io, "cannot open " + payload.string());
  std::string line;
  std::getline(p, line);
  while (std::getline(p, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(row >> re >> comma >> im) || comma != ',') throw Error(ErrorKind::Io, payload.string() + ": malformed row");
    state.values.emplace_back(re, im);
  }
  if (state.values.size() != state.element_count())
    throw Error(ErrorKind::Io, payload.string() + ": payload size does not match header");
  return state;
}

}  // namespace crib
