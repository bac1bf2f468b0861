#include "crib/medium.hpp"

#include <algorithm>
#include <cmath>

#include "crib/error.hpp"
#include "crib/simd/kernels.hpp"

namespace crib {

namespace {
constexpr double kPi = 3.14159265358979323846;

double raw_density(Profile profile, double delta,
                   const std::vector<std::pair<double, double>>& table) noexcept {
  switch (profile) {
    case Profile::Gaussian: return std::exp(-0.5 * delta * delta) / std::sqrt(2.0 * kPi);
    case Profile::Lorentzian: return 1.0 / (kPi * (1.0 + delta * delta));
    case Profile::Custom: {
      if (table.empty() || delta < table.front().first || delta > table.back().first) return 0.0;
      auto hi = std::lower_bound(table.begin(), table.end(), delta,
                                 [](const auto& row, double x) { return row.first < x; });
      if (hi == table.begin()) return hi->second;
      auto lo = std::prev(hi);
      const double span = hi->first - lo->first;
      if (span <= 0.0) return lo->second;
      const double f = (delta - lo->first) / span;
      return lo->second * (1.0 - f) + hi->second * f;
    }
  }
  return 0.0;
}
}  // namespace

Profile parse_profile(const std::string& name) {
  if (name == "gaussian") return Profile::Gaussian;
  if (name == "lorentzian") return Profile::Lorentzian;
  if (name == "custom") return Profile::Custom;
  throw Error(ErrorKind::InvalidArgument, "unknown profile '" + name + "'");
}

const char* to_string(Profile profile) noexcept {
  switch (profile) {
    case Profile::Gaussian: return "gaussian";
    case Profile::Lorentzian: return "lorentzian";
    case Profile::Custom: return "custom";
  }
  return "?";
}

double AtomicMedium::coupling() const noexcept { return std::sqrt(beta_cal / length); }

double AtomicMedium::max_abs_detuning() const noexcept {
  double m = 0.0;
  for (double d : detunings) m = std::max(m, std::abs(d));
  return m;
}

double AtomicMedium::density(double delta) const noexcept {
  if (profile != Profile::Custom && std::abs(delta) > span + 1e-12) return 0.0;
  return raw_density(profile, delta, custom_table) / profile_norm;
}

double AtomicMedium::depth_at(double omega) const noexcept {
  if (density_at_zero <= 0.0) return 0.0;
  return optical_depth * density(omega) / density_at_zero;
}

AtomicMedium build_medium(const MediumSpec& spec) {
  if (!(spec.optical_depth >= 0.0) || !std::isfinite(spec.optical_depth))
    throw Error(ErrorKind::InvalidArgument, "optical depth must be finite and >= 0");
  if (spec.nz < 2) throw Error(ErrorKind::InvalidArgument, "nz must be >= 2");
  if (!(spec.length > 0.0)) throw Error(ErrorKind::InvalidArgument, "medium length must be > 0");

  AtomicMedium m;
  m.profile = spec.profile;
  m.optical_depth = spec.optical_depth;
  m.length = spec.length;
  m.nz = spec.nz;
  m.omega21_mismatch = spec.omega21_mismatch;

  std::vector<double> raw;
  if (spec.profile == Profile::Custom) {
    const auto& table = spec.custom_table;
    if (table.size() < 2) throw Error(ErrorKind::InvalidArgument, "custom profile needs >= 2 rows");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!std::isfinite(table[i].first) || !std::isfinite(table[i].second) || table[i].second < 0.0)
        throw Error(ErrorKind::InvalidArgument, "custom profile values must be finite and >= 0");
      if (i > 0 && !(table[i].first > table[i - 1].first))
        throw Error(ErrorKind::InvalidArgument, "custom profile detunings must ascend strictly");
    }
    m.custom_table = table;
    m.span = std::max(std::abs(table.front().first), std::abs(table.back().first));
    double total = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double left = i > 0 ? table[i].first - table[i - 1].first : 0.0;
      const double right = i + 1 < table.size() ? table[i + 1].first - table[i].first : 0.0;
      const double width = 0.5 * (left + right);
      m.detunings.push_back(table[i].first);
      raw.push_back(table[i].second * width);
      total += table[i].second * width;
    }
    if (!(total > 0.0) || !std::isfinite(total))
      throw Error(ErrorKind::InvalidArgument, "custom profile is not normalisable");
    m.profile_norm = total;
  } else {
    const double min_span = spec.profile == Profile::Gaussian ? 4.0 : 20.0;
    if (spec.span < min_span)
      throw Error(ErrorKind::InvalidArgument, std::string(to_string(spec.profile)) + " span must be >= " +
                                                  std::to_string(min_span));
    if (spec.n_detunings < 16) throw Error(ErrorKind::InvalidArgument, "need at least 16 detuning nodes");
    m.span = spec.span;
    const std::size_t n = spec.n_detunings;
    const double h = 2.0 * spec.span / static_cast<double>(n - 1);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      // Mirror the lower half so the grid is exactly symmetric.
      const double delta = k < n / 2 ? -spec.span + h * static_cast<double>(k)
                                     : spec.span - h * static_cast<double>(n - 1 - k);
      const double v = raw_density(spec.profile, delta, {}) * h;
      m.detunings.push_back(delta);
      raw.push_back(v);
      total += v;
    }
    m.profile_norm = total;
  }

  // Compensated normalisation keeps sum(w) == 1 to rounding.
  m.weights.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) m.weights[k] = raw[k] / m.profile_norm;
  double s = 0.0;
  for (double w : m.weights) s += w;
  for (double& w : m.weights) w /= s;

  m.density_at_zero = raw_density(m.profile, 0.0, m.custom_table) / m.profile_norm;
  if (m.optical_depth > 0.0 && !(m.density_at_zero > 0.0))
    throw Error(ErrorKind::InvalidArgument, "profile density vanishes at zero detuning");
  m.beta_cal = m.density_at_zero > 0.0 ? m.optical_depth / (2.0 * kPi * m.density_at_zero) : 0.0;
  return m;
}

AtomicMedium invert_detunings(const AtomicMedium& medium) {
  AtomicMedium out = medium;
  for (double& d : out.detunings) d = -d;
  out.inverted = !medium.inverted;
  return out;
}

CoherenceField CoherenceField::zeros(const AtomicMedium& medium, double frame_origin, double frame_slope) {
  CoherenceField f;
  f.cells = medium.cells();
  f.n_detunings = medium.n_detunings();
  f.dz = medium.dz();
  f.re.assign(f.cells * f.n_detunings, 0.0);
  f.im.assign(f.cells * f.n_detunings, 0.0);
  f.frame_origin = frame_origin;
  f.frame_slope = frame_slope;
  return f;
}

double CoherenceField::excitation_norm(const std::vector<double>& weights) const {
  if (weights.size() != n_detunings) throw Error(ErrorKind::InvalidArgument, "weight count mismatch");
  const auto& k = simd::kernels();
  double acc = 0.0;
  for (std::size_t c = 0; c < cells; ++c)
    acc += k.weighted_norm(re.data() + c * n_detunings, im.data() + c * n_detunings, weights.data(), n_detunings);
  return acc * dz;
}

}  // namespace crib
