#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "crib/envelope.hpp"
#include "crib/error.hpp"

namespace crib {

void write_csv(const SampledEnvelope& env, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << "t,re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < env.size(); ++i)
    out << env.time(i) << ',' << env[i].real() << ',' << env[i].imag() << '\n';
  out.flags(flags);
  out.precision(precision);
}

void write_csv(const SampledEnvelope& env, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_csv(env, out);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

SampledEnvelope read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,re,im") throw Error(ErrorKind::Io, path.string() + ": expected header 't,re,im'");

  std::vector<double> times;
  std::vector<cplx> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    double t = 0.0, re = 0.0, im = 0.0;
    char c1 = 0, c2 = 0;
    if (!(row >> t >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": malformed row");
    times.push_back(t);
    samples.emplace_back(re, im);
  }
  if (times.size() < 2) throw Error(ErrorKind::Io, path.string() + ": need at least two rows");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt)
      throw Error(ErrorKind::Io, path.string() + ": time column is not uniform");
  }
  return SampledEnvelope(TimeGrid{times.front(), dt, samples.size()}, std::move(samples));
}

}  // namespace crib
