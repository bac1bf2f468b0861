#include "crib/schedule.hpp"

#include <cmath>
#include <string>

#include "crib/error.hpp"

namespace crib {

ProtocolSchedule ProtocolSchedule::mirrored(double t1, double storage, double xi1, double xi2,
                                            double omega32) {
  ProtocolSchedule s;
  s.t1 = t1;
  s.t2 = t1 + storage;
  s.t_inv = 0.5 * (s.t1 + s.t2);
  s.xi1 = xi1;
  s.xi2 = xi2;
  s.omega32 = omega32;
  return s;
}

void ProtocolSchedule::validate() const {
  if (!std::isfinite(t1) || !std::isfinite(t_inv) || !std::isfinite(t2))
    throw Error(ErrorKind::Schedule, "event times must be finite");
  if (!(t1 < t_inv && t_inv < t2))
    throw Error(ErrorKind::Schedule, "need t1 < t_inv < t2");
  const double mismatch = t2 - (2.0 * t_inv - t1);
  if (std::abs(mismatch) > 1e-9 * std::max(1.0, std::abs(t2)))
    throw Error(ErrorKind::Schedule, "t2 must equal 2 t_inv - t1 (off by " + std::to_string(mismatch) + ")");
}

}  // namespace crib
