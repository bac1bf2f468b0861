#include "crib/simd/kernels.hpp"

namespace crib::simd {
namespace {

cplx weighted_rotated_sum(const double* sr, const double* si, const double* hc, const double* hs,
                          const double* w, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = hc[k] * sr[k] - hs[k] * si[k];
    const double ai = hc[k] * si[k] + hs[k] * sr[k];
    re += w[k] * ar;
    im += w[k] * ai;
  }
  return {re, im};
}

void rotate_drive(double* sr, double* si, const double* rc, const double* rs, const double* hc,
                  const double* hs, cplx drive, std::size_t n) {
  const double dr = drive.real();
  const double di = drive.imag();
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = rc[k] * sr[k] - rs[k] * si[k] + (dr * hc[k] - di * hs[k]);
    const double xi = rc[k] * si[k] + rs[k] * sr[k] + (dr * hs[k] + di * hc[k]);
    sr[k] = xr;
    si[k] = xi;
  }
}

void rotate(double* sr, double* si, const double* rc, const double* rs, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = rc[k] * sr[k] - rs[k] * si[k];
    const double xi = rc[k] * si[k] + rs[k] * sr[k];
    sr[k] = xr;
    si[k] = xi;
  }
}

double weighted_norm(const double* sr, const double* si, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += w[k] * (sr[k] * sr[k] + si[k] * si[k]);
  return acc;
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
    im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
  }
  return {re, im};
}

double norm2(const cplx* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Backend::Scalar, "scalar", weighted_rotated_sum, rotate_drive,
                                 rotate,          weighted_norm, dot_conj,     norm2};
  return table;
}

}  // namespace crib::simd
