#include <immintrin.h>

#include "crib/simd/kernels.hpp"

namespace crib::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cplx weighted_rotated_sum(const double* sr, const double* si, const double* hc, const double* hs,
                          const double* w, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d vr = _mm256_loadu_pd(sr + k);
    const __m256d vi = _mm256_loadu_pd(si + k);
    const __m256d c = _mm256_loadu_pd(hc + k);
    const __m256d s = _mm256_loadu_pd(hs + k);
    const __m256d vw = _mm256_loadu_pd(w + k);
    const __m256d ar = _mm256_fmsub_pd(c, vr, _mm256_mul_pd(s, vi));
    const __m256d ai = _mm256_fmadd_pd(c, vi, _mm256_mul_pd(s, vr));
    acc_re = _mm256_fmadd_pd(vw, ar, acc_re);
    acc_im = _mm256_fmadd_pd(vw, ai, acc_im);
  }
  double re = hsum(acc_re);
  double im = hsum(acc_im);
  for (; k < n; ++k) {
    re += w[k] * (hc[k] * sr[k] - hs[k] * si[k]);
    im += w[k] * (hc[k] * si[k] + hs[k] * sr[k]);
  }
  return {re, im};
}

void rotate_drive(double* sr, double* si, const double* rc, const double* rs, const double* hc,
                  const double* hs, cplx drive, std::size_t n) {
  const double dr = drive.real();
  const double di = drive.imag();
  const __m256d vdr = _mm256_set1_pd(dr);
  const __m256d vdi = _mm256_set1_pd(di);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d vr = _mm256_loadu_pd(sr + k);
    const __m256d vi = _mm256_loadu_pd(si + k);
    const __m256d c = _mm256_loadu_pd(rc + k);
    const __m256d s = _mm256_loadu_pd(rs + k);
    const __m256d h_c = _mm256_loadu_pd(hc + k);
    const __m256d h_s = _mm256_loadu_pd(hs + k);
    const __m256d drv_r = _mm256_fmsub_pd(vdr, h_c, _mm256_mul_pd(vdi, h_s));
    const __m256d drv_i = _mm256_fmadd_pd(vdr, h_s, _mm256_mul_pd(vdi, h_c));
    const __m256d xr = _mm256_add_pd(_mm256_fmsub_pd(c, vr, _mm256_mul_pd(s, vi)), drv_r);
    const __m256d xi = _mm256_add_pd(_mm256_fmadd_pd(c, vi, _mm256_mul_pd(s, vr)), drv_i);
    _mm256_storeu_pd(sr + k, xr);
    _mm256_storeu_pd(si + k, xi);
  }
  for (; k < n; ++k) {
    const double xr = rc[k] * sr[k] - rs[k] * si[k] + (dr * hc[k] - di * hs[k]);
    const double xi = rc[k] * si[k] + rs[k] * sr[k] + (dr * hs[k] + di * hc[k]);
    sr[k] = xr;
    si[k] = xi;
  }
}

void rotate(double* sr, double* si, const double* rc, const double* rs, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d vr = _mm256_loadu_pd(sr + k);
    const __m256d vi = _mm256_loadu_pd(si + k);
    const __m256d c = _mm256_loadu_pd(rc + k);
    const __m256d s = _mm256_loadu_pd(rs + k);
    _mm256_storeu_pd(sr + k, _mm256_fmsub_pd(c, vr, _mm256_mul_pd(s, vi)));
    _mm256_storeu_pd(si + k, _mm256_fmadd_pd(c, vi, _mm256_mul_pd(s, vr)));
  }
  for (; k < n; ++k) {
    const double xr = rc[k] * sr[k] - rs[k] * si[k];
    const double xi = rc[k] * si[k] + rs[k] * sr[k];
    sr[k] = xr;
    si[k] = xi;
  }
}

double weighted_norm(const double* sr, const double* si, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d vr = _mm256_loadu_pd(sr + k);
    const __m256d vi = _mm256_loadu_pd(si + k);
    const __m256d m = _mm256_fmadd_pd(vr, vr, _mm256_mul_pd(vi, vi));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + k), m, acc);
  }
  double out = hsum(acc);
  for (; k < n; ++k) out += w[k] * (sr[k] * sr[k] + si[k] * si[k]);
  return out;
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    const __m256d vb_swap = _mm256_permute_pd(vb, 0b0101);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, vb_swap, acc_im);
  }
  double re = hsum(acc_re);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc_im);
  double im = (lanes[0] - lanes[1]) + (lanes[2] - lanes[3]);
  for (; k < n; ++k) {
    re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
    im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
  }
  return {re, im};
}

double norm2(const cplx* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  double out = hsum(acc);
  for (; k < n; ++k) out += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  return out;
}

}  // namespace

const KernelTable& avx2_kernels_table() noexcept {
  static const KernelTable table{Backend::Avx2, "avx2", weighted_rotated_sum, rotate_drive,
                                 rotate,        weighted_norm, dot_conj,    norm2};
  return table;
}

}  // namespace crib::simd
