#pragma once

// Data-parallel inner loops of the propagation solver and the envelope
// algebra. Every kernel has a scalar reference implementation; wider variants
// are selected at runtime and must agree with the reference to rounding.

#include <complex>
#include <cstddef>
#include <string_view>

namespace crib::simd {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;
  const char* name;

  /// sum_k w[k] * (h[k] * s[k]) with h = hc + i*hs and s = sr + i*si (split storage).
  cplx (*weighted_rotated_sum)(const double* sr, const double* si, const double* hc,
                               const double* hs, const double* w, std::size_t n);

  /// s[k] <- r[k] * s[k] + drive * h[k]
  void (*rotate_drive)(double* sr, double* si, const double* rc, const double* rs,
                       const double* hc, const double* hs, cplx drive, std::size_t n);

  /// s[k] <- r[k] * s[k]
  void (*rotate)(double* sr, double* si, const double* rc, const double* rs, std::size_t n);

  /// sum_k w[k] * |s[k]|^2
  double (*weighted_norm)(const double* sr, const double* si, const double* w, std::size_t n);

  /// sum_k conj(a[k]) * b[k]
  cplx (*dot_conj)(const cplx* a, const cplx* b, std::size_t n);

  /// sum_k |a[k]|^2
  double (*norm2)(const cplx* a, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the binary or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels() noexcept;

/// Active table. Chosen once from CPU features; CRIB_SIMD=scalar|avx2|auto overrides.
const KernelTable& kernels() noexcept;

/// Forces a backend for the remainder of the process. Returns false if unavailable.
bool select_backend(Backend backend) noexcept;

Backend parse_backend(std::string_view name);

}  // namespace crib::simd
