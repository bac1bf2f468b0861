#include <atomic>
#include <cstdlib>
#include <string>

#include "crib/error.hpp"
#include "crib/simd/kernels.hpp"

namespace crib::simd {

#if defined(CRIB_HAVE_AVX2)
const KernelTable& avx2_kernels_table() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(CRIB_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernels_table() : nullptr;
#else
  return nullptr;
#endif
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  throw Error(ErrorKind::InvalidArgument, "unknown SIMD backend '" + std::string(name) + "'");
}

namespace {

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("CRIB_SIMD");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return &scalar_kernels();
  if (const KernelTable* wide = avx2_kernels()) return wide;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& kernels() noexcept { return *active().load(std::memory_order_acquire); }

bool select_backend(Backend backend) noexcept {
  const KernelTable* table = backend == Backend::Scalar ? &scalar_kernels() : avx2_kernels();
  if (!table) return false;
  active().store(table, std::memory_order_release);
  return true;
}

}  // namespace crib::simd
