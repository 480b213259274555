#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense inner-loop kernels used by the curvature algebra. Every kernel has a
// portable scalar reference and, on x86-64, an AVX2/FMA variant. The variant
// is picked once at startup from CPUID; CURVLAB_SIMD=scalar|avx2 overrides.

namespace curvlab::simd {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A row-major rows x cols.
  void (*matvec)(const double* a, std::size_t rows, std::size_t cols, const double* x,
                 double* y);
  // out = A A^T, A row-major rows x cols, out row-major rows x rows.
  void (*gram)(const double* a, std::size_t rows, std::size_t cols, double* out);
};

const KernelTable& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

// The table in use for this process.
const KernelTable& active();
// Force a table by name ("scalar" or "avx2"); returns false if unavailable.
bool select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace curvlab::simd
