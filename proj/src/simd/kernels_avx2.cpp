// Compiled with -mavx2 -mfma. Only reached after a CPUID check, so nothing in
// this translation unit may be inlined into generic code: no Eigen, no
// headers with inline functions that other TUs instantiate.

#include <immintrin.h>

#include "curvlab/simd.hpp"

namespace curvlab::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x,
                 double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

// 1x4 micro-kernel: one row of A against four rows at once, so each load of
// the left row is reused four times.
void gram_avx2(const double* a, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ai = a + i * cols;
    std::size_t j = i;
    for (; j + 4 <= rows; j += 4) {
      const double* b0 = a + j * cols;
      const double* b1 = b0 + cols;
      const double* b2 = b1 + cols;
      const double* b3 = b2 + cols;
      __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
      std::size_t k = 0;
      for (; k + 4 <= cols; k += 4) {
        const __m256d va = _mm256_loadu_pd(ai + k);
        s0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + k), s0);
        s1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + k), s1);
        s2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + k), s2);
        s3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + k), s3);
      }
      double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
      for (; k < cols; ++k) {
        r0 += ai[k] * b0[k];
        r1 += ai[k] * b1[k];
        r2 += ai[k] * b2[k];
        r3 += ai[k] * b3[k];
      }
      const double r[4] = {r0, r1, r2, r3};
      for (std::size_t q = 0; q < 4; ++q) {
        out[i * rows + j + q] = r[q];
        out[(j + q) * rows + i] = r[q];
      }
    }
    for (; j < rows; ++j) {
      const double v = dot_avx2(ai, a + j * cols, cols);
      out[i * rows + j] = v;
      out[j * rows + i] = v;
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, matvec_avx2, gram_avx2};
  return table;
}

}  // namespace curvlab::simd
