// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "cellperm/simd.hpp"

namespace cellperm::simd::detail {
namespace {

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Complex product of interleaved pairs: [vr vi] * [xr xi].
inline __m256d cmul(__m256d v, __m256d x) {
  const __m256d vr = _mm256_movedup_pd(v);
  const __m256d vi = _mm256_permute_pd(v, 0xF);
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(vr, x, _mm256_mul_pd(vi, xs));
}

inline __m256d load2(const cplx* x, int c0, int c1) {
  return _mm256_insertf128_pd(_mm256_castpd128_pd256(_mm_loadu_pd(raw(x + c0))),
                              _mm_loadu_pd(raw(x + c1)), 1);
}

cplx dot_conj_avx2(const cplx* x, const cplx* y, std::size_t n) {
  __m256d s_re = _mm256_setzero_pd();
  __m256d s_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(raw(x + i));
    const __m256d yv = _mm256_loadu_pd(raw(y + i));
    s_re = _mm256_fmadd_pd(xv, yv, s_re);
    s_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), s_im);
  }
  // s_im lanes hold [a d, b c, ...]; imaginary part is a d - b c.
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  double re = hsum(s_re);
  double im = hsum(_mm256_mul_pd(s_im, sign));
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double norm_sq_avx2(const cplx* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(raw(x + i));
    s = _mm256_fmadd_pd(v, v, s);
  }
  double out = hsum(s);
  for (; i < n; ++i) out += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return out;
}

void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(raw(x + i));
    const __m256d yv = _mm256_loadu_pd(raw(y + i));
    _mm256_storeu_pd(raw(y + i), _mm256_add_pd(yv, cmul(av, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void spmv_real_avx2(int rows, const int* row_ptr, const int* col, const double* val,
                    const cplx* x, cplx* y) {
  for (int r = 0; r < rows; ++r) {
    __m256d acc = _mm256_setzero_pd();
    int k = row_ptr[r];
    const int end = row_ptr[r + 1];
    for (; k + 2 <= end; k += 2) {
      const __m256d v = _mm256_setr_pd(val[k], val[k], val[k + 1], val[k + 1]);
      acc = _mm256_fmadd_pd(v, load2(x, col[k], col[k + 1]), acc);
    }
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    if (k < end) s = _mm_fmadd_pd(_mm_set1_pd(val[k]), _mm_loadu_pd(raw(x + col[k])), s);
    _mm_storeu_pd(raw(y + r), s);
  }
}

void spmv_complex_avx2(int rows, const int* row_ptr, const int* col, const cplx* val,
                       const cplx* x, cplx* y) {
  for (int r = 0; r < rows; ++r) {
    __m256d acc = _mm256_setzero_pd();
    int k = row_ptr[r];
    const int end = row_ptr[r + 1];
    for (; k + 2 <= end; k += 2) {
      const __m256d v = _mm256_loadu_pd(raw(val + k));
      acc = _mm256_add_pd(acc, cmul(v, load2(x, col[k], col[k + 1])));
    }
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    double re = _mm_cvtsd_f64(s);
    double im = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
    if (k < end) {
      const cplx v = val[k], xv = x[col[k]];
      re += v.real() * xv.real() - v.imag() * xv.imag();
      im += v.real() * xv.imag() + v.imag() * xv.real();
    }
    y[r] = {re, im};
  }
}

constexpr KernelTable kAvx2{Isa::Avx2,      dot_conj_avx2,    norm_sq_avx2, axpy_avx2,
                            spmv_real_avx2, spmv_complex_avx2};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace cellperm::simd::detail
