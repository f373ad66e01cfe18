// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/simd.hpp"

namespace cellperm::simd {
namespace {

cplx dot_conj_ref(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i].real(), b = x[i].imag();
    const double c = y[i].real(), d = y[i].imag();
    re += a * c + b * d;
    im += a * d - b * c;
  }
  return {re, im};
}

double norm_sq_ref(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void axpy_ref(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void spmv_real_ref(int rows, const int* row_ptr, const int* col, const double* val, const cplx* x,
                   cplx* y) {
  for (int r = 0; r < rows; ++r) {
    double re = 0.0, im = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      re += val[k] * x[col[k]].real();
      im += val[k] * x[col[k]].imag();
    }
    y[r] = {re, im};
  }
}

void spmv_complex_ref(int rows, const int* row_ptr, const int* col, const cplx* val,
                      const cplx* x, cplx* y) {
  for (int r = 0; r < rows; ++r) {
    double re = 0.0, im = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const cplx v = val[k], xv = x[col[k]];
      re += v.real() * xv.real() - v.imag() * xv.imag();
      im += v.real() * xv.imag() + v.imag() * xv.real();
    }
    y[r] = {re, im};
  }
}

constexpr KernelTable kScalar{Isa::Scalar,   dot_conj_ref,    norm_sq_ref, axpy_ref,
                              spmv_real_ref, spmv_complex_ref};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace cellperm::simd
