// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Vector kernels used by the iterative parts of the toolkit (power iteration,
// moment recursion, residual and energy evaluation). Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant. The variant is
// picked once at startup from CPUID; CELLPERM_SIMD=scalar|avx2 overrides.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace cellperm::simd {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  /// sum_i conj(x_i) * y_i
  cplx (*dot_conj)(const cplx* x, const cplx* y, std::size_t n);
  /// sum_i |x_i|^2
  double (*norm_sq)(const cplx* x, std::size_t n);
  /// y += a * x
  void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
  /// y = A x, A real CSR
  void (*spmv_real)(int rows, const int* row_ptr, const int* col, const double* val, const cplx* x,
                    cplx* y);
  /// y = A x, A complex CSR
  void (*spmv_complex)(int rows, const int* row_ptr, const int* col, const cplx* val,
                       const cplx* x, cplx* y);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Table chosen at startup.
const KernelTable& active();
Isa active_isa();
/// Test hook: switch the active table. Throws if the ISA is unavailable.
void set_active(Isa isa);

// Span front ends over the active table.
cplx dot_conj(std::span<const cplx> x, std::span<const cplx> y);
double norm_sq(std::span<const cplx> x);
double norm(std::span<const cplx> x);
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);

}  // namespace cellperm::simd
