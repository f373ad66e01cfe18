// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cellperm/simd.hpp"

namespace cellperm::simd {

#ifdef CELLPERM_HAVE_AVX2
namespace detail {
const KernelTable& avx2_table();
}
#endif

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable* avx2_kernels() {
#if defined(CELLPERM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* pick_default() {
  const char* env = std::getenv("CELLPERM_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void set_active(Isa isa) {
  if (isa == Isa::Scalar) {
    slot().store(&scalar_kernels());
    return;
  }
  const KernelTable* t = avx2_kernels();
  if (t == nullptr) throw std::runtime_error("AVX2 kernels unavailable on this machine");
  slot().store(t);
}

cplx dot_conj(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot_conj: size mismatch");
  return active().dot_conj(x.data(), y.data(), x.size());
}

double norm_sq(std::span<const cplx> x) { return active().norm_sq(x.data(), x.size()); }

double norm(std::span<const cplx> x) { return std::sqrt(norm_sq(x)); }

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace cellperm::simd
