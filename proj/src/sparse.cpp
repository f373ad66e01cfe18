// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/sparse.hpp"

namespace cellperm {

ComplexCsr to_complex(const RealCsr& a, double scale) {
  std::vector<Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(a.nnz()));
  a.append_to(t, 0, 0, cplx(scale));
  return ComplexCsr::from_triplets(a.rows(), a.cols(), std::move(t));
}

ComplexCsr combine(const RealCsr& a_mat, cplx a, const RealCsr& b_mat, cplx b) {
  if (a_mat.rows() != b_mat.rows() || a_mat.cols() != b_mat.cols())
    throw std::invalid_argument("combine: dimension mismatch");
  std::vector<Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(a_mat.nnz() + b_mat.nnz()));
  a_mat.append_to(t, 0, 0, a);
  b_mat.append_to(t, 0, 0, b);
  return ComplexCsr::from_triplets(a_mat.rows(), a_mat.cols(), std::move(t));
}

cplx bilinear_conj(const RealCsr& a, std::span<const cplx> x, std::span<const cplx> y) {
  const CVec ay = a * y;
  return simd::dot_conj(x, ay);
}

}  // namespace cellperm
