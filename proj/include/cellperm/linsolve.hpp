// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellperm/sparse.hpp"

namespace cellperm {

/// Factorization broke down (zero pivot) or the residual check failed.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveReport {
  int n = 0;
  int nnz = 0;
  double relative_residual = 0.0;  // worst over the right-hand sides
  double pivot_growth = 1.0;       // max |U_ii| / max |scaled A_ij|
  double rcond = 0.0;              // reciprocal condition estimate (diag(U) based)
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string backend;
};

/// Sparse LU of a square complex matrix. Immutable once built; solve() may be
/// called concurrently from several threads.
class Factorization {
 public:
  explicit Factorization(const ComplexCsr& a);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;
  Factorization(const Factorization&) = delete;
  Factorization& operator=(const Factorization&) = delete;

  int size() const;
  CVec solve(std::span<const cplx> b) const;
  /// Factor-time diagnostics (residual fields are zero here).
  const SolveReport& report() const;
  const ComplexCsr& matrix() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// ||A x - b|| / ||b|| (0 when b = 0 and A x = 0).
double relative_residual(const ComplexCsr& a, std::span<const cplx> x, std::span<const cplx> b);

/// Factor once, solve every right-hand side, check residuals against `tol`.
struct SolveOutput {
  std::vector<CVec> solutions;
  SolveReport report;
};
SolveOutput factor_solve(const ComplexCsr& a, const std::vector<CVec>& rhs, double tol = 1e-10);

/// Solves with an existing factorization and fills the residual fields.
SolveOutput solve_with(const Factorization& f, const std::vector<CVec>& rhs, double tol = 1e-10);

using LinearOp = std::function<void(std::span<const cplx>, std::span<cplx>)>;
using InnerProduct = std::function<cplx(std::span<const cplx>, std::span<const cplx>)>;

struct PowerResult {
  double value = 0.0;  // last Rayleigh quotient
  int iterations = 0;
  bool converged = false;
  double last_change = 0.0;  // relative change of the Rayleigh quotient at exit
};

/// Largest eigenvalue of an operator self-adjoint and positive in `inner`.
/// Stops when the relative Rayleigh-quotient change drops below tol.
PowerResult power_iterate(const LinearOp& apply, const InnerProduct& inner, CVec start, double tol,
                          int max_iters);

}  // namespace cellperm
