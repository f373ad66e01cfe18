// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Operator view of the two-fluid problem. With the uniform-viscosity Gram
// product (u, v)_Q = mu1 v^H (A_host + A_incl) u on the constrained
// divergence-free space,
//   Delta^{-1} f : (w, v)_Q = f . conj(v)
//   Gamma u      : (w, v)_Q = mu1 v^H A_incl u
// and K(z) = sum_m Lambda_m (-s)^{-m} with z = 1 + 1/s, where
//   Lambda_m[k][l] = F_l . Gamma^m Delta^{-1} F_k.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cellperm/cell_problems.hpp"

namespace cellperm {

class NonConvergentSeries : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Uniform-viscosity Gram factorization on the two-fluid space of one level.
class OperatorContext {
 public:
  OperatorContext(CellProblems& problems, int level);
  ~OperatorContext();

  int level() const { return level_; }
  double mu1() const { return mu1_; }
  const OperatorBlocks& blocks() const { return *blocks_; }
  int num_velocity() const;
  const SolveReport& report() const;

  /// Velocity part of the Gram solve with load f (length num_velocity()).
  CVec delta_inv(std::span<const cplx> f) const;
  /// delta_inv of the unit force e_k.
  CVec delta_inv(int direction) const;
  CVec gamma_chi(std::span<const cplx> u) const;
  /// Gram-orthogonal projection onto the constrained divergence-free space.
  CVec project(std::span<const cplx> u) const;

  /// (u, v)_Q
  cplx inner(std::span<const cplx> u, std::span<const cplx> v) const;
  /// F_l . u
  cplx average(std::span<const cplx> u, int l) const;

 private:
  CVec solve_velocity(std::span<const cplx> load) const;

  int level_;
  double mu1_;
  std::shared_ptr<const OperatorBlocks> blocks_;
  RealCsr gram_;  // A_host + A_incl
  std::unique_ptr<Factorization> lu_;
};

struct MomentSequence {
  std::vector<Matrix2> lambda;  // lambda[m]
  /// max |Lambda_m| / max |Lambda_{m-1}| (index 0 unused).
  std::vector<double> decay;
};

MomentSequence moments(const OperatorContext& ctx, int max_order);

/// Largest eigenvalue of Gamma by power iteration from a seeded random start.
PowerResult gamma_norm(const OperatorContext& ctx, double tol = 1e-12, int max_iters = 2000,
                       std::uint64_t seed = 7);

struct SeriesEstimate {
  std::array<std::array<cplx, 2>, 2> k{};
  cplx s;
  int order = 0;
  double observed_ratio = 0.0;   // geometric mean term ratio over the upper half of the sum
  double truncation_bound = 0.0; // ratio-test bound on the neglected tail
};

/// Throws NonConvergentSeries when |s| <= gamma_bound, std::invalid_argument
/// when moments has fewer than M + 1 terms.
SeriesEstimate series_K(const MomentSequence& moments, cplx s, int order, double gamma_bound);

inline cplx z_from_s(cplx s) { return 1.0 + 1.0 / s; }
inline cplx s_from_z(cplx z) { return 1.0 / (z - 1.0); }

struct MomentRelation {
  Matrix2 k_one;          // K(z = 1) from a direct solve
  Matrix2 k_darcy;        // solid-skeleton K at the same level
  Matrix2 mu0;            // K(1) - K_darcy
  std::array<double, 2> mu0_eigenvalues{};
  double lambda0_mismatch = 0.0;       // max |Lambda_0 - K(1)| / max |K(1)|
  double lambda1_mismatch = 0.0;       // iterated vs explicit first moment, relative
  Matrix2 lambda1_explicit;            // mu1 u^l(1)^H A_incl u^k(1)
  double max_asymmetry = 0.0;          // over all checked moment matrices
  double min_moment_eigenvalue = 0.0;  // over Lambda_m, m >= 1
  bool mu0_psd = false;
};

MomentRelation moment_relation_check(CellProblems& problems, const OperatorContext& ctx,
                                     const MomentSequence& moments);

struct SeriesTerm {
  int k = 0;
  double norm_in = 0.0;   // energy norm on the inclusion, force e_1
  double norm_out = 0.0;  // energy norm on the host, force e_1
};

/// Terms u_k of an expansion u = sum t^k u_k with t = 1/z (large z) or
/// t = z (small z).
struct SeriesLedger {
  enum class Variable { InverseZ, Z };
  Variable variable = Variable::InverseZ;
  int level = 0;
  std::vector<SeriesTerm> terms;
  double ratio = 0.0;   // geometric growth of the term norms for k >= 3 (NaN if unavailable)
  double radius = 0.0;  // 1 / ratio, in the expansion variable
  std::array<std::vector<CVec>, 2> velocity;  // [direction][k]
  std::array<std::vector<double>, 2> load;    // full two-fluid load

  cplx variable_at(cplx z) const { return variable == Variable::InverseZ ? 1.0 / z : z; }
  /// Partial sum through kmax (all terms when negative).
  std::array<std::array<cplx, 2>, 2> partial_sum(cplx z, int kmax = -1) const;
  /// Geometric tail bound |t|^(K+1) |u_K| rho / (1 - |t| rho) in energy norm, or inf.
  double tail_bound(cplx z) const;
};

SeriesLedger large_z_iteration(CellProblems& problems, int level, int kmax);
SeriesLedger small_z_iteration(CellProblems& problems, int level, int kmax);

}  // namespace cellperm
